#pragma once

#include "histent/errors.hpp"

#include <complex>
#include <map>
#include <utility>
#include <vector>

namespace histent {

using Complex = std::complex<double>;

enum class Particle { A, B };

// A labeled spatial mode of one of the two particles.
struct Mode {
    Particle particle;
    int index;
};

// Sparse composite wavefunction over pairs of spatial modes (one mode per
// particle). Amplitudes with magnitude below the zero threshold are never
// stored, so the support of the map is exactly the set of occupied pairs.
class TwoParticleState {
public:
    static constexpr double default_zero_threshold = 1e-12;

    TwoParticleState(int mode_count_a, int mode_count_b,
                     double zero_threshold = default_zero_threshold);

    static TwoParticleState basis_state(int mode_count_a, int mode_count_b, int a, int b);

    int mode_count_a() const { return mode_count_a_; }
    int mode_count_b() const { return mode_count_b_; }
    double zero_threshold() const { return zero_threshold_; }

    // Overwrites the amplitude at (a, b); entries below threshold are erased.
    void set_amplitude(int a, int b, Complex value);
    void add_amplitude(int a, int b, Complex value);

    Complex amplitude(int a, int b) const;
    const std::map<std::pair<int, int>, Complex>& amplitudes() const { return amplitudes_; }

    std::size_t support_size() const { return amplitudes_.size(); }
    bool empty() const { return amplitudes_.empty(); }

    bool same_mode_space(const TwoParticleState& other) const {
        return mode_count_a_ == other.mode_count_a_ && mode_count_b_ == other.mode_count_b_;
    }

private:
    void check_indices(int a, int b) const;

    int mode_count_a_;
    int mode_count_b_;
    double zero_threshold_;
    std::map<std::pair<int, int>, Complex> amplitudes_;
};

// <bra|ket>, conjugate-linear in the first argument.
Complex inner_product(const TwoParticleState& bra, const TwoParticleState& ket);

// Keeps only the amplitude at one mode pair (compressed product projector).
TwoParticleState project(const TwoParticleState& state, std::pair<int, int> pair);

// Sum of |amplitude|^2; below 1 only after amplitude loss.
double squared_norm(const TwoParticleState& state);

} // namespace histent
