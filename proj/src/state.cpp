#include "histent/state.hpp"

#include <cmath>

namespace histent {

TwoParticleState::TwoParticleState(int mode_count_a, int mode_count_b, double zero_threshold)
    : mode_count_a_(mode_count_a), mode_count_b_(mode_count_b), zero_threshold_(zero_threshold) {
    if (mode_count_a < 0 || mode_count_b < 0) {
        throw IndexError("mode counts must be nonnegative");
    }
}

TwoParticleState TwoParticleState::basis_state(int mode_count_a, int mode_count_b, int a, int b) {
    TwoParticleState state(mode_count_a, mode_count_b);
    state.set_amplitude(a, b, Complex{1.0, 0.0});
    return state;
}

void TwoParticleState::check_indices(int a, int b) const {
    if (a < 0 || a >= mode_count_a_) {
        throw IndexError("mode index " + std::to_string(a) + " out of range for particle A (count " +
                         std::to_string(mode_count_a_) + ")");
    }
    if (b < 0 || b >= mode_count_b_) {
        throw IndexError("mode index " + std::to_string(b) + " out of range for particle B (count " +
                         std::to_string(mode_count_b_) + ")");
    }
}

void TwoParticleState::set_amplitude(int a, int b, Complex value) {
    check_indices(a, b);
    if (std::abs(value) < zero_threshold_) {
        amplitudes_.erase({a, b});
    } else {
        amplitudes_[{a, b}] = value;
    }
}

void TwoParticleState::add_amplitude(int a, int b, Complex value) {
    check_indices(a, b);
    set_amplitude(a, b, amplitude(a, b) + value);
}

Complex TwoParticleState::amplitude(int a, int b) const {
    auto it = amplitudes_.find({a, b});
    return it == amplitudes_.end() ? Complex{0.0, 0.0} : it->second;
}

Complex inner_product(const TwoParticleState& bra, const TwoParticleState& ket) {
    if (!bra.same_mode_space(ket)) {
        throw DimensionMismatchError("inner product between states over different mode spaces");
    }
    Complex sum{0.0, 0.0};
    for (const auto& [pair, amp] : ket.amplitudes()) {
        sum += std::conj(bra.amplitude(pair.first, pair.second)) * amp;
    }
    return sum;
}

TwoParticleState project(const TwoParticleState& state, std::pair<int, int> pair) {
    TwoParticleState out(state.mode_count_a(), state.mode_count_b(), state.zero_threshold());
    out.set_amplitude(pair.first, pair.second, state.amplitude(pair.first, pair.second));
    return out;
}

double squared_norm(const TwoParticleState& state) {
    double sum = 0.0;
    for (const auto& [pair, amp] : state.amplitudes()) {
        sum += std::norm(amp);
    }
    return sum;
}

} // namespace histent
