#pragma once

#include "histent/state.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace histent {

// Single-particle linear map for one time step: each source mode scatters
// into a list of (target mode, coefficient) pairs. Restricted to its source
// modes the map must be an isometry (orthonormal columns).
struct ModeMap {
    std::map<int, std::vector<std::pair<int, Complex>>> rules;

    bool has_rule(int source) const { return rules.count(source) != 0; }

    // Coefficient of source -> target, zero when no such rule entry exists.
    Complex coefficient(int source, int target) const;

    static ModeMap identity(const std::vector<int>& modes);
};

struct TimeStep {
    ModeMap map_a;
    ModeMap map_b;
    std::set<std::pair<int, int>> annihilate; // joint amplitudes deleted after the maps
};

// Factored projector basis at one intermediate time point: the occupied
// subspace is spanned by pairs (modes_a[i], modes_b[j]).
struct BasisLayer {
    std::vector<int> modes_a;
    std::vector<int> modes_b;
};

struct Postselection {
    std::string name;
    int a = 0;
    int b = 0;

    std::pair<int, int> pair() const { return {a, b}; }
};

// Declarative two-particle interferometric circuit. Intermediate bases are
// declared explicitly (one layer per time point between consecutive steps);
// the engine does not infer them.
struct Circuit {
    Circuit(int mode_count_a, int mode_count_b)
        : mode_count_a(mode_count_a),
          mode_count_b(mode_count_b),
          initial(mode_count_a, mode_count_b) {}

    int mode_count_a;
    int mode_count_b;
    TwoParticleState initial;
    std::vector<TimeStep> steps;
    std::vector<BasisLayer> intermediate_bases;
    std::vector<Postselection> postselections;

    // Number of intermediate time points (k).
    int history_points() const { return static_cast<int>(intermediate_bases.size()); }

    // Effective local dimension n shared by every basis layer; 0 when k = 0.
    int local_dimension() const;

    const Postselection* find_postselection(const std::string& name) const;
    const Postselection* find_postselection(std::pair<int, int> pair) const;

    // Checks all structural invariants: unit-norm initial state, layer counts,
    // index ranges, isometric mode maps. Throws ScenarioError on violation.
    void validate() const;
};

// Isometry check: columns of the coefficient matrix restricted to the map's
// source modes must be orthonormal within tol.
void validate_isometry(const ModeMap& map, int mode_count, double tol = 1e-10,
                       const std::string& context = {});

// Applies map_a (x) map_b linearly, then deletes every annihilate pair.
TwoParticleState apply_step(const TwoParticleState& state, const TimeStep& step);

// States at t_0..t_m for a circuit with m steps; element 0 is the initial state.
std::vector<TwoParticleState> evolve(const Circuit& circuit);

} // namespace histent
