#pragma once

#include "histent/circuit.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace histent {

// Joint and unconditional detection probabilities for one beamsplitter
// setting. Joint probabilities may sum below one (annihilation).
struct DetectionTable {
    std::string label;
    std::map<std::pair<int, int>, double> joint;
    std::map<int, double> unconditional_a;
    std::map<int, double> unconditional_b;
};

// Joint probabilities |amplitude|^2 over the declared postselections of an
// evolved circuit; unconditional probabilities are the row/column sums.
DetectionTable detection_from_final_state(const TwoParticleState& final_state,
                                          const std::vector<Postselection>& posts,
                                          const std::string& label);

// Hardy detection table for final beamsplitter settings (keep = true means
// the beamsplitter stays in place).
DetectionTable detection_table(bool keep_a, bool keep_b);

// P(target | given) where target and given belong to opposite particles;
// the marginal is taken over the target particle's modes present in the table.
double conditional_probability(const DetectionTable& table, Mode target, Mode given);

// Halts one particle at the declared basis of intermediate point `stop_step`
// (1-based) while the other evolves through the remaining steps.
DetectionTable mid_circuit_table(const Circuit& circuit, Particle stop_particle, int stop_step);

// Product of nonnegative variables, e.g. {"x1+", "y2-"}.
struct LhvTerm {
    std::vector<std::string> factors;
};

// Sum of products, required to vanish or to be strictly positive.
struct LhvConstraint {
    std::string id;
    std::vector<LhvTerm> terms;
};

struct LhvSystem {
    std::vector<std::string> variables;
    std::vector<LhvConstraint> zero_constraints;
    std::vector<LhvConstraint> nonzero_constraints;
};

// One propagation step: `variable` forced to zero by a zero-constraint,
// supported by the nonzero-constraints listed in `support`.
struct Deduction {
    std::string variable;
    std::string zero_constraint;
    std::vector<std::string> support;
};

struct FeasibilityVerdict {
    enum class Status { feasible, infeasible, undetermined };

    Status status = Status::undetermined;
    std::vector<std::string> forced_zero;
    std::vector<Deduction> deductions;
    std::string contradicted_constraint;     // set when infeasible
    std::map<std::string, double> witness;   // set when feasible

    bool feasible() const { return status == Status::feasible; }
};

// Local-model constraint system for joint arrival at (target_a, target_b):
// weights x_arm^setting for particle A, y_arm^setting for particle B, with
// the annihilating arm pair (2,2) excluded and the fixed 1/4 joint weight.
// Tables must be ordered (keep,keep), (keep,remove), (remove,keep),
// (remove,remove).
LhvSystem build_lhv_system(const std::array<DetectionTable, 4>& tables,
                           int target_a, int target_b);

// Exact zero-pattern reasoning, no numeric optimization: propagates forced
// zeros to a fixpoint and reports either a contradicted nonzero-constraint
// (with the deduction chain) or a verified witness assignment.
FeasibilityVerdict check_feasibility(const LhvSystem& system);

// True when each party's unconditional probabilities are unaffected by the
// other party's setting, within 1e-10.
bool no_signalling_check(const std::array<DetectionTable, 4>& tables);

} // namespace histent
