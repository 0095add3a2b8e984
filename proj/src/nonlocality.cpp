#include "histent/nonlocality.hpp"

#include "histent/hardy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>

namespace histent {

namespace {

constexpr double positivity_threshold = 1e-9; // quantum probability counted as nonzero
constexpr double probability_tol = 1e-10;

} // namespace

DetectionTable detection_from_final_state(const TwoParticleState& final_state,
                                          const std::vector<Postselection>& posts,
                                          const std::string& label) {
    DetectionTable table;
    table.label = label;
    for (const auto& post : posts) {
        table.joint[{post.a, post.b}] = std::norm(final_state.amplitude(post.a, post.b));
    }
    for (const auto& [pair, p] : table.joint) {
        table.unconditional_a[pair.first] += p;
        table.unconditional_b[pair.second] += p;
    }
    return table;
}

DetectionTable detection_table(bool keep_a, bool keep_b) {
    hardy::HardyConfig config{keep_a, keep_b};
    Circuit circuit = hardy::build(config);
    TwoParticleState final_state = evolve(circuit).back();
    std::string label = std::string("A") + (keep_a ? "+" : "-") + "B" + (keep_b ? "+" : "-");
    return detection_from_final_state(final_state, circuit.postselections, label);
}

double conditional_probability(const DetectionTable& table, Mode target, Mode given) {
    if (target.particle == given.particle) {
        throw UndefinedConditionalError("target and conditioning modes must belong to different particles");
    }
    auto joint_at = [&](int a, int b) {
        auto it = table.joint.find({a, b});
        return it == table.joint.end() ? 0.0 : it->second;
    };

    double numerator = 0.0;
    double marginal = 0.0;
    for (const auto& [pair, p] : table.joint) {
        int on_given_side = given.particle == Particle::A ? pair.first : pair.second;
        if (on_given_side != given.index) {
            continue;
        }
        marginal += p;
    }
    numerator = given.particle == Particle::A ? joint_at(given.index, target.index)
                                              : joint_at(target.index, given.index);
    if (marginal <= 1e-15) {
        throw UndefinedConditionalError("conditioning event has zero probability");
    }
    return numerator / marginal;
}

DetectionTable mid_circuit_table(const Circuit& circuit, Particle stop_particle, int stop_step) {
    const int k = circuit.history_points();
    if (stop_step < 1 || stop_step > k) {
        throw IndexError("stop point " + std::to_string(stop_step) +
                         " is not a valid intermediate time point");
    }

    const BasisLayer& stop_layer = circuit.intermediate_bases[stop_step - 1];
    const std::vector<int>& stop_modes =
        stop_particle == Particle::A ? stop_layer.modes_a : stop_layer.modes_b;

    Circuit halted = circuit;
    for (std::size_t s = stop_step; s < halted.steps.size(); ++s) {
        if (stop_particle == Particle::A) {
            halted.steps[s].map_a = ModeMap::identity(stop_modes);
        } else {
            halted.steps[s].map_b = ModeMap::identity(stop_modes);
        }
    }
    TwoParticleState final_state = evolve(halted).back();

    // Grid: the moving particle's declared final outcomes crossed with the
    // halted particle's stop-basis modes, zeros included.
    std::vector<int> moving_outcomes;
    for (const auto& post : circuit.postselections) {
        int mode = stop_particle == Particle::A ? post.b : post.a;
        if (std::find(moving_outcomes.begin(), moving_outcomes.end(), mode) ==
            moving_outcomes.end()) {
            moving_outcomes.push_back(mode);
        }
    }

    std::vector<Postselection> grid;
    for (int stopped : stop_modes) {
        for (int moving : moving_outcomes) {
            Postselection post;
            if (stop_particle == Particle::A) {
                post.a = stopped;
                post.b = moving;
            } else {
                post.a = moving;
                post.b = stopped;
            }
            grid.push_back(post);
        }
    }
    std::string label = std::string("stop ") + (stop_particle == Particle::A ? "A" : "B") +
                        " at t" + std::to_string(stop_step);
    return detection_from_final_state(final_state, grid, label);
}

namespace {

std::string weight_name(char base, int arm, bool keep) {
    return std::string(1, base) + std::to_string(arm) + (keep ? "+" : "-");
}

std::vector<std::string> sorted_term(std::vector<std::string> factors) {
    std::sort(factors.begin(), factors.end());
    return factors;
}

} // namespace

LhvSystem build_lhv_system(const std::array<DetectionTable, 4>& tables, int target_a,
                           int target_b) {
    LhvSystem system;
    for (bool keep : {true, false}) {
        for (int arm : {1, 2}) {
            system.variables.push_back(weight_name('x', arm, keep));
        }
    }
    for (bool keep : {true, false}) {
        for (int arm : {1, 2}) {
            system.variables.push_back(weight_name('y', arm, keep));
        }
    }

    const std::array<std::pair<bool, bool>, 4> settings{
        {{true, true}, {true, false}, {false, true}, {false, false}}};

    // Joint constraints l1..l4: arm pairs (1,1), (1,2), (2,1); the annihilating
    // pair (2,2) never reaches the detectors and is excluded.
    for (std::size_t c = 0; c < settings.size(); ++c) {
        auto it = tables[c].joint.find({target_a, target_b});
        if (it == tables[c].joint.end()) {
            continue;
        }
        const auto [keep_a, keep_b] = settings[c];
        LhvConstraint constraint;
        constraint.id = "l" + std::to_string(c + 1);
        for (auto [arm_a, arm_b] : {std::pair{1, 1}, std::pair{1, 2}, std::pair{2, 1}}) {
            constraint.terms.push_back(
                {{weight_name('x', arm_a, keep_a), weight_name('y', arm_b, keep_b)}});
        }
        if (it->second > positivity_threshold) {
            system.nonzero_constraints.push_back(std::move(constraint));
        } else {
            system.zero_constraints.push_back(std::move(constraint));
        }
    }

    // Marginal constraints l5..l8 from positive unconditional probabilities.
    struct Marginal {
        const char* id;
        char base;
        bool keep;
        std::size_t table;
    };
    const std::array<Marginal, 4> marginals{{{"l5", 'x', true, 0},
                                             {"l6", 'x', false, 3},
                                             {"l7", 'y', true, 0},
                                             {"l8", 'y', false, 3}}};
    for (const auto& m : marginals) {
        const auto& unconditional =
            m.base == 'x' ? tables[m.table].unconditional_a : tables[m.table].unconditional_b;
        auto it = unconditional.find(m.base == 'x' ? target_a : target_b);
        if (it == unconditional.end() || it->second <= positivity_threshold) {
            continue;
        }
        LhvConstraint constraint;
        constraint.id = m.id;
        constraint.terms.push_back({{weight_name(m.base, 1, m.keep)}});
        constraint.terms.push_back({{weight_name(m.base, 2, m.keep)}});
        system.nonzero_constraints.push_back(std::move(constraint));
    }
    return system;
}

FeasibilityVerdict check_feasibility(const LhvSystem& system) {
    FeasibilityVerdict verdict;
    std::set<std::string> zero;
    std::vector<std::string> zero_order;
    std::set<std::string> positive;
    std::map<std::string, std::string> positive_source;
    // Per deduced variable: earlier zeros its derivation relied on (rule D);
    // per positive fact likewise. Used to slice the minimal chain afterwards.
    std::map<std::string, std::set<std::string>> zero_deps;
    std::map<std::string, std::set<std::string>> positive_deps;

    auto term_dead = [&](const LhvTerm& term) {
        return std::any_of(term.factors.begin(), term.factors.end(),
                           [&](const std::string& f) { return zero.count(f) != 0; });
    };

    // Earliest-deduced zero factor of a dead term.
    auto earliest_zero_in = [&](const LhvTerm& term) -> std::string {
        for (const auto& v : zero_order) {
            if (std::find(term.factors.begin(), term.factors.end(), v) != term.factors.end()) {
                return v;
            }
        }
        return {};
    };

    auto force_zero = [&](const std::string& var, const std::string& zero_id,
                          std::vector<std::string> support, std::set<std::string> deps) {
        if (zero.insert(var).second) {
            zero_order.push_back(var);
            zero_deps[var] = std::move(deps);
            verdict.forced_zero.push_back(var);
            verdict.deductions.push_back({var, zero_id, std::move(support)});
            return true;
        }
        return false;
    };

    // Trims the recorded chain to the deductions the contradiction actually
    // uses (the seeds plus their transitive dependencies), preserving order.
    auto finish_infeasible = [&](const std::string& constraint_id,
                                 std::set<std::string> seeds) {
        std::vector<std::string> pending(seeds.begin(), seeds.end());
        std::set<std::string> needed;
        while (!pending.empty()) {
            std::string v = pending.back();
            pending.pop_back();
            if (!needed.insert(v).second) {
                continue;
            }
            for (const auto& dep : zero_deps[v]) {
                pending.push_back(dep);
            }
        }
        std::vector<Deduction> chain;
        std::vector<std::string> forced;
        for (const auto& d : verdict.deductions) {
            if (needed.count(d.variable) != 0) {
                chain.push_back(d);
                forced.push_back(d.variable);
            }
        }
        verdict.deductions = std::move(chain);
        verdict.forced_zero = std::move(forced);
        verdict.status = FeasibilityVerdict::Status::infeasible;
        verdict.contradicted_constraint = constraint_id;
        return verdict;
    };

    // Returns the first contradicted nonzero-constraint, or nullptr.
    auto find_dead_nonzero = [&]() -> const LhvConstraint* {
        for (const auto& n : system.nonzero_constraints) {
            if (std::all_of(n.terms.begin(), n.terms.end(), term_dead)) {
                return &n;
            }
        }
        return nullptr;
    };

    bool changed = true;
    while (changed) {
        changed = false;

        // Singleton terms of a vanishing sum force their variable directly.
        for (const auto& z : system.zero_constraints) {
            for (const auto& term : z.terms) {
                if (term.factors.size() == 1 && zero.count(term.factors[0]) == 0) {
                    changed |= force_zero(term.factors[0], z.id, {}, {});
                }
            }
        }

        // Cofactor cover: if multiplying variable v into every term of a
        // nonzero-constraint lands inside a zero-constraint, then
        // v * (positive sum) = 0 forces v = 0.
        for (const auto& z : system.zero_constraints) {
            std::vector<std::string> vars_in_z;
            for (const auto& term : z.terms) {
                for (const auto& f : term.factors) {
                    if (std::find(vars_in_z.begin(), vars_in_z.end(), f) == vars_in_z.end()) {
                        vars_in_z.push_back(f);
                    }
                }
            }
            for (const auto& v : vars_in_z) {
                if (zero.count(v) != 0) {
                    continue;
                }
                std::set<std::vector<std::string>> cofactors;
                for (const auto& term : z.terms) {
                    auto it = std::find(term.factors.begin(), term.factors.end(), v);
                    if (it == term.factors.end()) {
                        continue;
                    }
                    std::vector<std::string> rest = term.factors;
                    rest.erase(rest.begin() + (it - term.factors.begin()));
                    cofactors.insert(sorted_term(std::move(rest)));
                }
                for (const auto& n : system.nonzero_constraints) {
                    bool covers = std::all_of(n.terms.begin(), n.terms.end(),
                                              [&](const LhvTerm& term) {
                                                  return cofactors.count(
                                                             sorted_term(term.factors)) != 0;
                                              });
                    if (covers) {
                        changed |= force_zero(v, z.id, {n.id}, {});
                        break;
                    }
                }
            }
        }

        // A nonzero-constraint with every term killed is the contradiction.
        if (const LhvConstraint* dead = find_dead_nonzero()) {
            std::set<std::string> seeds;
            for (const auto& term : dead->terms) {
                seeds.insert(earliest_zero_in(term));
            }
            return finish_infeasible(dead->id, std::move(seeds));
        }

        // A nonzero-constraint with a single live term makes that whole term positive.
        for (const auto& n : system.nonzero_constraints) {
            const LhvTerm* live = nullptr;
            int live_count = 0;
            for (const auto& term : n.terms) {
                if (!term_dead(term)) {
                    live = &term;
                    ++live_count;
                }
            }
            if (live_count == 1) {
                std::set<std::string> deps;
                for (const auto& term : n.terms) {
                    if (term_dead(term)) {
                        deps.insert(earliest_zero_in(term));
                    }
                }
                for (const auto& f : live->factors) {
                    if (positive.insert(f).second) {
                        positive_source.emplace(f, n.id);
                        positive_deps[f] = deps;
                        changed = true;
                    }
                }
            }
        }

        // Inside a vanishing term, known-positive cofactors force the one
        // remaining factor to zero.
        for (const auto& z : system.zero_constraints) {
            for (const auto& term : z.terms) {
                if (term_dead(term)) {
                    continue;
                }
                std::vector<std::string> open;
                std::vector<std::string> support;
                std::set<std::string> deps;
                for (const auto& f : term.factors) {
                    if (positive.count(f) != 0) {
                        support.push_back(positive_source.at(f));
                        deps.insert(positive_deps[f].begin(), positive_deps[f].end());
                    } else {
                        open.push_back(f);
                    }
                }
                if (open.empty()) {
                    // term provably positive but required to vanish
                    return finish_infeasible(z.id, std::move(deps));
                }
                if (open.size() == 1) {
                    std::sort(support.begin(), support.end());
                    support.erase(std::unique(support.begin(), support.end()), support.end());
                    changed |= force_zero(open[0], z.id, std::move(support), std::move(deps));
                }
            }
        }
    }

    // No contradiction propagated; look for a witness over zero-patterns
    // (zero/one assignments decide feasibility for sums of products of
    // nonnegative variables).
    std::vector<std::string> free_vars;
    for (const auto& v : system.variables) {
        if (zero.count(v) == 0) {
            free_vars.push_back(v);
        }
    }

    auto satisfied = [&](const std::set<std::string>& zeroed) {
        auto term_zero = [&](const LhvTerm& term) {
            return std::any_of(term.factors.begin(), term.factors.end(),
                               [&](const std::string& f) { return zeroed.count(f) != 0; });
        };
        for (const auto& z : system.zero_constraints) {
            if (!std::all_of(z.terms.begin(), z.terms.end(), term_zero)) {
                return false;
            }
        }
        for (const auto& n : system.nonzero_constraints) {
            if (std::all_of(n.terms.begin(), n.terms.end(), term_zero)) {
                return false;
            }
        }
        return true;
    };

    auto accept = [&](const std::set<std::string>& zeroed) {
        verdict.status = FeasibilityVerdict::Status::feasible;
        for (const auto& v : system.variables) {
            verdict.witness[v] = zeroed.count(v) != 0 ? 0.0 : 1.0;
        }
    };

    // Setting every non-forced variable to one is the cheapest candidate.
    if (satisfied(zero)) {
        accept(zero);
        return verdict;
    }
    // Exhaustive zero-pattern search, fewest extra zeros first; beyond the
    // enumeration cap the verdict stays undetermined rather than guessed.
    const std::size_t count = free_vars.size();
    if (count > 20) {
        verdict.status = FeasibilityVerdict::Status::undetermined;
        return verdict;
    }
    std::vector<std::uint32_t> masks(std::size_t{1} << count);
    std::iota(masks.begin(), masks.end(), 0u);
    std::stable_sort(masks.begin(), masks.end(), [](std::uint32_t lhs, std::uint32_t rhs) {
        return std::popcount(lhs) < std::popcount(rhs);
    });
    for (std::uint32_t mask : masks) {
        if (mask == 0) {
            continue;
        }
        std::set<std::string> zeroed = zero;
        for (std::size_t i = 0; i < count; ++i) {
            if (mask & (1u << i)) {
                zeroed.insert(free_vars[i]);
            }
        }
        if (satisfied(zeroed)) {
            accept(zeroed);
            return verdict;
        }
    }

    verdict.status = FeasibilityVerdict::Status::undetermined;
    return verdict;
}

namespace {

bool marginals_match(const std::map<int, double>& lhs, const std::map<int, double>& rhs) {
    if (lhs.size() != rhs.size()) {
        return false;
    }
    for (const auto& [mode, p] : lhs) {
        auto it = rhs.find(mode);
        if (it == rhs.end() || std::abs(it->second - p) > probability_tol) {
            return false;
        }
    }
    return true;
}

} // namespace

bool no_signalling_check(const std::array<DetectionTable, 4>& tables) {
    // Tables ordered (A+,B+), (A+,B-), (A-,B+), (A-,B-): A marginals must not
    // depend on B's setting and vice versa.
    return marginals_match(tables[0].unconditional_a, tables[1].unconditional_a) &&
           marginals_match(tables[2].unconditional_a, tables[3].unconditional_a) &&
           marginals_match(tables[0].unconditional_b, tables[2].unconditional_b) &&
           marginals_match(tables[1].unconditional_b, tables[3].unconditional_b);
}

} // namespace histent
