#include "histent/nonlocality.hpp"

#include "histent/hardy.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace histent;
using namespace histent::testing;

namespace {

std::array<DetectionTable, 4> hardy_tables() {
    return {detection_table(true, true), detection_table(true, false),
            detection_table(false, true), detection_table(false, false)};
}

double joint(const DetectionTable& t, int a, int b) {
    return t.joint.at({a, b});
}

// Re-derives an infeasibility chain step by step: every deduction must be a
// valid cofactor-cover or positivity step, and the contradicted constraint
// must end up with all terms dead.
bool chain_rederives(const LhvSystem& system, const FeasibilityVerdict& verdict) {
    auto find_zero = [&](const std::string& id) -> const LhvConstraint* {
        for (const auto& z : system.zero_constraints) {
            if (z.id == id) {
                return &z;
            }
        }
        return nullptr;
    };
    std::set<std::string> zeros;
    for (const auto& d : verdict.deductions) {
        const LhvConstraint* z = find_zero(d.zero_constraint);
        if (z == nullptr) {
            return false;
        }
        // The variable must occur in the zero-constraint...
        bool occurs = false;
        for (const auto& term : z->terms) {
            occurs |= std::find(term.factors.begin(), term.factors.end(), d.variable) !=
                      term.factors.end();
        }
        if (!occurs) {
            return false;
        }
        // ...and a single supporting nonzero-constraint must actually be
        // covered by the variable's cofactors: v * (sum > 0) <= (sum = 0).
        if (d.support.size() == 1) {
            const LhvConstraint* n = nullptr;
            for (const auto& candidate : system.nonzero_constraints) {
                if (candidate.id == d.support[0]) {
                    n = &candidate;
                }
            }
            if (n == nullptr) {
                return false;
            }
            std::set<std::vector<std::string>> cofactors;
            for (const auto& term : z->terms) {
                auto it = std::find(term.factors.begin(), term.factors.end(), d.variable);
                if (it == term.factors.end()) {
                    continue;
                }
                std::vector<std::string> rest = term.factors;
                rest.erase(rest.begin() + (it - term.factors.begin()));
                std::sort(rest.begin(), rest.end());
                cofactors.insert(rest);
            }
            for (const auto& term : n->terms) {
                std::vector<std::string> sorted = term.factors;
                std::sort(sorted.begin(), sorted.end());
                if (cofactors.count(sorted) == 0) {
                    return false;
                }
            }
        }
        zeros.insert(d.variable);
    }
    for (const auto& n : system.nonzero_constraints) {
        if (n.id != verdict.contradicted_constraint) {
            continue;
        }
        return std::all_of(n.terms.begin(), n.terms.end(), [&](const LhvTerm& term) {
            return std::any_of(term.factors.begin(), term.factors.end(),
                               [&](const std::string& f) { return zeros.count(f) != 0; });
        });
    }
    return false;
}

bool witness_satisfies(const LhvSystem& system, const std::map<std::string, double>& witness) {
    auto term_value = [&](const LhvTerm& term) {
        double value = 1.0;
        for (const auto& f : term.factors) {
            value *= witness.at(f);
        }
        return value;
    };
    for (const auto& z : system.zero_constraints) {
        double sum = 0.0;
        for (const auto& term : z.terms) {
            sum += term_value(term);
        }
        if (sum != 0.0) {
            return false;
        }
    }
    for (const auto& n : system.nonzero_constraints) {
        double sum = 0.0;
        for (const auto& term : n.terms) {
            sum += term_value(term);
        }
        if (sum <= 0.0) {
            return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("case 1 detection table") {
    auto t = detection_table(true, true);
    CHECK(joint(t, 5, 5) == doctest::Approx(9.0 / 16.0).epsilon(1e-10));
    CHECK(joint(t, 5, 6) == doctest::Approx(1.0 / 16.0).epsilon(1e-10));
    CHECK(joint(t, 6, 5) == doctest::Approx(1.0 / 16.0).epsilon(1e-10));
    CHECK(joint(t, 6, 6) == doctest::Approx(1.0 / 16.0).epsilon(1e-10));
    CHECK(t.unconditional_a.at(5) == doctest::Approx(5.0 / 8.0).epsilon(1e-10));
    CHECK(t.unconditional_a.at(6) == doctest::Approx(1.0 / 8.0).epsilon(1e-10));
    CHECK(t.unconditional_b.at(5) == doctest::Approx(5.0 / 8.0).epsilon(1e-10));
    CHECK(t.unconditional_b.at(6) == doctest::Approx(1.0 / 8.0).epsilon(1e-10));
}

TEST_CASE("case 2 detection table") {
    auto t = detection_table(true, false);
    CHECK(joint(t, 5, 5) == doctest::Approx(1.0 / 8.0).epsilon(1e-10));
    CHECK(joint(t, 5, 6) == doctest::Approx(1.0 / 2.0).epsilon(1e-10));
    CHECK(joint(t, 6, 5) == doctest::Approx(1.0 / 8.0).epsilon(1e-10));
    CHECK(joint(t, 6, 6) == 0.0);
    CHECK(t.unconditional_a.at(5) == doctest::Approx(5.0 / 8.0).epsilon(1e-10));
    CHECK(t.unconditional_b.at(5) == doctest::Approx(1.0 / 4.0).epsilon(1e-10));
    CHECK(t.unconditional_b.at(6) == doctest::Approx(1.0 / 2.0).epsilon(1e-10));
}

TEST_CASE("case 3 detection table") {
    auto t = detection_table(false, true);
    CHECK(joint(t, 5, 5) == doctest::Approx(1.0 / 8.0).epsilon(1e-10));
    CHECK(joint(t, 5, 6) == doctest::Approx(1.0 / 8.0).epsilon(1e-10));
    CHECK(joint(t, 6, 5) == doctest::Approx(1.0 / 2.0).epsilon(1e-10));
    CHECK(joint(t, 6, 6) == 0.0);
    CHECK(t.unconditional_a.at(6) == doctest::Approx(1.0 / 2.0).epsilon(1e-10));
    CHECK(t.unconditional_b.at(5) == doctest::Approx(5.0 / 8.0).epsilon(1e-10));
}

TEST_CASE("case 4 detection table") {
    auto t = detection_table(false, false);
    CHECK(joint(t, 5, 5) == 0.0);
    CHECK(joint(t, 5, 6) == doctest::Approx(1.0 / 4.0).epsilon(1e-10));
    CHECK(joint(t, 6, 5) == doctest::Approx(1.0 / 4.0).epsilon(1e-10));
    CHECK(joint(t, 6, 6) == doctest::Approx(1.0 / 4.0).epsilon(1e-10));
    CHECK(t.unconditional_a.at(5) == doctest::Approx(1.0 / 4.0).epsilon(1e-10));
    CHECK(t.unconditional_a.at(6) == doctest::Approx(1.0 / 2.0).epsilon(1e-10));
}

TEST_CASE("joint sums equal 3/4 in every case") {
    for (const auto& t : hardy_tables()) {
        double sum = 0.0;
        for (const auto& [pair, p] : t.joint) {
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
            sum += p;
        }
        CHECK(sum == doctest::Approx(0.75).epsilon(1e-10));
    }
}

TEST_CASE("unconditional probabilities are the joint row and column sums") {
    for (const auto& t : hardy_tables()) {
        std::map<int, double> rows, cols;
        for (const auto& [pair, p] : t.joint) {
            rows[pair.first] += p;
            cols[pair.second] += p;
        }
        for (const auto& [mode, p] : t.unconditional_a) {
            CHECK(p == doctest::Approx(rows[mode]).epsilon(1e-10));
        }
        for (const auto& [mode, p] : t.unconditional_b) {
            CHECK(p == doctest::Approx(cols[mode]).epsilon(1e-10));
        }
    }
}

TEST_CASE("mid-circuit table with the positron halted at the arms") {
    auto circuit = hardy::build({true, true});
    auto t = mid_circuit_table(circuit, Particle::B, 2);
    CHECK(joint(t, 5, 3) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(joint(t, 5, 4) == doctest::Approx(0.125).epsilon(1e-10));
    CHECK(joint(t, 6, 4) == doctest::Approx(0.125).epsilon(1e-10));
    CHECK(joint(t, 6, 3) == 0.0);
}

TEST_CASE("mid-circuit table with the electron halted at the arms") {
    auto circuit = hardy::build({true, true});
    auto t = mid_circuit_table(circuit, Particle::A, 2);
    CHECK(joint(t, 3, 5) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(joint(t, 4, 5) == doctest::Approx(0.125).epsilon(1e-10));
    CHECK(joint(t, 4, 6) == doctest::Approx(0.125).epsilon(1e-10));
    CHECK(joint(t, 3, 6) == 0.0);
}

TEST_CASE("mid-circuit conditional probabilities force the classical paradox") {
    auto circuit = hardy::build({true, true});
    auto stop_b = mid_circuit_table(circuit, Particle::B, 2);
    CHECK(conditional_probability(stop_b, {Particle::B, 4}, {Particle::A, 6}) == 1.0);
    CHECK(conditional_probability(stop_b, {Particle::B, 3}, {Particle::A, 6}) == 0.0);

    auto stop_a = mid_circuit_table(circuit, Particle::A, 2);
    CHECK(conditional_probability(stop_a, {Particle::A, 4}, {Particle::B, 6}) == 1.0);
    CHECK(conditional_probability(stop_a, {Particle::A, 3}, {Particle::B, 6}) == 0.0);
}

TEST_CASE("conditioning on a zero-probability event is an error") {
    DetectionTable t;
    t.joint[{0, 0}] = 1.0;
    t.joint[{1, 0}] = 0.0;
    CHECK_THROWS_AS((void)conditional_probability(t, {Particle::B, 0}, {Particle::A, 1}),
                    UndefinedConditionalError);
    CHECK_THROWS_AS((void)conditional_probability(t, {Particle::A, 0}, {Particle::A, 1}),
                    UndefinedConditionalError);
}

TEST_CASE("mid-circuit stop point is validated") {
    auto circuit = hardy::build({true, true});
    CHECK_THROWS_AS((void)mid_circuit_table(circuit, Particle::B, 0), IndexError);
    CHECK_THROWS_AS((void)mid_circuit_table(circuit, Particle::B, 3), IndexError);
}

TEST_CASE("identity circuit halted anywhere keeps the initial pair") {
    Circuit circuit(2, 2);
    circuit.initial.set_amplitude(0, 0, {1.0, 0.0});
    TimeStep step;
    step.map_a = ModeMap::identity({0, 1});
    step.map_b = ModeMap::identity({0, 1});
    circuit.steps = {step, step};
    circuit.intermediate_bases = {{{0, 1}, {0, 1}}};
    circuit.postselections = {{"p00", 0, 0}};
    circuit.validate();
    auto t = mid_circuit_table(circuit, Particle::B, 1);
    CHECK(joint(t, 0, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("the Hardy LHV system matches the published constraint list") {
    auto system = build_lhv_system(hardy_tables(), 6, 6);
    REQUIRE(system.zero_constraints.size() == 2);
    CHECK(system.zero_constraints[0].id == "l2");
    CHECK(system.zero_constraints[1].id == "l3");
    REQUIRE(system.zero_constraints[0].terms.size() == 3);
    CHECK(system.zero_constraints[0].terms[0].factors == std::vector<std::string>{"x1+", "y1-"});
    CHECK(system.zero_constraints[0].terms[1].factors == std::vector<std::string>{"x1+", "y2-"});
    CHECK(system.zero_constraints[0].terms[2].factors == std::vector<std::string>{"x2+", "y1-"});
    CHECK(system.zero_constraints[1].terms[0].factors == std::vector<std::string>{"x1-", "y1+"});

    REQUIRE(system.nonzero_constraints.size() == 6);
    CHECK(system.nonzero_constraints[0].id == "l1");
    CHECK(system.nonzero_constraints[1].id == "l4");
    CHECK(system.nonzero_constraints[2].id == "l5");
    CHECK(system.nonzero_constraints[5].id == "l8");
    CHECK(system.nonzero_constraints[5].terms[0].factors == std::vector<std::string>{"y1-"});
}

TEST_CASE("the Hardy LHV system is infeasible with the shortest chain") {
    auto system = build_lhv_system(hardy_tables(), 6, 6);
    auto verdict = check_feasibility(system);
    REQUIRE(verdict.status == FeasibilityVerdict::Status::infeasible);
    CHECK(verdict.contradicted_constraint == "l1");
    REQUIRE(verdict.forced_zero.size() == 2);
    CHECK(verdict.forced_zero[0] == "x1+");
    CHECK(verdict.forced_zero[1] == "y1+");
    REQUIRE(verdict.deductions.size() == 2);
    CHECK(verdict.deductions[0].zero_constraint == "l2");
    CHECK(verdict.deductions[0].support == std::vector<std::string>{"l8"});
    CHECK(verdict.deductions[1].zero_constraint == "l3");
    CHECK(verdict.deductions[1].support == std::vector<std::string>{"l6"});
    CHECK(chain_rederives(system, verdict));
}

TEST_CASE("systems without zero-constraints are feasible") {
    LhvSystem system;
    system.variables = {"x1+", "x2+"};
    system.nonzero_constraints.push_back({"m1", {{{"x1+"}}, {{"x2+"}}}});
    auto verdict = check_feasibility(system);
    CHECK(verdict.feasible());
    CHECK(witness_satisfies(system, verdict.witness));
}

TEST_CASE("a single bilinear zero-constraint leaves room for a witness") {
    LhvSystem system;
    system.variables = {"x1+", "x2+", "y1+", "y2+"};
    system.zero_constraints.push_back({"z1", {{{"x1+", "y1+"}}}});
    system.nonzero_constraints.push_back({"n1", {{{"x1+"}}, {{"x2+"}}}});
    system.nonzero_constraints.push_back({"n2", {{{"y1+"}}, {{"y2+"}}}});
    auto verdict = check_feasibility(system);
    REQUIRE(verdict.feasible());
    CHECK(witness_satisfies(system, verdict.witness));
    // One of the two crossing weights must vanish in any witness.
    CHECK(verdict.witness.at("x1+") * verdict.witness.at("y1+") == 0.0);
}

TEST_CASE("empty tables build an empty, trivially feasible system") {
    std::array<DetectionTable, 4> empty{};
    auto system = build_lhv_system(empty, 6, 6);
    CHECK(system.zero_constraints.empty());
    CHECK(system.nonzero_constraints.empty());
    auto verdict = check_feasibility(system);
    CHECK(verdict.feasible());
}

TEST_CASE("a separable interferometer yields no zero-constraints") {
    // Single balanced splitter per particle, no annihilation: every joint
    // outcome stays populated.
    Circuit circuit(2, 2);
    circuit.initial.set_amplitude(0, 0, {1.0, 0.0});
    TimeStep step;
    const double h = 1.0 / std::sqrt(2.0);
    step.map_a.rules[0] = {{0, h}, {1, Complex{0.0, h}}};
    step.map_a.rules[1] = {{0, Complex{0.0, h}}, {1, h}};
    step.map_b = step.map_a;
    circuit.steps = {step};
    circuit.postselections = {{"p00", 0, 0}, {"p01", 0, 1}, {"p10", 1, 0}, {"p11", 1, 1}};
    circuit.validate();

    auto table = detection_from_final_state(evolve(circuit).back(), circuit.postselections, "sep");
    for (const auto& [pair, p] : table.joint) {
        CHECK(p > 1e-9);
    }
    std::array<DetectionTable, 4> tables{table, table, table, table};
    auto system = build_lhv_system(tables, 0, 0);
    CHECK(system.zero_constraints.empty());
    CHECK(check_feasibility(system).feasible());
}

TEST_CASE("large unconstrained systems are feasible, capped searches undetermined") {
    LhvSystem big;
    for (int i = 0; i < 24; ++i) {
        big.variables.push_back("v" + std::to_string(i));
    }
    CHECK(check_feasibility(big).feasible());

    // All-ones fails, propagation has no handle, and the search is capped.
    big.zero_constraints.push_back({"z1", {{{"v0", "v1"}}}});
    auto verdict = check_feasibility(big);
    CHECK(verdict.status == FeasibilityVerdict::Status::undetermined);
}

TEST_CASE("no-signalling holds for Hardy and breaks under perturbation") {
    auto tables = hardy_tables();
    CHECK(no_signalling_check(tables));

    auto perturbed = tables;
    perturbed[1].unconditional_a[5] += 1e-3;
    CHECK_FALSE(no_signalling_check(perturbed));

    std::array<DetectionTable, 4> identical{tables[0], tables[0], tables[0], tables[0]};
    CHECK(no_signalling_check(identical));
}
