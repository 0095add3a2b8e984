#include "histent/circuit.hpp"

#include "histent/hardy.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace histent;
using namespace histent::testing;

namespace {

const Complex I{0.0, 1.0};

bool close(Complex lhs, Complex rhs, double tol = 1e-10) {
    return std::abs(lhs - rhs) <= tol;
}

} // namespace

TEST_CASE("identity step leaves states unchanged") {
    TimeStep step;
    step.map_a = ModeMap::identity({0, 1, 2});
    step.map_b = ModeMap::identity({0, 1, 2});
    auto s = random_state(3, 3, 4);
    auto out = apply_step(s, step);
    CHECK(out.amplitudes() == s.amplitudes());
}

TEST_CASE("first Hardy step produces Psi1 with the annihilated pair removed") {
    auto circuit = hardy::build({true, true});
    auto psi1 = apply_step(circuit.initial, circuit.steps[0]);
    CHECK(psi1.support_size() == 3);
    CHECK(close(psi1.amplitude(1, 1), {0.5, 0.0}));
    CHECK(close(psi1.amplitude(1, 2), 0.5 * I));
    CHECK(close(psi1.amplitude(2, 1), 0.5 * I));
    CHECK(psi1.amplitude(2, 2) == Complex{0.0, 0.0});
}

TEST_CASE("mirror step maps Psi1 to Psi2 with the expected global sign") {
    auto circuit = hardy::build({true, true});
    auto psi1 = apply_step(circuit.initial, circuit.steps[0]);
    auto psi2 = apply_step(psi1, circuit.steps[1]);
    CHECK(psi2.support_size() == 3);
    CHECK(close(psi2.amplitude(3, 3), {-0.5, 0.0}));
    CHECK(close(psi2.amplitude(3, 4), -0.5 * I));
    CHECK(close(psi2.amplitude(4, 3), -0.5 * I));
}

TEST_CASE("full Hardy evolution reaches the detector state") {
    auto states = evolve(hardy::build({true, true}));
    REQUIRE(states.size() == 4);
    const auto& last = states.back();
    CHECK(close(last.amplitude(5, 5), {0.75, 0.0}));
    CHECK(close(last.amplitude(6, 5), -0.25 * I));
    CHECK(close(last.amplitude(5, 6), -0.25 * I));
    CHECK(close(last.amplitude(6, 6), {0.25, 0.0}));
    CHECK(squared_norm(last) == doctest::Approx(0.75).epsilon(1e-10));
}

TEST_CASE("removing both final beamsplitters gives the crossed detector state") {
    auto last = evolve(hardy::build({false, false})).back();
    CHECK(close(last.amplitude(6, 6), {-0.5, 0.0}));
    CHECK(close(last.amplitude(6, 5), -0.5 * I));
    CHECK(close(last.amplitude(5, 6), -0.5 * I));
    CHECK(last.amplitude(5, 5) == Complex{0.0, 0.0});
}

TEST_CASE("zero-step circuit evolves to its initial state only") {
    Circuit circuit(2, 2);
    circuit.initial.set_amplitude(0, 0, {1.0, 0.0});
    auto states = evolve(circuit);
    REQUIRE(states.size() == 1);
    CHECK(states[0].amplitude(0, 0) == Complex{1.0, 0.0});
}

TEST_CASE("occupied mode without a rule raises a missing-rule error") {
    TimeStep step;
    step.map_a = ModeMap::identity({0});
    step.map_b = ModeMap::identity({0});
    auto s = TwoParticleState::basis_state(2, 2, 1, 0);
    CHECK_THROWS_AS((void)apply_step(s, step), MissingRuleError);
}

TEST_CASE("non-isometric map fails validation") {
    ModeMap map;
    map.rules[0] = {{1, Complex{0.9, 0.0}}};
    CHECK_THROWS_AS(validate_isometry(map, 3), ScenarioError);

    // Unit columns that are not orthogonal fail too.
    ModeMap overlap;
    overlap.rules[0] = {{2, Complex{1.0, 0.0}}};
    overlap.rules[1] = {{2, Complex{1.0, 0.0}}};
    CHECK_THROWS_AS(validate_isometry(overlap, 3), ScenarioError);
}

TEST_CASE("circuit validation catches bad annihilate pairs") {
    auto circuit = hardy::build({true, true});
    circuit.steps[0].annihilate.insert({99, 0});
    CHECK_THROWS_AS(circuit.validate(), ScenarioError);
}

TEST_CASE("circuit validation requires a normalized initial state") {
    Circuit circuit(2, 2);
    circuit.initial.set_amplitude(0, 0, {0.5, 0.0});
    CHECK_THROWS_AS(circuit.validate(), ScenarioError);
}

TEST_CASE("annihilation-free circuits conserve the squared norm") {
    for (int trial = 0; trial < 50; ++trial) {
        auto circuit = random_unitary_circuit(2, 1 + trial % 4);
        for (const auto& state : evolve(circuit)) {
            CHECK(squared_norm(state) == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("apply_step is linear") {
    TimeStep step;
    step.map_a = mode_map_from_unitary(random_unitary(3), {0, 1, 2});
    step.map_b = mode_map_from_unitary(random_unitary(3), {0, 1, 2});
    for (int trial = 0; trial < 20; ++trial) {
        auto x = random_state(3, 3, 4);
        auto y = random_state(3, 3, 4);
        Complex alpha = random_complex();
        Complex beta = random_complex();

        TwoParticleState combo(3, 3);
        for (const auto& [pair, amp] : x.amplitudes()) {
            combo.add_amplitude(pair.first, pair.second, alpha * amp);
        }
        for (const auto& [pair, amp] : y.amplitudes()) {
            combo.add_amplitude(pair.first, pair.second, beta * amp);
        }

        auto lhs = apply_step(combo, step);
        auto fx = apply_step(x, step);
        auto fy = apply_step(y, step);
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                Complex rhs = alpha * fx.amplitude(a, b) + beta * fy.amplitude(a, b);
                CHECK(std::abs(lhs.amplitude(a, b) - rhs) < 1e-9);
            }
        }
    }
}

TEST_CASE("total Hardy detection probability is 3/4 for every setting") {
    for (bool keep_a : {true, false}) {
        for (bool keep_b : {true, false}) {
            auto last = evolve(hardy::build({keep_a, keep_b})).back();
            CHECK(squared_norm(last) == doctest::Approx(0.75).epsilon(1e-10));
        }
    }
}
