#include "histent/circuit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace histent {

Complex ModeMap::coefficient(int source, int target) const {
    auto it = rules.find(source);
    if (it == rules.end()) {
        return {0.0, 0.0};
    }
    for (const auto& [to, coef] : it->second) {
        if (to == target) {
            return coef;
        }
    }
    return {0.0, 0.0};
}

ModeMap ModeMap::identity(const std::vector<int>& modes) {
    ModeMap map;
    for (int m : modes) {
        map.rules[m] = {{m, Complex{1.0, 0.0}}};
    }
    return map;
}

void validate_isometry(const ModeMap& map, int mode_count, double tol, const std::string& context) {
    if (map.rules.empty()) {
        return;
    }
    std::vector<int> sources;
    sources.reserve(map.rules.size());
    for (const auto& [src, targets] : map.rules) {
        if (src < 0 || src >= mode_count) {
            throw ScenarioError(context, "source mode " + std::to_string(src) + " out of range");
        }
        for (const auto& [to, coef] : targets) {
            if (to < 0 || to >= mode_count) {
                throw ScenarioError(context, "target mode " + std::to_string(to) + " out of range");
            }
            (void)coef;
        }
        sources.push_back(src);
    }

    // Columns of the coefficient matrix, one per source mode.
    Eigen::MatrixXcd cols = Eigen::MatrixXcd::Zero(mode_count, static_cast<int>(sources.size()));
    for (int c = 0; c < static_cast<int>(sources.size()); ++c) {
        for (const auto& [to, coef] : map.rules.at(sources[c])) {
            cols(to, c) += coef;
        }
    }
    Eigen::MatrixXcd gram = cols.adjoint() * cols;
    for (int i = 0; i < gram.rows(); ++i) {
        for (int j = 0; j < gram.cols(); ++j) {
            double expected = (i == j) ? 1.0 : 0.0;
            if (std::abs(gram(i, j) - Complex{expected, 0.0}) > tol) {
                throw ScenarioError(context, "mode map is not an isometry: columns for sources " +
                                                 std::to_string(sources[i]) + " and " +
                                                 std::to_string(sources[j]) +
                                                 " fail orthonormality");
            }
        }
    }
}

int Circuit::local_dimension() const {
    return intermediate_bases.empty() ? 0
                                      : static_cast<int>(intermediate_bases.front().modes_a.size());
}

const Postselection* Circuit::find_postselection(const std::string& name) const {
    for (const auto& post : postselections) {
        if (post.name == name) {
            return &post;
        }
    }
    return nullptr;
}

const Postselection* Circuit::find_postselection(std::pair<int, int> pair) const {
    for (const auto& post : postselections) {
        if (post.pair() == pair) {
            return &post;
        }
    }
    return nullptr;
}

void Circuit::validate() const {
    if (mode_count_a <= 0 || mode_count_b <= 0) {
        throw ScenarioError("modeCount", "mode counts must be positive");
    }
    if (std::abs(squared_norm(initial) - 1.0) > 1e-10) {
        throw ScenarioError("initial", "initial state must have unit squared norm");
    }
    if (!steps.empty() && intermediate_bases.size() != steps.size() - 1) {
        throw ScenarioError("intermediateBases",
                            "expected " + std::to_string(steps.size() - 1) + " layers, got " +
                                std::to_string(intermediate_bases.size()));
    }
    if (steps.empty() && !intermediate_bases.empty()) {
        throw ScenarioError("intermediateBases", "layers declared for a circuit with no steps");
    }

    for (std::size_t s = 0; s < steps.size(); ++s) {
        const std::string at = "steps[" + std::to_string(s) + "]";
        validate_isometry(steps[s].map_a, mode_count_a, 1e-10, at + ".mapA");
        validate_isometry(steps[s].map_b, mode_count_b, 1e-10, at + ".mapB");
        for (const auto& [a, b] : steps[s].annihilate) {
            if (a < 0 || a >= mode_count_a || b < 0 || b >= mode_count_b) {
                throw ScenarioError(at + ".annihilate", "pair (" + std::to_string(a) + "," +
                                                            std::to_string(b) + ") out of range");
            }
        }
    }

    int n = local_dimension();
    for (std::size_t l = 0; l < intermediate_bases.size(); ++l) {
        const auto& layer = intermediate_bases[l];
        const std::string at = "intermediateBases[" + std::to_string(l) + "]";
        if (layer.modes_a.empty() || layer.modes_a.size() != layer.modes_b.size()) {
            throw ScenarioError(at, "A-side and B-side lists must be nonempty and equally long");
        }
        if (static_cast<int>(layer.modes_a.size()) != n) {
            throw ScenarioError(at, "all layers must share the same local dimension");
        }
        for (int m : layer.modes_a) {
            if (m < 0 || m >= mode_count_a) {
                throw ScenarioError(at + ".a", "mode " + std::to_string(m) + " out of range");
            }
        }
        for (int m : layer.modes_b) {
            if (m < 0 || m >= mode_count_b) {
                throw ScenarioError(at + ".b", "mode " + std::to_string(m) + " out of range");
            }
        }
    }

    for (std::size_t p = 0; p < postselections.size(); ++p) {
        const auto& post = postselections[p];
        const std::string at = "postselections[" + std::to_string(p) + "]";
        if (post.a < 0 || post.a >= mode_count_a || post.b < 0 || post.b >= mode_count_b) {
            throw ScenarioError(at, "pair (" + std::to_string(post.a) + "," +
                                        std::to_string(post.b) + ") out of range");
        }
    }
}

TwoParticleState apply_step(const TwoParticleState& state, const TimeStep& step) {
    // Accumulate into a plain map first so pruning happens once at the end,
    // after cancellations.
    std::map<std::pair<int, int>, Complex> acc;
    for (const auto& [pair, amp] : state.amplitudes()) {
        auto ita = step.map_a.rules.find(pair.first);
        if (ita == step.map_a.rules.end()) {
            throw MissingRuleError("no mapA rule for occupied source mode " +
                                   std::to_string(pair.first));
        }
        auto itb = step.map_b.rules.find(pair.second);
        if (itb == step.map_b.rules.end()) {
            throw MissingRuleError("no mapB rule for occupied source mode " +
                                   std::to_string(pair.second));
        }
        for (const auto& [ta, ca] : ita->second) {
            for (const auto& [tb, cb] : itb->second) {
                acc[{ta, tb}] += amp * ca * cb;
            }
        }
    }
    for (const auto& pair : step.annihilate) {
        acc.erase(pair);
    }

    TwoParticleState out(state.mode_count_a(), state.mode_count_b(), state.zero_threshold());
    for (const auto& [pair, amp] : acc) {
        out.set_amplitude(pair.first, pair.second, amp);
    }
    return out;
}

std::vector<TwoParticleState> evolve(const Circuit& circuit) {
    std::vector<TwoParticleState> states;
    states.reserve(circuit.steps.size() + 1);
    states.push_back(circuit.initial);
    for (const auto& step : circuit.steps) {
        states.push_back(apply_step(states.back(), step));
    }
    return states;
}

} // namespace histent
