#include "histent/hardy.hpp"

#include <cmath>

namespace histent {

std::vector<PostselectionAnalysis> analyze_postselections(const Circuit& circuit,
                                                          double rank_tol) {
    std::vector<PostselectionAnalysis> blocks;
    blocks.reserve(circuit.postselections.size());
    for (const auto& post : circuit.postselections) {
        PostselectionAnalysis block;
        block.post = post;
        block.propagator = propagator_matrix(circuit, post.pair());
        block.zero_propagator = block.propagator.entries.squaredNorm() <= 1e-14;
        if (!block.zero_propagator) {
            block.entanglement = report(block.propagator, rank_tol);
            if (std::abs(block.propagator.entries.sum()) > 1e-12) {
                block.weak_values = weak_value_matrix(block.propagator);
            }
        }
        blocks.push_back(std::move(block));
    }
    return blocks;
}

namespace hardy {

namespace {

constexpr Complex I{0.0, 1.0};

ModeMap balanced_splitter(int source, int t1, int t2) {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    ModeMap map;
    map.rules[source] = {{t1, inv_sqrt2}, {t2, I * inv_sqrt2}};
    return map;
}

// Final splitter with the asymmetric port phases: arm 3 feeds i a5 + a6,
// arm 4 feeds a5 + i a6 (scaled by 1/sqrt 2).
ModeMap final_splitter() {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    ModeMap map;
    map.rules[3] = {{5, I * inv_sqrt2}, {6, inv_sqrt2}};
    map.rules[4] = {{5, inv_sqrt2}, {6, I * inv_sqrt2}};
    return map;
}

// Removed splitter: the arm modes are relabeled straight onto the detectors
// (arm 3 crosses to detector 6, arm 4 to detector 5).
ModeMap removed_splitter() {
    ModeMap map;
    map.rules[3] = {{6, Complex{1.0, 0.0}}};
    map.rules[4] = {{5, Complex{1.0, 0.0}}};
    return map;
}

ModeMap mirrors() {
    ModeMap map;
    map.rules[1] = {{3, I}};
    map.rules[2] = {{4, I}};
    return map;
}

} // namespace

Circuit build(const HardyConfig& config) {
    Circuit circuit(7, 7);
    circuit.initial.set_amplitude(0, 0, Complex{1.0, 0.0});

    TimeStep entry_step;
    entry_step.map_a = balanced_splitter(0, 1, 2);
    entry_step.map_b = balanced_splitter(0, 1, 2);
    entry_step.annihilate = {{2, 2}};
    circuit.steps.push_back(std::move(entry_step));

    TimeStep mirror_step;
    mirror_step.map_a = mirrors();
    mirror_step.map_b = mirrors();
    mirror_step.annihilate = {{4, 4}};
    circuit.steps.push_back(std::move(mirror_step));

    TimeStep final_step;
    final_step.map_a = config.keep_a ? final_splitter() : removed_splitter();
    final_step.map_b = config.keep_b ? final_splitter() : removed_splitter();
    circuit.steps.push_back(std::move(final_step));

    circuit.intermediate_bases = {{{1, 2}, {1, 2}}, {{3, 4}, {3, 4}}};
    circuit.postselections = {
        {"a5b5", 5, 5}, {"a5b6", 5, 6}, {"a6b5", 6, 5}, {"a6b6", 6, 6}};

    circuit.validate();
    return circuit;
}

HardyReport full_report(const HardyConfig& config, double rank_tol) {
    Circuit circuit = build(config);

    HardyReport rep;
    rep.config = config;
    rep.posts = analyze_postselections(circuit, rank_tol);
    rep.combined = combined_matrix(circuit, circuit.postselections);
    if (rep.combined.entries.squaredNorm() > 1e-14) {
        rep.combined_entanglement = report(rep.combined, rank_tol);
    }
    rep.detection = detection_from_final_state(
        evolve(circuit).back(), circuit.postselections,
        std::string("A") + (config.keep_a ? "+" : "-") + "B" + (config.keep_b ? "+" : "-"));
    return rep;
}

} // namespace hardy

} // namespace histent
