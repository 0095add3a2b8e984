#pragma once

#include "histent/circuit.hpp"
#include "histent/entanglement.hpp"
#include "histent/histories.hpp"
#include "histent/nonlocality.hpp"
#include "histent/weakvalues.hpp"

#include <optional>
#include <vector>

namespace histent {

// One postselection analyzed end to end. Entanglement and weak values are
// absent when the propagator matrix is identically zero or the propagator
// sum vanishes.
struct PostselectionAnalysis {
    Postselection post;
    PropagatorMatrix propagator;
    bool zero_propagator = false;
    std::optional<EntanglementReport> entanglement;
    std::optional<WeakValueMatrix> weak_values;
};

std::vector<PostselectionAnalysis> analyze_postselections(
    const Circuit& circuit, double rank_tol = default_rank_tolerance);

namespace hardy {

struct HardyConfig {
    bool keep_a = true;
    bool keep_b = true;
};

// Three-step overlapping Mach-Zehnder circuit: initial beamsplitters with
// (a2,b2) annihilation, phase-i mirrors with (a4,b4) annihilation, final
// beamsplitters (or the removal substitutions a3->a6, a4->a5 etc.).
Circuit build(const HardyConfig& config);

struct HardyReport {
    HardyConfig config;
    std::vector<PostselectionAnalysis> posts;
    PropagatorMatrix combined;
    std::optional<EntanglementReport> combined_entanglement;
    DetectionTable detection;
};

HardyReport full_report(const HardyConfig& config,
                        double rank_tol = default_rank_tolerance);

} // namespace hardy

} // namespace histent
