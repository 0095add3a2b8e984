#pragma once

#include "histent/hardy.hpp"
#include "histent/nonlocality.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace histent {

using Json = nlohmann::ordered_json;

// Report for `run`: a scenario evolved and analyzed per postselection.
struct ScenarioRunReport {
    std::string source;
    int mode_count_a = 0;
    int mode_count_b = 0;
    std::vector<PostselectionAnalysis> posts;
    DetectionTable detection;
};

struct NonlocalityReport {
    std::array<DetectionTable, 4> cases;
    LhvSystem system;
    FeasibilityVerdict verdict;
    bool no_signalling = false;
};

Json to_json(const PropagatorMatrix& matrix);
Json to_json(const WeakValueMatrix& wvm);
Json to_json(const EntanglementReport& rep);
Json to_json(const DetectionTable& table);
Json to_json(const PostselectionAnalysis& block);
Json to_json(const hardy::HardyReport& rep);
Json to_json(const ScenarioRunReport& rep);
Json to_json(const FeasibilityVerdict& verdict);
Json to_json(const NonlocalityReport& rep);

// Human-readable rendering: 6 significant digits, annotated with the exact
// small fraction when one matches within 1e-10 (e.g. "0.5625 (9/16)").
std::string render_table(const hardy::HardyReport& rep);
std::string render_table(const ScenarioRunReport& rep);
std::string render_table(const NonlocalityReport& rep);

// Helper shared by the table renderers; exposed for tests.
std::optional<std::pair<long, long>> as_small_fraction(double value, long max_den = 64,
                                                       double tol = 1e-10);
std::string format_value(double value);

} // namespace histent
