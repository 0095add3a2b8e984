// Command-line front end: reproduce the built-in Hardy scenario, analyze a
// user scenario file, or run the local-hidden-variable feasibility check.

#include "histent/hardy.hpp"
#include "histent/report.hpp"
#include "histent/scenario.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_io = 1;
constexpr int exit_usage = 2;
constexpr int exit_degenerate = 3;

int resolve_rank_tolerance(double& tol) {
    tol = histent::default_rank_tolerance;
    const char* env = std::getenv("HISTENT_TOLERANCE");
    if (env == nullptr || *env == '\0') {
        return exit_ok;
    }
    char* end = nullptr;
    double parsed = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(parsed > 0.0)) {
        std::cerr << "histent: HISTENT_TOLERANCE must be a positive number, got '" << env
                  << "'\n";
        return exit_usage;
    }
    tol = parsed;
    return exit_ok;
}

void emit(const std::string& table, const histent::Json& json, const std::string& format) {
    if (format == "json") {
        std::cout << json.dump(2) << "\n";
    } else {
        std::cout << table;
    }
}

int run_hardy(bool keep_a, bool keep_b, const std::string& format, double tol) {
    histent::hardy::HardyConfig config{keep_a, keep_b};
    histent::hardy::HardyReport rep = histent::hardy::full_report(config, tol);
    emit(histent::render_table(rep), histent::to_json(rep), format);
    return exit_ok;
}

int run_scenario(const std::string& path, const std::string& post_name,
                 const std::string& format, double tol) {
    histent::Circuit circuit = histent::load_circuit_file(path);

    histent::ScenarioRunReport rep;
    rep.source = path;
    rep.mode_count_a = circuit.mode_count_a;
    rep.mode_count_b = circuit.mode_count_b;
    rep.posts = histent::analyze_postselections(circuit, tol);
    rep.detection = histent::detection_from_final_state(histent::evolve(circuit).back(),
                                                        circuit.postselections, "final");

    if (!post_name.empty()) {
        auto it = std::find_if(rep.posts.begin(), rep.posts.end(),
                               [&](const auto& block) { return block.post.name == post_name; });
        if (it == rep.posts.end()) {
            std::cerr << "histent: unknown postselection '" << post_name << "'\n";
            return exit_usage;
        }
        histent::PostselectionAnalysis selected = *it;
        rep.posts = {selected};
        if (selected.zero_propagator) {
            emit(histent::render_table(rep), histent::to_json(rep), format);
            std::cerr << "histent: postselection '" << post_name
                      << "' has an identically zero propagator matrix\n";
            return exit_degenerate;
        }
    }
    emit(histent::render_table(rep), histent::to_json(rep), format);
    return exit_ok;
}

int run_nonlocality(const std::string& format) {
    histent::NonlocalityReport rep;
    rep.cases = {histent::detection_table(true, true), histent::detection_table(true, false),
                 histent::detection_table(false, true), histent::detection_table(false, false)};
    rep.system = histent::build_lhv_system(rep.cases, 6, 6);
    rep.verdict = histent::check_feasibility(rep.system);
    rep.no_signalling = histent::no_signalling_check(rep.cases);
    emit(histent::render_table(rep), histent::to_json(rep), format);
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entanglement measures for bipartite quantum histories"};
    app.require_subcommand(1);

    bool keep_a = true;
    bool keep_b = true;
    std::string hardy_format = "table";
    CLI::App* hardy = app.add_subcommand("hardy", "Analyze the built-in Hardy interferometer");
    hardy->add_flag("--keep-a,!--no-keep-a", keep_a, "keep/remove the final beamsplitter for A");
    hardy->add_flag("--keep-b,!--no-keep-b", keep_b, "keep/remove the final beamsplitter for B");
    hardy->add_option("--format", hardy_format, "output format")
        ->check(CLI::IsMember({"table", "json"}));

    std::string scenario_path;
    std::string post_name;
    std::string run_format = "table";
    CLI::App* run = app.add_subcommand("run", "Analyze a scenario file");
    run->add_option("scenario", scenario_path, "path to a scenario document")->required();
    run->add_option("--post", post_name, "restrict the report to one named postselection");
    run->add_option("--format", run_format, "output format")
        ->check(CLI::IsMember({"table", "json"}));

    std::string nl_format = "table";
    CLI::App* nonlocality =
        app.add_subcommand("nonlocality", "Local-hidden-variable feasibility for Hardy's setup");
    nonlocality->add_option("--format", nl_format, "output format")
        ->check(CLI::IsMember({"table", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    double tol = histent::default_rank_tolerance;
    if (int code = resolve_rank_tolerance(tol); code != exit_ok) {
        return code;
    }

    try {
        if (hardy->parsed()) {
            return run_hardy(keep_a, keep_b, hardy_format, tol);
        }
        if (run->parsed()) {
            return run_scenario(scenario_path, post_name, run_format, tol);
        }
        if (nonlocality->parsed()) {
            return run_nonlocality(nl_format);
        }
    } catch (const histent::ScenarioError& err) {
        std::cerr << "histent: scenario error: " << err.what() << "\n";
        return exit_io;
    } catch (const histent::ZeroPropagatorError& err) {
        std::cerr << "histent: " << err.what() << "\n";
        return exit_degenerate;
    } catch (const histent::Error& err) {
        std::cerr << "histent: " << err.what() << "\n";
        return exit_io;
    }
    return exit_usage;
}
