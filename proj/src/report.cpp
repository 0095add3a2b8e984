#include "histent/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace histent {

namespace {

Json complex_json(Complex value) {
    return Json{{"re", value.real()}, {"im", value.imag()}};
}

Json entries_json(const Eigen::MatrixXcd& entries) {
    Json rows = Json::array();
    for (int r = 0; r < entries.rows(); ++r) {
        Json row = Json::array();
        for (int c = 0; c < entries.cols(); ++c) {
            row.push_back(complex_json(entries(r, c)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Json labels_json(const std::vector<LocalHistory>& histories) {
    Json out = Json::array();
    for (const auto& hist : histories) {
        out.push_back(hist.label);
    }
    return out;
}

std::string status_string(FeasibilityVerdict::Status status) {
    switch (status) {
    case FeasibilityVerdict::Status::feasible:
        return "feasible";
    case FeasibilityVerdict::Status::infeasible:
        return "infeasible";
    default:
        return "undetermined";
    }
}

} // namespace

std::optional<std::pair<long, long>> as_small_fraction(double value, long max_den, double tol) {
    for (long den = 1; den <= max_den; ++den) {
        double scaled = value * static_cast<double>(den);
        double rounded = std::round(scaled);
        if (std::abs(scaled - rounded) <= tol * static_cast<double>(den) &&
            std::abs(rounded) < 1e15) {
            return std::make_pair(static_cast<long>(rounded), den);
        }
    }
    return std::nullopt;
}

std::string format_value(double value) {
    std::ostringstream out;
    out.precision(6);
    out << value;
    if (auto frac = as_small_fraction(value); frac && frac->second > 1) {
        out << " (" << frac->first << "/" << frac->second << ")";
    }
    return out.str();
}

namespace {

std::string format_complex(Complex value) {
    std::ostringstream out;
    out.precision(6);
    out << value.real();
    out << (value.imag() < 0 ? " - " : " + ") << std::abs(value.imag()) << "i";
    return out.str();
}

} // namespace

Json to_json(const PropagatorMatrix& matrix) {
    Json out;
    out["rows"] = labels_json(matrix.row_histories);
    out["cols"] = labels_json(matrix.col_histories);
    out["entries"] = entries_json(matrix.entries);
    out["sum"] = complex_json(matrix.entries.sum());
    out["gramTrace"] = matrix.entries.squaredNorm();
    return out;
}

Json to_json(const WeakValueMatrix& wvm) {
    Json out;
    out["entries"] = entries_json(wvm.entries);
    out["denominator"] = complex_json(wvm.denominator);
    return out;
}

Json to_json(const EntanglementReport& rep) {
    Json out;
    Json lambdas = Json::array();
    Json squared = Json::array();
    for (double lambda : rep.spectrum.lambdas) {
        lambdas.push_back(lambda);
        squared.push_back(lambda * lambda);
    }
    out["schmidtCoefficients"] = std::move(lambdas);
    out["squaredSchmidtCoefficients"] = std::move(squared);
    out["rank"] = rep.rank;
    out["rankTolerance"] = rep.spectrum.tolerance;
    out["concurrence"] = rep.concurrence;
    out["entropy"] = rep.entropy;
    out["robustness"] = rep.robustness;
    out["entangled"] = rep.entangled;
    out["gramTrace"] = rep.gram_trace;
    return out;
}

Json to_json(const DetectionTable& table) {
    Json out;
    out["label"] = table.label;
    Json joint = Json::array();
    for (const auto& [pair, p] : table.joint) {
        joint.push_back({{"a", pair.first}, {"b", pair.second}, {"p", p}});
    }
    out["joint"] = std::move(joint);
    Json ua = Json::array();
    for (const auto& [mode, p] : table.unconditional_a) {
        ua.push_back({{"mode", mode}, {"p", p}});
    }
    out["unconditionalA"] = std::move(ua);
    Json ub = Json::array();
    for (const auto& [mode, p] : table.unconditional_b) {
        ub.push_back({{"mode", mode}, {"p", p}});
    }
    out["unconditionalB"] = std::move(ub);
    return out;
}

Json to_json(const PostselectionAnalysis& block) {
    Json out;
    out["name"] = block.post.name;
    out["a"] = block.post.a;
    out["b"] = block.post.b;
    out["zeroPropagator"] = block.zero_propagator;
    out["propagator"] = to_json(block.propagator);
    out["weakValues"] = block.weak_values ? to_json(*block.weak_values) : Json(nullptr);
    out["entanglement"] = block.entanglement ? to_json(*block.entanglement) : Json(nullptr);
    return out;
}

Json to_json(const hardy::HardyReport& rep) {
    Json out;
    out["scenario"] = {{"name", "hardy"},
                       {"keepA", rep.config.keep_a},
                       {"keepB", rep.config.keep_b}};
    Json posts = Json::array();
    for (const auto& block : rep.posts) {
        posts.push_back(to_json(block));
    }
    out["postselections"] = std::move(posts);
    Json combined;
    combined["propagator"] = to_json(rep.combined);
    combined["entanglement"] =
        rep.combined_entanglement ? to_json(*rep.combined_entanglement) : Json(nullptr);
    out["combined"] = std::move(combined);
    out["detection"] = to_json(rep.detection);
    return out;
}

Json to_json(const ScenarioRunReport& rep) {
    Json out;
    out["scenario"] = {{"name", rep.source},
                       {"modeCountA", rep.mode_count_a},
                       {"modeCountB", rep.mode_count_b}};
    Json posts = Json::array();
    for (const auto& block : rep.posts) {
        posts.push_back(to_json(block));
    }
    out["postselections"] = std::move(posts);
    out["detection"] = to_json(rep.detection);
    return out;
}

Json to_json(const FeasibilityVerdict& verdict) {
    Json out;
    out["status"] = status_string(verdict.status);
    out["feasible"] = verdict.feasible();
    out["forcedZero"] = verdict.forced_zero;
    Json chain = Json::array();
    for (const auto& d : verdict.deductions) {
        chain.push_back({{"variable", d.variable},
                         {"zeroConstraint", d.zero_constraint},
                         {"support", d.support}});
    }
    out["deductions"] = std::move(chain);
    if (verdict.status == FeasibilityVerdict::Status::infeasible) {
        out["contradictedConstraint"] = verdict.contradicted_constraint;
    }
    if (verdict.status == FeasibilityVerdict::Status::feasible) {
        Json witness;
        for (const auto& [var, value] : verdict.witness) {
            witness[var] = value;
        }
        out["witness"] = std::move(witness);
    }
    return out;
}

Json to_json(const NonlocalityReport& rep) {
    Json out;
    Json cases = Json::array();
    for (const auto& table : rep.cases) {
        cases.push_back(to_json(table));
    }
    out["cases"] = std::move(cases);

    auto constraints_json = [](const std::vector<LhvConstraint>& list, const char* relation) {
        Json arr = Json::array();
        for (const auto& c : list) {
            Json terms = Json::array();
            for (const auto& t : c.terms) {
                terms.push_back(t.factors);
            }
            arr.push_back({{"id", c.id}, {"relation", relation}, {"terms", std::move(terms)}});
        }
        return arr;
    };
    Json system;
    system["variables"] = rep.system.variables;
    Json constraints = constraints_json(rep.system.zero_constraints, "= 0");
    for (auto& c : constraints_json(rep.system.nonzero_constraints, "> 0")) {
        constraints.push_back(std::move(c));
    }
    system["constraints"] = std::move(constraints);
    out["lhvSystem"] = std::move(system);
    out["verdict"] = to_json(rep.verdict);
    out["noSignalling"] = rep.no_signalling;
    return out;
}

namespace {

void render_matrix(std::ostream& out, const Eigen::MatrixXcd& entries,
                   const std::vector<LocalHistory>& rows,
                   const std::vector<LocalHistory>& cols, const std::string& indent) {
    out << indent << "cols:";
    for (const auto& hist : cols) {
        out << " " << hist.label;
    }
    out << "\n";
    for (int r = 0; r < entries.rows(); ++r) {
        out << indent << rows[r].label << ":";
        for (int c = 0; c < entries.cols(); ++c) {
            out << "  " << format_complex(entries(r, c));
        }
        out << "\n";
    }
}

void render_entanglement(std::ostream& out, const EntanglementReport& rep,
                         const std::string& indent) {
    out << indent << "squared Schmidt coefficients:";
    for (double lambda : rep.spectrum.lambdas) {
        out << " " << format_value(lambda * lambda);
    }
    out << "\n";
    out << indent << "Schmidt rank: " << rep.rank << (rep.entangled ? " (entangled)" : " (separable)")
        << "\n";
    out << indent << "concurrence: " << format_value(rep.concurrence) << "\n";
    out << indent << "entropy: " << format_value(rep.entropy) << " nats\n";
    out << indent << "robustness: " << format_value(rep.robustness) << "\n";
}

void render_detection(std::ostream& out, const DetectionTable& table, const std::string& indent) {
    out << indent << "joint detection probabilities [" << table.label << "]:\n";
    for (const auto& [pair, p] : table.joint) {
        out << indent << "  (a" << pair.first << ", b" << pair.second << "): " << format_value(p)
            << "\n";
    }
    out << indent << "unconditional A:";
    for (const auto& [mode, p] : table.unconditional_a) {
        out << " P(a" << mode << ")=" << format_value(p);
    }
    out << "\n" << indent << "unconditional B:";
    for (const auto& [mode, p] : table.unconditional_b) {
        out << " P(b" << mode << ")=" << format_value(p);
    }
    out << "\n";
}

void render_block(std::ostream& out, const PostselectionAnalysis& block) {
    out << "postselection " << block.post.name << " (a" << block.post.a << ", b" << block.post.b
        << ")\n";
    if (block.zero_propagator) {
        out << "  propagator matrix is identically zero (impossible postselection)\n";
        return;
    }
    out << "  propagator matrix (rows A histories, cols B histories):\n";
    render_matrix(out, block.propagator.entries, block.propagator.row_histories,
                  block.propagator.col_histories, "    ");
    if (block.weak_values) {
        out << "  weak value matrix (denominator " << format_complex(block.weak_values->denominator)
            << "):\n";
        render_matrix(out, block.weak_values->entries, block.weak_values->row_histories,
                      block.weak_values->col_histories, "    ");
    } else {
        out << "  weak values undefined (propagator sum vanishes)\n";
    }
    if (block.entanglement) {
        render_entanglement(out, *block.entanglement, "  ");
    }
}

} // namespace

std::string render_table(const hardy::HardyReport& rep) {
    std::ostringstream out;
    out << "Hardy interferometer, final beamsplitters: A "
        << (rep.config.keep_a ? "kept" : "removed") << ", B "
        << (rep.config.keep_b ? "kept" : "removed") << "\n\n";
    for (const auto& block : rep.posts) {
        render_block(out, block);
        out << "\n";
    }
    out << "combined matrix over all final outcomes:\n";
    render_matrix(out, rep.combined.entries, rep.combined.row_histories,
                  rep.combined.col_histories, "    ");
    if (rep.combined_entanglement) {
        render_entanglement(out, *rep.combined_entanglement, "  ");
    }
    out << "\n";
    render_detection(out, rep.detection, "");
    return out.str();
}

std::string render_table(const ScenarioRunReport& rep) {
    std::ostringstream out;
    out << "scenario " << rep.source << " (modes " << rep.mode_count_a << " x "
        << rep.mode_count_b << ")\n\n";
    for (const auto& block : rep.posts) {
        render_block(out, block);
        out << "\n";
    }
    render_detection(out, rep.detection, "");
    return out.str();
}

std::string render_table(const NonlocalityReport& rep) {
    std::ostringstream out;
    for (const auto& table : rep.cases) {
        render_detection(out, table, "");
        out << "\n";
    }

    out << "local hidden variable system:\n";
    std::vector<std::pair<std::string, std::string>> lines;
    auto collect = [&](const std::vector<LhvConstraint>& list, const char* relation) {
        for (const auto& c : list) {
            std::ostringstream line;
            for (std::size_t t = 0; t < c.terms.size(); ++t) {
                if (t > 0) {
                    line << " + ";
                }
                for (std::size_t f = 0; f < c.terms[t].factors.size(); ++f) {
                    if (f > 0) {
                        line << "*";
                    }
                    line << c.terms[t].factors[f];
                }
            }
            line << " " << relation;
            lines.emplace_back(c.id, line.str());
        }
    };
    collect(rep.system.zero_constraints, "= 0");
    collect(rep.system.nonzero_constraints, "> 0");
    std::sort(lines.begin(), lines.end(), [](const auto& lhs, const auto& rhs) {
        return lhs.first.size() != rhs.first.size() ? lhs.first.size() < rhs.first.size()
                                                    : lhs.first < rhs.first;
    });
    for (const auto& [id, text] : lines) {
        out << "  " << id << ": " << text << "\n";
    }

    out << "verdict: ";
    if (rep.verdict.status == FeasibilityVerdict::Status::infeasible) {
        out << "INFEASIBLE: ";
        for (const auto& d : rep.verdict.deductions) {
            out << d.variable << "=0 (from " << d.zero_constraint;
            for (const auto& s : d.support) {
                out << "," << s;
            }
            out << "); ";
        }
        out << "contradiction at " << rep.verdict.contradicted_constraint << "\n";
    } else if (rep.verdict.status == FeasibilityVerdict::Status::feasible) {
        out << "FEASIBLE with witness:";
        for (const auto& [var, value] : rep.verdict.witness) {
            out << " " << var << "=" << format_value(value);
        }
        out << "\n";
    } else {
        out << "UNDETERMINED\n";
    }
    out << "no-signalling: " << (rep.no_signalling ? "true" : "false") << "\n";
    return out.str();
}

} // namespace histent
