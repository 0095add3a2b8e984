#include "histent/histories.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace histent {

int alpha_index(const std::vector<int>& multi, int n) {
    if (n < 1) {
        throw IndexError("local dimension must be at least 1");
    }
    int alpha = 1;
    int weight = 1;
    for (std::size_t j = 0; j < multi.size(); ++j) {
        if (multi[j] < 1 || multi[j] > n) {
            throw IndexError("history component i_" + std::to_string(j + 1) + " = " +
                             std::to_string(multi[j]) + " outside 1.." + std::to_string(n));
        }
        alpha += (multi[j] - 1) * weight;
        weight *= n;
    }
    return alpha;
}

std::vector<int> multi_index(int alpha, int n, int k) {
    if (n < 1 || k < 0) {
        throw IndexError("invalid local dimension or history length");
    }
    int total = 1;
    for (int j = 0; j < k; ++j) {
        total *= n;
    }
    if (alpha < 1 || alpha > total) {
        throw IndexError("alpha " + std::to_string(alpha) + " outside 1.." + std::to_string(total));
    }
    std::vector<int> multi(k);
    int rest = alpha - 1;
    for (int j = 0; j < k; ++j) {
        multi[j] = rest % n + 1;
        rest /= n;
    }
    return multi;
}

namespace {

const std::vector<int>& layer_modes(const BasisLayer& layer, Particle particle) {
    return particle == Particle::A ? layer.modes_a : layer.modes_b;
}

std::string history_label(Particle particle, const std::vector<int>& modes) {
    const char prefix = particle == Particle::A ? 'a' : 'b';
    std::ostringstream out;
    for (std::size_t j = 0; j < modes.size(); ++j) {
        if (j > 0) {
            out << ">";
        }
        out << prefix << modes[j];
    }
    return out.str();
}

// Occupied modes of one particle in the initial state.
std::set<int> initial_support(const Circuit& circuit, Particle particle) {
    std::set<int> modes;
    for (const auto& [pair, amp] : circuit.initial.amplitudes()) {
        modes.insert(particle == Particle::A ? pair.first : pair.second);
    }
    return modes;
}

} // namespace

std::vector<LocalHistory> enumerate_local_histories(const Circuit& circuit, Particle particle) {
    const int k = circuit.history_points();
    const int n = circuit.local_dimension();

    if (k == 0) {
        LocalHistory trivial;
        trivial.index.alpha = 1;
        trivial.label = history_label(particle, {});
        return {trivial};
    }

    const std::set<int> start = initial_support(circuit, particle);
    auto step_map = [&](std::size_t s) -> const ModeMap& {
        return particle == Particle::A ? circuit.steps[s].map_a : circuit.steps[s].map_b;
    };

    // A history survives iff each of its transitions has a declared rule entry:
    // the circuit structure, not the amplitude values, decides the effective
    // local history space (dead branches are identically zero either way).
    auto reachable = [&](const std::vector<int>& modes) {
        bool entered = false;
        for (int src : start) {
            if (std::abs(step_map(0).coefficient(src, modes[0])) > 0.0) {
                entered = true;
                break;
            }
        }
        if (!entered) {
            return false;
        }
        for (int j = 0; j + 1 < k; ++j) {
            if (std::abs(step_map(j + 1).coefficient(modes[j], modes[j + 1])) == 0.0) {
                return false;
            }
        }
        return true;
    };

    int total = 1;
    for (int j = 0; j < k; ++j) {
        total *= n;
    }

    std::vector<LocalHistory> histories;
    for (int alpha = 1; alpha <= total; ++alpha) {
        LocalHistory hist;
        hist.index.multi = multi_index(alpha, n, k);
        hist.index.alpha = alpha;
        hist.modes.reserve(k);
        for (int j = 0; j < k; ++j) {
            hist.modes.push_back(layer_modes(circuit.intermediate_bases[j], particle)[hist.index.multi[j] - 1]);
        }
        if (!reachable(hist.modes)) {
            continue;
        }
        hist.label = history_label(particle, hist.modes);
        histories.push_back(std::move(hist));
    }
    return histories;
}

namespace {

// Propagator for a concrete pair of mode sequences.
Complex chain_value(const Circuit& circuit, const std::vector<int>& modes_a,
                    const std::vector<int>& modes_b, std::pair<int, int> final_pair) {
    const int k = circuit.history_points();
    TwoParticleState state = circuit.initial;
    for (std::size_t s = 0; s < circuit.steps.size(); ++s) {
        state = apply_step(state, circuit.steps[s]);
        if (static_cast<int>(s) < k) {
            state = project(state, {modes_a[s], modes_b[s]});
        }
        if (state.empty()) {
            return {0.0, 0.0};
        }
    }
    return state.amplitude(final_pair.first, final_pair.second);
}

void check_final_declared(const Circuit& circuit, std::pair<int, int> final_pair) {
    if (!circuit.find_postselection(final_pair)) {
        throw IndexError("final pair (" + std::to_string(final_pair.first) + "," +
                         std::to_string(final_pair.second) + ") is not a declared postselection");
    }
}

} // namespace

Complex chain_apply(const Circuit& circuit, const BipartiteHistory& history,
                    std::pair<int, int> final_pair) {
    const int k = circuit.history_points();
    const int n = circuit.local_dimension();
    if (static_cast<int>(history.alpha.multi.size()) != k ||
        static_cast<int>(history.beta.multi.size()) != k) {
        throw IndexError("history length does not match the circuit's intermediate points");
    }
    check_final_declared(circuit, final_pair);

    std::vector<int> modes_a(k), modes_b(k);
    for (int j = 0; j < k; ++j) {
        int ia = history.alpha.multi[j];
        int ib = history.beta.multi[j];
        if (ia < 1 || ia > n || ib < 1 || ib > n) {
            throw IndexError("history component outside 1.." + std::to_string(n));
        }
        modes_a[j] = circuit.intermediate_bases[j].modes_a[ia - 1];
        modes_b[j] = circuit.intermediate_bases[j].modes_b[ib - 1];
    }
    return chain_value(circuit, modes_a, modes_b, final_pair);
}

PropagatorMatrix propagator_matrix(const Circuit& circuit, std::pair<int, int> final_pair) {
    check_final_declared(circuit, final_pair);

    PropagatorMatrix matrix;
    matrix.row_histories = enumerate_local_histories(circuit, Particle::A);
    matrix.col_histories = enumerate_local_histories(circuit, Particle::B);
    matrix.n = circuit.local_dimension();
    matrix.k = circuit.history_points();
    matrix.finals = {final_pair};
    if (const Postselection* post = circuit.find_postselection(final_pair)) {
        matrix.final_label = post->name;
    }

    matrix.entries.resize(static_cast<int>(matrix.row_histories.size()),
                          static_cast<int>(matrix.col_histories.size()));
    for (int r = 0; r < matrix.entries.rows(); ++r) {
        for (int c = 0; c < matrix.entries.cols(); ++c) {
            matrix.entries(r, c) = chain_value(circuit, matrix.row_histories[r].modes,
                                               matrix.col_histories[c].modes, final_pair);
        }
    }
    return matrix;
}

PropagatorMatrix combined_matrix(const Circuit& circuit,
                                 const std::vector<Postselection>& finals) {
    if (finals.empty()) {
        throw IndexError("combined matrix needs at least one final");
    }
    for (const auto& post : finals) {
        check_final_declared(circuit, post.pair());
    }

    // Final outcomes per side, ordered by first appearance.
    std::vector<int> outs_a, outs_b;
    for (const auto& post : finals) {
        if (std::find(outs_a.begin(), outs_a.end(), post.a) == outs_a.end()) {
            outs_a.push_back(post.a);
        }
        if (std::find(outs_b.begin(), outs_b.end(), post.b) == outs_b.end()) {
            outs_b.push_back(post.b);
        }
    }
    if (finals.size() != outs_a.size() * outs_b.size()) {
        throw IndexError("combined finals must form a full outcome grid");
    }

    std::vector<LocalHistory> base_rows = enumerate_local_histories(circuit, Particle::A);
    std::vector<LocalHistory> base_cols = enumerate_local_histories(circuit, Particle::B);

    auto extend = [](const std::vector<LocalHistory>& base, const std::vector<int>& outs,
                     Particle particle) {
        std::vector<LocalHistory> extended;
        extended.reserve(base.size() * outs.size());
        int alpha = 1;
        for (std::size_t o = 0; o < outs.size(); ++o) {
            for (const auto& hist : base) {
                LocalHistory ext = hist;
                ext.index.multi.push_back(static_cast<int>(o) + 1);
                ext.index.alpha = alpha++;
                ext.modes.push_back(outs[o]);
                ext.label = history_label(particle, ext.modes);
                extended.push_back(std::move(ext));
            }
        }
        return extended;
    };

    PropagatorMatrix matrix;
    matrix.row_histories = extend(base_rows, outs_a, Particle::A);
    matrix.col_histories = extend(base_cols, outs_b, Particle::B);
    matrix.n = circuit.local_dimension();
    matrix.k = circuit.history_points() + 1;
    matrix.final_label = "combined";
    for (const auto& post : finals) {
        matrix.finals.push_back(post.pair());
    }

    const int nr = static_cast<int>(base_rows.size());
    const int nc = static_cast<int>(base_cols.size());
    matrix.entries.resize(nr * static_cast<int>(outs_a.size()), nc * static_cast<int>(outs_b.size()));
    for (std::size_t oa = 0; oa < outs_a.size(); ++oa) {
        for (std::size_t ob = 0; ob < outs_b.size(); ++ob) {
            PropagatorMatrix block = propagator_matrix(circuit, {outs_a[oa], outs_b[ob]});
            matrix.entries.block(static_cast<int>(oa) * nr, static_cast<int>(ob) * nc, nr, nc) =
                block.entries;
        }
    }
    return matrix;
}

Complex sum_over_histories(const PropagatorMatrix& matrix) {
    return matrix.entries.sum();
}

} // namespace histent
