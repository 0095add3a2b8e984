#pragma once

#include "histent/circuit.hpp"

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

namespace histent {

// Multi-index (i_1..i_k), each component in 1..n, together with its flattened
// single index alpha = 1 + sum_j (i_j - 1) n^(j-1).
struct HistoryIndex {
    std::vector<int> multi;
    int alpha = 1;
};

int alpha_index(const std::vector<int>& multi, int n);
std::vector<int> multi_index(int alpha, int n, int k);

// One particle's local history: which declared basis mode it occupies at each
// intermediate time point. Combined matrices append the final outcome mode as
// an extra entry of `modes`.
struct LocalHistory {
    HistoryIndex index;
    std::vector<int> modes;
    std::string label;
};

struct BipartiteHistory {
    HistoryIndex alpha; // particle A
    HistoryIndex beta;  // particle B
};

// Matrix of Feynman propagators psi_{alpha,beta}; rows run over particle A
// local histories, columns over particle B local histories.
struct PropagatorMatrix {
    Eigen::MatrixXcd entries;
    std::vector<LocalHistory> row_histories;
    std::vector<LocalHistory> col_histories;
    int n = 0; // effective local dimension
    int k = 0; // intermediate time points per local history
    std::string final_label;
    std::vector<std::pair<int, int>> finals;
};

// Local histories with structurally nonzero support: every transition between
// consecutive declared basis modes (and from the initial state into the first
// layer) must have a mode-map rule. Listed in ascending alpha order.
std::vector<LocalHistory> enumerate_local_histories(const Circuit& circuit, Particle particle);

// Propagator of one bipartite history: alternate time evolution and product
// projection through the circuit, then contract with the postselected pair.
Complex chain_apply(const Circuit& circuit, const BipartiteHistory& history,
                    std::pair<int, int> final_pair);

PropagatorMatrix propagator_matrix(const Circuit& circuit, std::pair<int, int> final_pair);

// Block-assembles per-final matrices over extended local histories that append
// the final local outcome as an extra time point (final outcome varies slowest,
// path index fastest).
PropagatorMatrix combined_matrix(const Circuit& circuit,
                                 const std::vector<Postselection>& finals);

// Sum of all entries; equals <final|evolve(circuit)> for a complete history set.
Complex sum_over_histories(const PropagatorMatrix& matrix);

} // namespace histent
