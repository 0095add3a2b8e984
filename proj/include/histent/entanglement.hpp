#pragma once

#include "histent/histories.hpp"

#include <Eigen/Dense>

#include <vector>

namespace histent {

inline constexpr double default_rank_tolerance = 1e-9;

// Descending Schmidt coefficients of a normalized propagator matrix;
// the squares sum to one.
struct SchmidtSpectrum {
    std::vector<double> lambdas;
    double tolerance = default_rank_tolerance;
};

struct EntanglementReport {
    SchmidtSpectrum spectrum;
    int rank = 0;
    double concurrence = 0.0;
    double entropy = 0.0;    // nats
    double robustness = 0.0;
    bool entangled = false;
    double gram_trace = 0.0; // Tr(C C^dag) before normalization
};

// C~ = C C^dag / Tr(C C^dag). Throws ZeroPropagatorError when the trace is
// below 1e-14 (impossible postselection).
Eigen::MatrixXcd normalized_gram(const Eigen::MatrixXcd& matrix);
Eigen::MatrixXcd normalized_gram(const PropagatorMatrix& matrix);

// Schmidt coefficients via two routes cross-checked against each other:
// eigenvalues of the normalized Gram matrix and singular values of the
// normalized matrix. Disagreement beyond 1e-8 fails loudly.
SchmidtSpectrum schmidt_spectrum(const Eigen::MatrixXcd& matrix);
SchmidtSpectrum schmidt_spectrum(const PropagatorMatrix& matrix);

int schmidt_rank(const SchmidtSpectrum& spectrum, double tol = default_rank_tolerance);

// Gudder trace shortcut: sqrt(2 [1 - Tr(C~^2)]), no decomposition involved.
double concurrence(const Eigen::MatrixXcd& matrix);
double concurrence(const PropagatorMatrix& matrix);

// Shannon entropy of the squared Schmidt coefficients, in nats.
double entanglement_entropy(const SchmidtSpectrum& spectrum);

// (sum lambda)^2 - 1.
double robustness(const SchmidtSpectrum& spectrum);

EntanglementReport report(const PropagatorMatrix& matrix,
                          double rank_tol = default_rank_tolerance);

} // namespace histent
