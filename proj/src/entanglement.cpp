#include "histent/entanglement.hpp"

#include <algorithm>
#include <cmath>

namespace histent {

namespace {

constexpr double zero_trace_threshold = 1e-14;
constexpr double route_agreement_tol = 1e-8;

double gram_trace_of(const Eigen::MatrixXcd& matrix) {
    return matrix.squaredNorm(); // Tr(C C^dag) = sum |c_ij|^2
}

} // namespace

Eigen::MatrixXcd normalized_gram(const Eigen::MatrixXcd& matrix) {
    const double trace = gram_trace_of(matrix);
    if (trace <= zero_trace_threshold) {
        throw ZeroPropagatorError("propagator matrix is identically zero");
    }
    return (matrix * matrix.adjoint()) / trace;
}

Eigen::MatrixXcd normalized_gram(const PropagatorMatrix& matrix) {
    return normalized_gram(matrix.entries);
}

SchmidtSpectrum schmidt_spectrum(const Eigen::MatrixXcd& matrix) {
    const double trace = gram_trace_of(matrix);
    if (trace <= zero_trace_threshold) {
        throw ZeroPropagatorError("propagator matrix is identically zero");
    }
    const int count = static_cast<int>(std::min(matrix.rows(), matrix.cols()));

    // Route 1: eigenvalues of the normalized Gram matrix.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(normalized_gram(matrix));
    if (es.info() != Eigen::Success) {
        throw Error("eigendecomposition of the normalized Gram matrix failed");
    }
    std::vector<double> from_gram(es.eigenvalues().data(),
                                  es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(from_gram.rbegin(), from_gram.rend());
    from_gram.resize(count);

    // Route 2: singular values of the normalized matrix.
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(matrix / std::sqrt(trace));
    std::vector<double> lambdas(svd.singularValues().data(),
                                svd.singularValues().data() + svd.singularValues().size());

    // Agreement is checked on the squared coefficients, where both routes are
    // well conditioned; the sqrt would amplify O(eps) eigenvalue noise of an
    // exact zero to O(sqrt(eps)).
    for (int s = 0; s < count; ++s) {
        if (std::abs(from_gram[s] - lambdas[s] * lambdas[s]) > route_agreement_tol) {
            throw Error("Schmidt coefficient routes disagree: gram eigenvalue gives " +
                        std::to_string(from_gram[s]) + ", SVD gives " +
                        std::to_string(lambdas[s] * lambdas[s]));
        }
    }
    return SchmidtSpectrum{std::move(lambdas), default_rank_tolerance};
}

SchmidtSpectrum schmidt_spectrum(const PropagatorMatrix& matrix) {
    return schmidt_spectrum(matrix.entries);
}

int schmidt_rank(const SchmidtSpectrum& spectrum, double tol) {
    if (tol <= 0.0) {
        throw Error("rank tolerance must be positive");
    }
    return static_cast<int>(
        std::count_if(spectrum.lambdas.begin(), spectrum.lambdas.end(),
                      [tol](double lambda) { return lambda > tol; }));
}

double concurrence(const Eigen::MatrixXcd& matrix) {
    Eigen::MatrixXcd gram = normalized_gram(matrix);
    double tr2 = (gram * gram).trace().real();
    // Tr(G^2) = 1 holds exactly for separable histories; closer than 1e-14 is
    // indistinguishable from it in double precision, and the sqrt would blow
    // the residue up to ~1e-7.
    double gap = 1.0 - tr2;
    if (gap < 1e-14) {
        return 0.0;
    }
    return std::sqrt(2.0 * gap);
}

double concurrence(const PropagatorMatrix& matrix) {
    return concurrence(matrix.entries);
}

double entanglement_entropy(const SchmidtSpectrum& spectrum) {
    double entropy = 0.0;
    for (double lambda : spectrum.lambdas) {
        double p = lambda * lambda;
        if (p > 1e-15) {
            entropy -= p * std::log(p);
        }
    }
    return entropy;
}

double robustness(const SchmidtSpectrum& spectrum) {
    double sum = 0.0;
    for (double lambda : spectrum.lambdas) {
        sum += lambda;
    }
    return std::max(0.0, sum * sum - 1.0);
}

EntanglementReport report(const PropagatorMatrix& matrix, double rank_tol) {
    EntanglementReport rep;
    rep.spectrum = schmidt_spectrum(matrix);
    rep.spectrum.tolerance = rank_tol;
    rep.rank = schmidt_rank(rep.spectrum, rank_tol);
    rep.concurrence = concurrence(matrix);
    rep.entropy = entanglement_entropy(rep.spectrum);
    rep.robustness = robustness(rep.spectrum);
    rep.entangled = rep.rank > 1;
    rep.gram_trace = gram_trace_of(matrix.entries);
    return rep;
}

} // namespace histent
