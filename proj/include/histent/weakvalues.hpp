#pragma once

#include "histent/entanglement.hpp"
#include "histent/histories.hpp"

#include <Eigen/Dense>

namespace histent {

// Sequential weak values (Q_{alpha,beta})_w = psi_{alpha,beta} / sum(psi).
// Entries always sum to one; entries times the denominator reproduce the
// source propagators.
struct WeakValueMatrix {
    Eigen::MatrixXcd entries;
    Complex denominator;
    std::vector<LocalHistory> row_histories;
    std::vector<LocalHistory> col_histories;
};

// Gaussian-pointer weak measurement model: coupling g, pointer width sigma.
struct PointerModel {
    double g = 1.0;
    double sigma = 1.0;
};

struct PointerReadout {
    double mean_position = 0.0;
    double mean_wavenumber = 0.0;
};

// Throws UndefinedWeakValueError when |sum psi| <= 1e-12 (dark postselection).
WeakValueMatrix weak_value_matrix(const PropagatorMatrix& matrix);

// Eigenvalues of M M^dag / Tr(M M^dag); equal to the Schmidt spectrum of the
// source propagator matrix.
SchmidtSpectrum spectrum_from_weak_values(const WeakValueMatrix& wvm);

// First-order pointer expectations: <x> = g Re(W), <k> = g Im(W) / (2 sigma^2).
PointerReadout pointer_readout(Complex weak_value, const PointerModel& model);

} // namespace histent
