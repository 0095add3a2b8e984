#include "histent/weakvalues.hpp"

#include <cmath>

namespace histent {

WeakValueMatrix weak_value_matrix(const PropagatorMatrix& matrix) {
    Complex denominator = matrix.entries.sum();
    if (std::abs(denominator) <= 1e-12) {
        throw UndefinedWeakValueError("sum of propagators vanishes; weak values are undefined");
    }
    WeakValueMatrix wvm;
    wvm.entries = matrix.entries / denominator;
    wvm.denominator = denominator;
    wvm.row_histories = matrix.row_histories;
    wvm.col_histories = matrix.col_histories;
    return wvm;
}

SchmidtSpectrum spectrum_from_weak_values(const WeakValueMatrix& wvm) {
    return schmidt_spectrum(wvm.entries);
}

PointerReadout pointer_readout(Complex weak_value, const PointerModel& model) {
    if (model.sigma <= 0.0) {
        throw Error("pointer width sigma must be positive");
    }
    return PointerReadout{model.g * weak_value.real(),
                          model.g * weak_value.imag() / (2.0 * model.sigma * model.sigma)};
}

} // namespace histent
