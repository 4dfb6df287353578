#ifndef SPINSEMI_PARAMS_HPP
#define SPINSEMI_PARAMS_HPP

#include <cmath>
#include <complex>
#include <numbers>

#include "spinsemi/errors.hpp"

namespace spinsemi {

using cplx = std::complex<double>;

// Physical parameters of the two-spin model. The coupling enters every
// observable only through lambda*T, so lambda mostly fixes the time unit.
struct QuantumParams {
    double j = 4.5;        // spin quantum number, half-integer
    cplx s0A{1.0, 0.0};    // initial coherent label, part A
    cplx s0B{1.0, 0.0};    // initial coherent label, part B
    double lambda = 1.0;   // coupling constant (1/time)
    double hbar = 1.0;

    // dimension of one part's Hilbert space
    int dim() const { return static_cast<int>(std::lround(2.0 * j)) + 1; }

    void validate() const {
        const double two_j = 2.0 * j;
        if (j <= 0.0 || std::abs(two_j - std::lround(two_j)) > 1e-9)
            throw ConfigError("j must be a positive half-integer");
        if (lambda == 0.0) throw ConfigError("lambda must be nonzero");
        if (hbar <= 0.0) throw ConfigError("hbar must be positive");
    }

    // recurrence period of the model
    double revival_period() const { return 2.0 * std::numbers::pi / lambda; }

    // dimensionless time tau = T / T_r
    double tau_to_time(double tau) const { return tau * revival_period(); }
    cplx tau_to_time(cplx tau) const { return tau * revival_period(); }
};

} // namespace spinsemi

#endif
