#ifndef HALPHEN_SERIES_HPP
#define HALPHEN_SERIES_HPP

#include <cmath>
#include <complex>

#include "halphen/errors.hpp"

namespace halphen {

using cdouble = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Smallest Im(tau) the q-series evaluators accept.  Below this the nome is
/// too close to the unit circle for the default truncation budget.
inline constexpr double kMinImTau = 0.05;

/// Truncation policy for q-expansions.  The default tail budget sits well
/// below the identity tolerances the library asserts, so truncation never
/// dominates a residual.
struct SeriesParams {
    int max_terms = 600;
    double tail_tolerance = 1e-14;
};

/// Value of a truncated series together with a rigorous bound on the
/// discarded tail.
struct SeriesValue {
    cdouble value{};
    double tail_bound = 0.0;
};

/// Point tau on the upper half-plane with both nomes cached:
/// q = exp(2*pi*i*tau) drives the Eisenstein series, while the Jacobi
/// nullwerte expand in the classical half nome exp(i*pi*tau).
class HalfPlanePoint {
public:
    static HalfPlanePoint from_tau(cdouble tau) {
        if (!(tau.imag() > 0.0))
            throw DomainError("HalfPlanePoint: Im(tau) must be positive");
        return HalfPlanePoint(tau);
    }

    cdouble tau() const { return tau_; }
    cdouble q() const { return q_; }
    cdouble theta_nome() const { return w_; }
    double abs_q() const { return std::abs(q_); }
    double abs_theta_nome() const { return std::abs(w_); }

private:
    explicit HalfPlanePoint(cdouble tau)
        : tau_(tau),
          q_(std::exp(cdouble(0.0, 2.0 * kPi) * tau)),
          w_(std::exp(cdouble(0.0, kPi) * tau)) {}

    cdouble tau_;
    cdouble q_;
    cdouble w_;
};

} // namespace halphen

#endif
