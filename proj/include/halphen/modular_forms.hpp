#ifndef HALPHEN_MODULAR_FORMS_HPP
#define HALPHEN_MODULAR_FORMS_HPP

#include "halphen/series.hpp"

namespace halphen::forms {

enum class Eisenstein { E2, E4, E6 };
enum class Theta { T2, T3, T4 };

/// Truncated q-expansion of E2, E4 or E6 with a geometric-majorant tail
/// bound.  Throws TruncationError if the bound cannot be pushed below
/// params.tail_tolerance within params.max_terms, DomainError for
/// Im(tau) < 0.05.
SeriesValue eval_eisenstein(Eisenstein kind, const HalfPlanePoint& p,
                            const SeriesParams& params = {});

/// Jacobi theta nullwert (classical half nome exp(i*pi*tau)).
SeriesValue eval_theta(Theta kind, const HalfPlanePoint& p,
                       const SeriesParams& params = {});

/// d/dtau of an Eisenstein series via the Ramanujan closed forms:
///   E2' = (i pi/6)(E2^2 - E4)
///   E4' = (2 i pi/3)(E2 E4 - E6)
///   E6' = i pi (E2 E6 - E4^2)
SeriesValue eisenstein_derivative(Eisenstein kind, const HalfPlanePoint& p,
                                  const SeriesParams& params = {});

/// Residuals of the S-transformation laws
///   E2(-1/tau) = tau^2 E2(tau) + 12 tau/(2 pi i)
///   E4(-1/tau) = tau^4 E4(tau),  E6(-1/tau) = tau^6 E6(tau).
struct TransformResiduals {
    double e2 = 0.0;
    double e4 = 0.0;
    double e6 = 0.0;
    double combined_tail = 0.0;
};

TransformResiduals transform_residuals(const HalfPlanePoint& p,
                                       const SeriesParams& params = {});

namespace detail {
/// sigma_k(n) for k in {1,3,5}, sieved and cached per process.
/// Returned pointer stays valid for the process lifetime.
const double* sigma_table(int k, int n_terms);
} // namespace detail

} // namespace halphen::forms

#endif
