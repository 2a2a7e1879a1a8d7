#ifndef HALPHEN_AH_GEODESICS_HPP
#define HALPHEN_AH_GEODESICS_HPP

#include <array>
#include <vector>

#include "halphen/bianchi_geometry.hpp"

namespace halphen::moduli {

/// Lapse gauge for the 4-metric on M3 x R:
///   Theta: ds^2 = f0^2 dt^2 + sum fi^2 (s^i)^2   (the Theta parametrization)
///   Unit:  ds^2 = dt^2 + sum fi^2 (s^i)^2        (unit lapse)
enum class LapseGauge { Theta, Unit };

using Coord4 = std::array<double, 4>; // (t, alpha, beta, psi)
using Metric4 = std::array<std::array<double, 4>, 4>;

/// Coordinate metric at p assembled from the Maurer-Cartan components and
/// the coframe coefficients.
Metric4 ah_metric_at(const geom::CoframeMetric& m, const Coord4& p,
                     LapseGauge gauge = LapseGauge::Theta);

double metric_determinant(const Metric4& g);

/// Quadratic form g(v, v).
double metric_norm2(const Metric4& g, const Coord4& v);

struct GeodesicState {
    Coord4 x{};
    Coord4 v{};
};

struct GeodesicSample {
    double s = 0.0;
    GeodesicState state;
    double norm2 = 0.0;
    double p_beta = 0.0;
};

struct GeodesicResult {
    std::vector<GeodesicSample> samples;
    double norm2_drift = 0.0;  // max |norm2 - norm2_0| / max(1, |norm2_0|)
    double p_beta_drift = 0.0;
    bool boundary_exit = false;
    double s_end = 0.0;
};

struct GeodesicOptions {
    double tol = 1e-10;
    double fd_step_scale = 1e-5; // Christoffel FD step: scale * max(1, |x|)
    int n_samples = 64;
    LapseGauge gauge = LapseGauge::Theta;
    double alpha_exclusion = 1e-3;
};

/// Geodesic flow with Christoffel symbols from central differences of the
/// coordinate metric.  Leaves the metric positivity window or the Euler
/// chart gracefully (boundary_exit set, no throw).
GeodesicResult geodesic_integrate(const geom::CoframeMetric& m,
                                  const GeodesicState& initial, double arc,
                                  const GeodesicOptions& opt = {});

} // namespace halphen::moduli

#endif
