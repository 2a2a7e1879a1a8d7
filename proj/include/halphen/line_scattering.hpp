#ifndef HALPHEN_LINE_SCATTERING_HPP
#define HALPHEN_LINE_SCATTERING_HPP

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "halphen/bps_monopole.hpp"
#include "halphen/rational_map.hpp"

namespace halphen::moduli {

/// Fields entering the scattering operator along a line: phi^a and the
/// component of A along the line direction (x3).
using FieldMap =
    std::function<void(const bps::Vec3& x, double phi[3], double a3[3])>;

FieldMap hedgehog_field_map(const bps::MonopoleConfig& cfg);
FieldMap vacuum_field_map(double v, const std::array<double, 3>& direction);

struct ScatterOptions {
    double T = 18.0;        // half-length of the integration segment
    double rtol = 1e-12;
    double box_half = 1.2;  // search box [-b, b]^2 in the z-plane
    int levels = 7;         // quadrant bisection depth
    int edge_samples = 6;   // contour samples per quadrant edge
    int coarse_n = 5;       // coarse grid per axis for the data rows
};

/// Per-line matching data: unit-basis coefficients of the forward-scattered
/// solution on the growth/decay eigenbasis at +T.
struct LineData {
    cdouble z{};
    cdouble beta{}; // growing coefficient (zero exactly on the pole line)
    cdouble rho{};  // decaying coefficient
};

/// Solve the scattering problem (d/dtau + A3 - i phi) s = 0 along the line
/// x(tau) = (Re z, Im z, tau) and return the unit-normalized matching
/// coefficients at +T.
LineData scatter_line(const FieldMap& fields, cdouble z,
                      const ScatterOptions& opt = {});

struct ScatteringResult {
    bool trivial = false;   // no pole found: the k = 0 sector
    cdouble pole{};
    int winding = 0;
    double pole_uncertainty = 0.0; // half-diagonal of the final bisection cell
    /// Degree-1 normal form when non-trivial.  The pole is measured; the
    /// numerator constant depends on the boundary framing normalization and
    /// is pinned to unit modulus.
    std::optional<RationalMap> map;
    double fit_residual = 0.0; // pole localization tolerance
    std::vector<LineData> grid;
};

/// Locate the pole of the degree-1 scattering function by winding-number
/// bisection of beta(z) and assemble the fitted rational map.
ScatteringResult fit_line_scattering(const FieldMap& fields,
                                     const ScatterOptions& opt = {});

} // namespace halphen::moduli

#endif
