#include "halphen/line_scattering.hpp"

#include <cmath>
#include <limits>

#include "halphen/dopri5.hpp"

namespace halphen::moduli {

namespace {

using C2 = std::array<cdouble, 2>;

C2 normalized(const C2& s) {
    const double n = std::sqrt(std::norm(s[0]) + std::norm(s[1]));
    return {s[0] / n, s[1] / n};
}

cdouble inner(const C2& a, const C2& b) {
    return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
}

/// Eigenvector of n.sigma for eigenvalue +1 (plus) or -1, phase-smooth in n
/// via the projector applied to a pole-adapted reference spinor.
C2 spin_eigvec(const std::array<double, 3>& n, bool plus,
               double* quality = nullptr) {
    const double nn = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
    if (nn < 1e-12)
        throw ConditioningError("spin_eigvec: direction vector vanishes");
    const double nx = n[0] / nn, ny = n[1] / nn, nz = n[2] / nn;
    const double s = plus ? 1.0 : -1.0;
    // P = (1 + s n.sigma)/2 applied to e1 or e2
    C2 u;
    if (std::abs(1.0 + s * nz) > 0.5) {
        u = {0.5 * (1.0 + s * nz), 0.5 * s * cdouble(nx, ny)};
    } else {
        u = {0.5 * s * cdouble(nx, -ny), 0.5 * (1.0 - s * nz)};
    }
    const double norm = std::sqrt(std::norm(u[0]) + std::norm(u[1]));
    if (quality) *quality = norm;
    if (norm < 1e-3)
        throw ConditioningError("spin_eigvec: projector nearly degenerate");
    return {u[0] / norm, u[1] / norm};
}

} // namespace

FieldMap hedgehog_field_map(const bps::MonopoleConfig& cfg) {
    return [cfg](const bps::Vec3& x, double phi[3], double a3[3]) {
        const bps::FieldSample s = bps::hedgehog_fields(cfg, x);
        for (int a = 0; a < 3; ++a) {
            phi[a] = s.phi[a];
            a3[a] = s.A[2][a];
        }
    };
}

FieldMap vacuum_field_map(double v, const std::array<double, 3>& direction) {
    const double n = std::sqrt(direction[0] * direction[0] +
                               direction[1] * direction[1] +
                               direction[2] * direction[2]);
    return [v, direction, n](const bps::Vec3&, double phi[3], double a3[3]) {
        for (int a = 0; a < 3; ++a) {
            phi[a] = v * direction[a] / n;
            a3[a] = 0.0;
        }
    };
}

LineData scatter_line(const FieldMap& fields, cdouble z,
                      const ScatterOptions& opt) {
    // ODE: ds/dtau = M s, M = (i e/2) a3.sigma + (1/2) phi.sigma.
    // The hermitian phi-part produces real growth/decay at rate |phi|/2;
    // the antihermitian connection part only rotates.
    auto Mtimes = [&](double tau, const C2& s) -> C2 {
        const bps::Vec3 x = {z.real(), z.imag(), tau};
        double phi[3], a3[3];
        fields(x, phi, a3);
        const cdouble I(0.0, 1.0);
        // c^a sigma_a with c = (i/2) a3 + (1/2) phi
        cdouble c[3];
        for (int a = 0; a < 3; ++a) c[a] = 0.5 * (phi[a] + I * a3[a]);
        // sigma action: (c.sigma) s
        return {c[2] * s[0] + (c[0] - I * c[1]) * s[1],
                (c[0] + I * c[1]) * s[0] - c[2] * s[1]};
    };

    auto rhs = [&](double tau, const ode::State<4>& y) -> ode::State<4> {
        const C2 s = {cdouble(y[0], y[1]), cdouble(y[2], y[3])};
        const C2 d = Mtimes(tau, s);
        return {d[0].real(), d[0].imag(), d[1].real(), d[1].imag()};
    };

    // initial condition: decays toward -infinity, i.e. grows along +tau:
    // the +|phi|/2 eigenvector of phi.sigma at -T
    double phi0[3], a30[3];
    fields({z.real(), z.imag(), -opt.T}, phi0, a30);
    const double pn0 = std::sqrt(phi0[0] * phi0[0] + phi0[1] * phi0[1] +
                                 phi0[2] * phi0[2]);
    if (pn0 < 1e-8)
        throw ConditioningError("scatter_line: Higgs field vanishes at -T, "
                                "no decay/growth splitting");
    const C2 s0 = spin_eigvec({phi0[0], phi0[1], phi0[2]}, true);

    ode::IntegratorOptions iopt;
    iopt.rtol = opt.rtol;
    iopt.atol = opt.rtol;
    auto traj = ode::integrate<4>(
        rhs, {s0[0].real(), s0[0].imag(), s0[1].real(), s0[1].imag()}, -opt.T,
        opt.T, iopt);
    const auto yT = traj.at(opt.T);
    const C2 sT = normalized({cdouble(yT[0], yT[1]), cdouble(yT[2], yT[3])});

    double phiT[3], a3T[3];
    fields({z.real(), z.imag(), opt.T}, phiT, a3T);
    const double pnT = std::sqrt(phiT[0] * phiT[0] + phiT[1] * phiT[1] +
                                 phiT[2] * phiT[2]);
    if (pnT < 1e-8)
        throw ConditioningError("scatter_line: Higgs field vanishes at +T");
    const C2 up = spin_eigvec({phiT[0], phiT[1], phiT[2]}, true);
    const C2 dn = spin_eigvec({phiT[0], phiT[1], phiT[2]}, false);

    LineData out;
    out.z = z;
    out.beta = inner(up, sT);
    out.rho = inner(dn, sT);
    return out;
}

namespace {

/// total winding of beta around the square |Re z - c|, |Im z - c| <= half
double contour_winding(const FieldMap& fields, cdouble c, double half,
                       const ScatterOptions& opt) {
    std::vector<cdouble> vals;
    const int n = opt.edge_samples;
    auto push = [&](cdouble z) {
        vals.push_back(scatter_line(fields, z, opt).beta);
    };
    for (int k = 0; k < n; ++k)
        push(c + cdouble(-half + 2.0 * half * k / n, -half));
    for (int k = 0; k < n; ++k)
        push(c + cdouble(half, -half + 2.0 * half * k / n));
    for (int k = 0; k < n; ++k)
        push(c + cdouble(half - 2.0 * half * k / n, half));
    for (int k = 0; k < n; ++k)
        push(c + cdouble(-half, half - 2.0 * half * k / n));

    double tot = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        const cdouble a = vals[i];
        const cdouble b = vals[(i + 1) % vals.size()];
        if (std::abs(a) == 0.0 || std::abs(b) == 0.0)
            return std::numeric_limits<double>::quiet_NaN();
        tot += std::arg(b / a);
    }
    return tot / (2.0 * 3.141592653589793238462643);
}

} // namespace

ScatteringResult fit_line_scattering(const FieldMap& fields,
                                     const ScatterOptions& opt) {
    ScatteringResult out;

    // coarse grid: matching data + trivial-sector detection
    double min_beta = std::numeric_limits<double>::infinity();
    for (int i = 0; i < opt.coarse_n; ++i)
        for (int j = 0; j < opt.coarse_n; ++j) {
            const cdouble z(-opt.box_half + 2.0 * opt.box_half * i / (opt.coarse_n - 1),
                            -opt.box_half + 2.0 * opt.box_half * j / (opt.coarse_n - 1));
            LineData d = scatter_line(fields, z, opt);
            min_beta = std::min(min_beta, std::abs(d.beta));
            out.grid.push_back(d);
        }

    const double w0 = contour_winding(fields, 0.0, opt.box_half, opt);
    const int w = int(std::lround(w0));
    if (std::isnan(w0) || (w == 0 && min_beta > 0.5)) {
        out.trivial = (w == 0);
        out.winding = 0;
        if (out.trivial) return out;
        throw ConditioningError("fit_line_scattering: winding inconclusive");
    }
    if (w == 0) {
        // a zero may sit exactly on the contour; treat as inconclusive
        throw ConditioningError("fit_line_scattering: no winding but small beta "
                                "observed; enlarge box_half");
    }
    out.winding = w;

    // quadrant bisection on the winding
    cdouble c = 0.0;
    double half = opt.box_half;
    for (int lev = 0; lev < opt.levels; ++lev) {
        bool found = false;
        for (int q = 0; q < 4 && !found; ++q) {
            const cdouble qc = c + 0.5 * half * cdouble(q % 2 ? 1.0 : -1.0,
                                                        q / 2 ? 1.0 : -1.0);
            const double wq = contour_winding(fields, qc, 0.5 * half + 1e-12, opt);
            if (!std::isnan(wq) && std::lround(wq) != 0) {
                c = qc;
                half *= 0.5;
                found = true;
            }
        }
        if (!found)
            throw ConditioningError("fit_line_scattering: winding lost during "
                                    "bisection");
    }
    out.pole = c;
    out.pole_uncertainty = half * std::sqrt(2.0);

    // The numerator constant of the degree-1 normal form is fixed only by
    // the boundary framing normalization, which the finite-segment solve
    // does not pin (the decaying coefficient is below the splitting noise
    // floor at usable T).  Keep it at unit modulus with the measured phase.
    cdouble a0 = 0.0;
    for (const LineData& d : out.grid) {
        if (std::abs(d.beta) < 1e-14) continue;
        a0 += d.rho / d.beta * (d.z - out.pole);
    }
    a0 = (std::abs(a0) > 0.0) ? a0 / std::abs(a0) : cdouble(1.0, 0.0);
    out.map = RationalMap::make(1, {a0}, {-out.pole});
    out.fit_residual = out.pole_uncertainty;
    return out;
}

} // namespace halphen::moduli
