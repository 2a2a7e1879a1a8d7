#include "halphen/bps_monopole.hpp"

#include <cmath>
#include <limits>

namespace halphen::bps {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

constexpr double eps3(int a, int b, int c) {
    return double((a - b) * (b - c) * (c - a)) / 2.0;
}

double norm3(const Vec3& x) {
    return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
}

Vec3 sub(const Vec3& a, const Vec3& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

} // namespace

Profiles bps_profiles(double xi) {
    if (xi < 0.0) throw DomainError("bps_profiles: xi must be nonnegative");
    Profiles p;
    if (xi < 1e-4) {
        const double x2 = xi * xi;
        p.H = x2 / 3.0 - x2 * x2 / 45.0;
        p.K = 1.0 - x2 / 6.0 + 7.0 * x2 * x2 / 360.0;
        p.dH = 2.0 * xi / 3.0 - 4.0 * xi * x2 / 45.0;
        p.dK = -xi / 3.0 + 7.0 * xi * x2 / 90.0;
        return p;
    }
    if (xi > 700.0) {
        // sinh overflows; asymptotics are exact to double precision here
        p.H = xi - 1.0;
        p.K = 0.0;
        p.dH = 1.0;
        p.dK = 0.0;
        return p;
    }
    const double sh = std::sinh(xi);
    const double ch = std::cosh(xi);
    const double coth = ch / sh;
    p.H = xi * coth - 1.0;
    p.K = xi / sh;
    p.dH = coth - xi / (sh * sh);
    p.dK = (1.0 - xi * coth) / sh; // = -H K / xi
    return p;
}

FieldSample hedgehog_fields(const MonopoleConfig& cfg, const Vec3& x) {
    FieldSample s;
    s.x = x;
    const Vec3 y = sub(x, cfg.center);
    const double r = norm3(y);
    if (r == 0.0) return s; // phi and A vanish at the center

    const double xi = cfg.v * cfg.e * r;
    const Profiles p = cfg.profiles_at(xi);
    const double h = p.H / (cfg.e * r * r);
    const double g = (1.0 - p.K) / (cfg.e * r * r);

    for (int a = 0; a < 3; ++a) s.phi[a] = y[a] * h;
    for (int n = 0; n < 3; ++n)
        for (int a = 0; a < 3; ++a) {
            double val = 0.0;
            for (int m = 0; m < 3; ++m) val += eps3(a, n, m) * y[m];
            s.A[n][a] = val * g;
        }
    return s;
}

namespace {

// analytic spatial gradients of the ansatz
struct FieldGradients {
    double dphi[3][3];   // d_i phi^a
    double dA[3][3][3];  // d_i A_n^a
};

FieldGradients hedgehog_gradients(const MonopoleConfig& cfg, const Vec3& x) {
    const Vec3 y = sub(x, cfg.center);
    const double r = norm3(y);
    if (r == 0.0) {
        FieldGradients gr{};
        const double h0 = cfg.v * cfg.v * cfg.e / 3.0;
        for (int i = 0; i < 3; ++i) gr.dphi[i][i] = h0;
        return gr;
    }
    const double xi = cfg.v * cfg.e * r;
    const Profiles p = cfg.profiles_at(xi);
    const double er2 = cfg.e * r * r;
    const double h = p.H / er2;
    const double g = (1.0 - p.K) / er2;
    // radial derivatives of the scalar prefactors
    const double hp = (xi * p.dH - 2.0 * p.H) / (cfg.e * r * r * r);
    const double gp = (-xi * p.dK - 2.0 * (1.0 - p.K)) / (cfg.e * r * r * r);

    FieldGradients gr{};
    for (int i = 0; i < 3; ++i)
        for (int a = 0; a < 3; ++a)
            gr.dphi[i][a] = (i == a ? h : 0.0) + y[a] * y[i] * hp / r;
    for (int i = 0; i < 3; ++i)
        for (int n = 0; n < 3; ++n)
            for (int a = 0; a < 3; ++a) {
                double em = 0.0;
                for (int m = 0; m < 3; ++m) em += eps3(a, n, m) * y[m];
                gr.dA[i][n][a] = eps3(a, n, i) * g + em * y[i] * gp / r;
            }
    return gr;
}

FieldGradients fd_gradients(const MonopoleConfig& cfg, const Vec3& x, double h) {
    FieldGradients gr{};
    for (int i = 0; i < 3; ++i) {
        Vec3 xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const FieldSample sp = hedgehog_fields(cfg, xp);
        const FieldSample sm = hedgehog_fields(cfg, xm);
        for (int a = 0; a < 3; ++a)
            gr.dphi[i][a] = (sp.phi[a] - sm.phi[a]) / (2.0 * h);
        for (int n = 0; n < 3; ++n)
            for (int a = 0; a < 3; ++a)
                gr.dA[i][n][a] = (sp.A[n][a] - sm.A[n][a]) / (2.0 * h);
    }
    return gr;
}

} // namespace

FieldSample strengths(const MonopoleConfig& cfg, const Vec3& x, DerivMode mode,
                      double h) {
    if (mode == DerivMode::FiniteDifference && h < 1e-12)
        throw DomainError("strengths: FD step underflow");

    FieldSample s = hedgehog_fields(cfg, x);
    const FieldGradients gr = (mode == DerivMode::Analytic)
                                  ? hedgehog_gradients(cfg, x)
                                  : fd_gradients(cfg, x, h);

    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int a = 0; a < 3; ++a) {
                double comm = 0.0;
                for (int b = 0; b < 3; ++b)
                    for (int c = 0; c < 3; ++c)
                        comm += eps3(a, b, c) * s.A[i][b] * s.A[j][c];
                s.F[i][j][a] = gr.dA[i][j][a] - gr.dA[j][i][a] + cfg.e * comm;
            }
    for (int i = 0; i < 3; ++i)
        for (int a = 0; a < 3; ++a) {
            double comm = 0.0;
            for (int b = 0; b < 3; ++b)
                for (int c = 0; c < 3; ++c)
                    comm += eps3(a, b, c) * s.A[i][b] * s.phi[c];
            s.Dphi[i][a] = gr.dphi[i][a] + cfg.e * comm;
        }
    for (int i = 0; i < 3; ++i)
        for (int a = 0; a < 3; ++a) {
            double b = 0.0;
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) b += eps3(i, j, k) * s.F[j][k][a];
            s.B[i][a] = -0.5 * b;
        }
    s.has_strengths = true;
    return s;
}

BogomolnyResidual bogomolny_residual(const MonopoleConfig& cfg,
                                     const GridSpec& grid) {
    if (!cfg.bps())
        throw ModeError("bogomolny_residual: requires the BPS limit lambda_h = 0");

    double res_plus = 0.0, res_minus = 0.0;
    double l2_plus = 0.0, l2_minus = 0.0;
    long n_pts = 0;
    for (int ix = 0; ix < grid.n; ++ix)
        for (int iy = 0; iy < grid.n; ++iy)
            for (int iz = 0; iz < grid.n; ++iz) {
                Vec3 x = {
                    -grid.half_width + 2.0 * grid.half_width * (ix + 0.5) / grid.n,
                    -grid.half_width + 2.0 * grid.half_width * (iy + 0.5) / grid.n,
                    -grid.half_width + 2.0 * grid.half_width * (iz + 0.5) / grid.n};
                if (norm3(sub(x, cfg.center)) < grid.exclusion) continue;
                const FieldSample s = strengths(cfg, x, grid.mode, grid.fd_step);
                double p2 = 0.0, m2 = 0.0;
                for (int i = 0; i < 3; ++i)
                    for (int a = 0; a < 3; ++a) {
                        const double dp = s.B[i][a] - s.Dphi[i][a];
                        const double dm = s.B[i][a] + s.Dphi[i][a];
                        res_plus = std::max(res_plus, std::abs(dp));
                        res_minus = std::max(res_minus, std::abs(dm));
                        p2 += dp * dp;
                        m2 += dm * dm;
                    }
                l2_plus += p2;
                l2_minus += m2;
                ++n_pts;
            }

    BogomolnyResidual out;
    out.n_points = n_pts;
    if (res_plus <= res_minus) {
        out.sign_branch = +1;
        out.max_res = res_plus;
        out.l2_res = std::sqrt(l2_plus / std::max(1L, n_pts));
    } else {
        out.sign_branch = -1;
        out.max_res = res_minus;
        out.l2_res = std::sqrt(l2_minus / std::max(1L, n_pts));
    }
    return out;
}

double energy_density(const MonopoleConfig& cfg, double r) {
    const Vec3 dir = {1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0};
    Vec3 x = cfg.center;
    for (int i = 0; i < 3; ++i) x[i] += r * dir[i];
    const FieldSample s = strengths(cfg, x, DerivMode::Analytic);
    double bb = 0.0, dd = 0.0, pp = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int a = 0; a < 3; ++a) {
            bb += s.B[i][a] * s.B[i][a];
            dd += s.Dphi[i][a] * s.Dphi[i][a];
        }
    for (int a = 0; a < 3; ++a) pp += s.phi[a] * s.phi[a];
    const double pot = cfg.lambda_h / 4.0 * (pp - cfg.v * cfg.v) * (pp - cfg.v * cfg.v);
    return 0.5 * (bb + dd) + pot;
}

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fm, double fb, double tol,
                        int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0)
        throw AccuracyError("adaptive_simpson: max depth reached");
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1);
}

double integrate_radial(const std::function<double(double)>& f, double a,
                        double b, double rel_tol, int max_depth) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double scale = std::max({std::abs(fa), std::abs(fm), std::abs(fb), 1e-30});
    return adaptive_simpson(f, a, b, fa, fm, fb,
                            rel_tol * scale * (b - a), max_depth);
}

} // namespace

ChargeReport energy_and_charge(const MonopoleConfig& cfg, double r_max,
                               const QuadratureSpec& quad) {
    if (r_max * cfg.v * cfg.e < 20.0)
        throw DomainError("energy_and_charge: r_max v e must be >= 20");

    ChargeReport rep;
    auto integrand = [&](double r) {
        return 4.0 * kPi * r * r * energy_density(cfg, r);
    };
    rep.energy_interior =
        integrate_radial(integrand, 0.0, r_max, quad.rel_tol, quad.max_depth);
    // beyond r_max the configuration is exponentially close to the abelian
    // monopole; its Coulomb energy integrates to 4 pi/(e^2 r_max)
    rep.energy_tail = 4.0 * kPi / (cfg.e * cfg.e * r_max);
    rep.M = rep.energy_interior + rep.energy_tail;

    rep.g = winding_flux_sphere(cfg, r_max);
    rep.q = 0.0;
    const double k_est = rep.g * cfg.e / (4.0 * kPi);
    rep.k = int(std::lround(k_est));
    rep.k_distance = std::abs(k_est - rep.k);
    return rep;
}

double winding_flux_sphere(const MonopoleConfig& cfg, double r) {
    // flux of (phi-hat, B) through the sphere of radius r about the center;
    // sampling uniform in cos(theta) integrates the constant hedgehog
    // component exactly
    const int m = 16;
    double tot = 0.0;
    for (int iu = 0; iu < m; ++iu) {
        const double u = -1.0 + 2.0 * (iu + 0.5) / m;
        const double sth = std::sqrt(1.0 - u * u);
        for (int ip = 0; ip < 2 * m; ++ip) {
            const double ph = 2.0 * kPi * (ip + 0.5) / (2 * m);
            const Vec3 nr = {sth * std::cos(ph), sth * std::sin(ph), u};
            Vec3 x = cfg.center;
            for (int i = 0; i < 3; ++i) x[i] += r * nr[i];
            const FieldSample s = strengths(cfg, x, DerivMode::Analytic);
            double pn = 0.0;
            for (int a = 0; a < 3; ++a) pn += s.phi[a] * s.phi[a];
            pn = std::sqrt(pn);
            if (pn == 0.0) continue;
            double br = 0.0;
            for (int i = 0; i < 3; ++i)
                for (int a = 0; a < 3; ++a)
                    br += s.B[i][a] * nr[i] * s.phi[a] / pn;
            tot += br * r * r * (2.0 / m) * (kPi / m);
        }
    }
    return tot;
}

AbelianProjection abelian_projection(const MonopoleConfig& cfg, const Vec3& x,
                                     double h) {
    const FieldSample s0 = hedgehog_fields(cfg, x);
    double a2 = 0.0;
    for (int a = 0; a < 3; ++a) a2 += s0.phi[a] * s0.phi[a];
    const double amag = std::sqrt(a2);
    if (amag < 1e-6 * cfg.v)
        throw DomainError("abelian_projection: |phi| too small (projection singular)");

    // central differences of phi and of the projected potential
    double dphi[3][3];
    double dAe[3][3]; // d_i A^(e)_n
    for (int i = 0; i < 3; ++i) {
        Vec3 xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const FieldSample sp = hedgehog_fields(cfg, xp);
        const FieldSample sm = hedgehog_fields(cfg, xm);
        double ap = 0.0, am = 0.0;
        for (int a = 0; a < 3; ++a) {
            ap += sp.phi[a] * sp.phi[a];
            am += sm.phi[a] * sm.phi[a];
        }
        ap = std::sqrt(ap);
        am = std::sqrt(am);
        for (int a = 0; a < 3; ++a)
            dphi[i][a] = (sp.phi[a] - sm.phi[a]) / (2.0 * h);
        for (int n = 0; n < 3; ++n) {
            double aep = 0.0, aem = 0.0;
            for (int a = 0; a < 3; ++a) {
                aep += sp.A[n][a] * sp.phi[a] / ap;
                aem += sm.A[n][a] * sm.phi[a] / am;
            }
            dAe[i][n] = (aep - aem) / (2.0 * h);
        }
    }

    AbelianProjection out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double topo = 0.0;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    for (int c = 0; c < 3; ++c)
                        topo += eps3(a, b, c) * s0.phi[a] * dphi[i][b] * dphi[j][c];
            out.F[i][j] = dAe[i][j] - dAe[j][i] +
                          topo / (amag * amag * amag * cfg.e);
        }
    for (int k = 0; k < 3; ++k) {
        double b = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) b += eps3(k, i, j) * out.F[i][j];
        out.B[k] = -0.5 * b;
    }

    // printed-form current density: (1/(2 a^3 e)) eps_ijk eps_abc
    // d_i phi^a d_j phi^b d_k phi^c = 3 det(dphi)/(a^3 e)
    const double det =
        dphi[0][0] * (dphi[1][1] * dphi[2][2] - dphi[1][2] * dphi[2][1]) -
        dphi[0][1] * (dphi[1][0] * dphi[2][2] - dphi[1][2] * dphi[2][0]) +
        dphi[0][2] * (dphi[1][0] * dphi[2][1] - dphi[1][1] * dphi[2][0]);
    out.k0 = 3.0 * det / (amag * amag * amag * cfg.e);
    return out;
}

double winding_charge(const MonopoleConfig& cfg, double r, int n_polar) {
    const double hfd = 1e-5;
    double tot = 0.0;
    for (int iu = 0; iu < n_polar; ++iu) {
        const double u = -1.0 + 2.0 * (iu + 0.5) / n_polar;
        const double sth = std::sqrt(1.0 - u * u);
        for (int ip = 0; ip < 2 * n_polar; ++ip) {
            const double ph = 2.0 * kPi * (ip + 0.5) / (2 * n_polar);
            const Vec3 nr = {sth * std::cos(ph), sth * std::sin(ph), u};
            Vec3 x = cfg.center;
            for (int i = 0; i < 3; ++i) x[i] += r * nr[i];

            double phat[3];
            double dphat[3][3];
            {
                const FieldSample s = hedgehog_fields(cfg, x);
                double pn = 0.0;
                for (int a = 0; a < 3; ++a) pn += s.phi[a] * s.phi[a];
                pn = std::sqrt(pn);
                if (pn < 1e-12) throw DomainError("winding_charge: |phi| ~ 0 on sphere");
                for (int a = 0; a < 3; ++a) phat[a] = s.phi[a] / pn;
            }
            for (int i = 0; i < 3; ++i) {
                Vec3 xp = x, xm = x;
                xp[i] += hfd;
                xm[i] -= hfd;
                const FieldSample sp = hedgehog_fields(cfg, xp);
                const FieldSample sm = hedgehog_fields(cfg, xm);
                double np = 0.0, nm = 0.0;
                for (int a = 0; a < 3; ++a) {
                    np += sp.phi[a] * sp.phi[a];
                    nm += sm.phi[a] * sm.phi[a];
                }
                np = std::sqrt(np);
                nm = std::sqrt(nm);
                for (int a = 0; a < 3; ++a)
                    dphat[i][a] = (sp.phi[a] / np - sm.phi[a] / nm) / (2.0 * hfd);
            }
            double w = 0.0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    for (int k = 0; k < 3; ++k) {
                        const double e1 = eps3(i, j, k);
                        if (e1 == 0.0) continue;
                        for (int a = 0; a < 3; ++a)
                            for (int b = 0; b < 3; ++b)
                                for (int c = 0; c < 3; ++c) {
                                    const double e2 = eps3(a, b, c);
                                    if (e2 == 0.0) continue;
                                    w += e1 * e2 * nr[i] * phat[a] * dphat[j][b] *
                                         dphat[k][c];
                                }
                    }
            tot += w / (2.0 * cfg.e) * r * r * (2.0 / n_polar) * (kPi / n_polar);
        }
    }
    return tot;
}

double bogomolny_bound(double v, double g, double q) {
    if (v < 0.0) throw DomainError("bogomolny_bound: v must be nonnegative");
    return v * std::sqrt(g * g + q * q);
}

DiracField dirac_field(int k, const Vec3& x) {
    const double r = norm3(x);
    if (r == 0.0) throw DomainError("dirac_field: r = 0");
    DiracField out;
    out.phi = k / (2.0 * r);
    for (int i = 0; i < 3; ++i) out.B[i] = -k / (2.0 * r * r) * (x[i] / r);
    return out;
}

namespace {

double bump_value(const BumpSpec& b, const Vec3& x) {
    const Vec3 y = sub(x, b.center);
    const double u = norm3(y) / b.width;
    if (u >= 1.0) return 0.0;
    return b.amplitude * std::exp(1.0 - 1.0 / (1.0 - u * u));
}

} // namespace

LinearizedReport linearized_residuals(const MonopoleConfig& cfg,
                                      const BumpSpec& bump, double fd_step) {
    const double excl = 0.1 / (cfg.v * cfg.e);
    if (norm3(sub(bump.center, cfg.center)) - bump.width < excl)
        throw DomainError("linearized_residuals: bump support touches the "
                          "origin exclusion ball");

    // gauge direction (a_i, psi) = (D_i eps, e [phi, eps])
    auto eps_field = [&](const Vec3& x, double out[3]) {
        const double b = bump_value(bump, x);
        for (int a = 0; a < 3; ++a) out[a] = bump.direction[a] * b;
    };
    auto tangent_a = [&](const Vec3& x, double out[3][3]) {
        // out[i][a] = (D_i eps)^a by central differences of eps
        const FieldSample s = hedgehog_fields(cfg, x);
        for (int i = 0; i < 3; ++i) {
            Vec3 xp = x, xm = x;
            xp[i] += fd_step;
            xm[i] -= fd_step;
            double ep[3], em[3], e0[3];
            eps_field(xp, ep);
            eps_field(xm, em);
            eps_field(x, e0);
            for (int a = 0; a < 3; ++a) {
                double comm = 0.0;
                for (int b = 0; b < 3; ++b)
                    for (int c = 0; c < 3; ++c)
                        comm += eps3(a, b, c) * s.A[i][b] * e0[c];
                out[i][a] = (ep[a] - em[a]) / (2.0 * fd_step) + cfg.e * comm;
            }
        }
    };
    auto tangent_psi = [&](const Vec3& x, double out[3]) {
        const FieldSample s = hedgehog_fields(cfg, x);
        double e0[3];
        eps_field(x, e0);
        for (int a = 0; a < 3; ++a) {
            double comm = 0.0;
            for (int b = 0; b < 3; ++b)
                for (int c = 0; c < 3; ++c)
                    comm += eps3(a, b, c) * s.phi[b] * e0[c];
            out[a] = cfg.e * comm;
        }
    };

    auto cov_deriv_a = [&](const Vec3& x, int i, int k, double out[3]) {
        // (D_i a_k)^a
        Vec3 xp = x, xm = x;
        xp[i] += fd_step;
        xm[i] -= fd_step;
        double ap[3][3], am[3][3], a0[3][3];
        tangent_a(xp, ap);
        tangent_a(xm, am);
        tangent_a(x, a0);
        const FieldSample s = hedgehog_fields(cfg, x);
        for (int a = 0; a < 3; ++a) {
            double comm = 0.0;
            for (int b = 0; b < 3; ++b)
                for (int c = 0; c < 3; ++c)
                    comm += eps3(a, b, c) * s.A[i][b] * a0[k][c];
            out[a] = (ap[k][a] - am[k][a]) / (2.0 * fd_step) + cfg.e * comm;
        }
    };

    LinearizedReport rep;
    // sample away from the support edge, where the bump derivatives blow up
    // and finite differences lose accuracy
    const int ns = 4;
    for (int ix = -ns; ix <= ns; ++ix)
        for (int iy = -ns; iy <= ns; ++iy)
            for (int iz = -ns; iz <= ns; ++iz) {
                Vec3 x = bump.center;
                x[0] += 0.8 * bump.width * ix / ns;
                x[1] += 0.8 * bump.width * iy / ns;
                x[2] += 0.8 * bump.width * iz / ns;
                if (norm3(sub(x, bump.center)) > 0.85 * bump.width) continue;

                const FieldSample s = hedgehog_fields(cfg, x);
                double a0[3][3], psi0[3];
                tangent_a(x, a0);
                tangent_psi(x, psi0);

                // covariant derivatives of psi
                double dpsi[3][3];
                for (int i = 0; i < 3; ++i) {
                    Vec3 xp = x, xm = x;
                    xp[i] += fd_step;
                    xm[i] -= fd_step;
                    double pp[3], pm[3];
                    tangent_psi(xp, pp);
                    tangent_psi(xm, pm);
                    for (int a = 0; a < 3; ++a) {
                        double comm = 0.0;
                        for (int b = 0; b < 3; ++b)
                            for (int c = 0; c < 3; ++c)
                                comm += eps3(a, b, c) * s.A[i][b] * psi0[c];
                        dpsi[i][a] = (pp[a] - pm[a]) / (2.0 * fd_step) + cfg.e * comm;
                    }
                }

                double da[3][3][3]; // da[i][k][a] = (D_i a_k)^a
                for (int i = 0; i < 3; ++i)
                    for (int k = 0; k < 3; ++k) cov_deriv_a(x, i, k, da[i][k]);

                // linearized Bogomolny: delta B - delta Dphi
                for (int i = 0; i < 3; ++i)
                    for (int a = 0; a < 3; ++a) {
                        double curl = 0.0;
                        for (int j = 0; j < 3; ++j)
                            for (int k = 0; k < 3; ++k)
                                curl += eps3(i, j, k) * da[j][k][a];
                        double comm = 0.0;
                        for (int b = 0; b < 3; ++b)
                            for (int c = 0; c < 3; ++c)
                                comm += eps3(a, b, c) * a0[i][b] * s.phi[c];
                        const double r1 = -curl - dpsi[i][a] - cfg.e * comm;
                        rep.linearized_residual =
                            std::max(rep.linearized_residual, std::abs(r1));
                    }

                // orthogonality: sum_i (D_i a_i) + e [phi, psi]
                for (int a = 0; a < 3; ++a) {
                    double div = 0.0;
                    for (int i = 0; i < 3; ++i) div += da[i][i][a];
                    double comm = 0.0;
                    for (int b = 0; b < 3; ++b)
                        for (int c = 0; c < 3; ++c)
                            comm += eps3(a, b, c) * s.phi[b] * psi0[c];
                    rep.orthogonality_residual = std::max(
                        rep.orthogonality_residual, std::abs(div + cfg.e * comm));
                }
            }

    // L2 moduli norm over the bump bounding box (Simpson, 21^3)
    const int m = 20;
    double acc = 0.0;
    const double hq = 2.0 * bump.width / m;
    auto simpson_w = [m](int i) {
        if (i == 0 || i == m) return 1.0;
        return (i % 2 == 1) ? 4.0 : 2.0;
    };
    for (int ix = 0; ix <= m; ++ix)
        for (int iy = 0; iy <= m; ++iy)
            for (int iz = 0; iz <= m; ++iz) {
                Vec3 x = bump.center;
                x[0] += -bump.width + hq * ix;
                x[1] += -bump.width + hq * iy;
                x[2] += -bump.width + hq * iz;
                if (norm3(sub(x, bump.center)) >= bump.width) continue;
                double a0[3][3], psi0[3];
                tangent_a(x, a0);
                tangent_psi(x, psi0);
                double d = 0.0;
                for (int i = 0; i < 3; ++i)
                    for (int a = 0; a < 3; ++a) d += a0[i][a] * a0[i][a];
                for (int a = 0; a < 3; ++a) d += psi0[a] * psi0[a];
                acc += simpson_w(ix) * simpson_w(iy) * simpson_w(iz) * d;
            }
    rep.l2_norm = std::sqrt(acc * hq * hq * hq / 27.0);
    return rep;
}

} // namespace halphen::bps
