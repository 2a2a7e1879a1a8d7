#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "halphen/bps_monopole.hpp"

using namespace halphen;
using bps::DerivMode;
using bps::MonopoleConfig;
using bps::Vec3;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

TEST_CASE("profile limits and closed-form values") {
    auto p0 = bps::bps_profiles(1e-6);
    CHECK(std::abs(p0.H) < 1e-10);
    CHECK(std::abs(p0.K - 1.0) < 1e-10);

    auto p1 = bps::bps_profiles(1.0);
    // high-precision closed-form references: coth(1)-1, 1/sinh(1)
    CHECK(p1.H == doctest::Approx(0.3130352854993313).epsilon(1e-12));
    CHECK(p1.K == doctest::Approx(0.8509181282393216).epsilon(1e-12));

    auto p30 = bps::bps_profiles(30.0);
    CHECK(std::abs(p30.H - 29.0) < 1e-10);
    CHECK(std::abs(p30.K) < 1e-10);
}

TEST_CASE("profile series branch joins the closed form smoothly") {
    // straddle the branch switch so the function difference is dominated by
    // any method mismatch rather than by H' dxi
    const double a = 1e-4 * (1.0 - 1e-9), b = 1e-4 * (1.0 + 1e-9);
    auto pa = bps::bps_profiles(a);
    auto pb = bps::bps_profiles(b);
    CHECK(std::abs(pa.H - pb.H) < 1e-13);
    CHECK(std::abs(pa.K - pb.K) < 1e-13);
}

TEST_CASE("hedgehog fields: alignment, origin limit, asymptotics") {
    MonopoleConfig cfg;
    SUBCASE("hedgehog alignment phi^a x^b = phi^b x^a") {
        const Vec3 x = {0.3, -1.1, 0.7};
        auto s = bps::hedgehog_fields(cfg, x);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                CHECK(std::abs(s.phi[a] * x[b] - s.phi[b] * x[a]) < 1e-14);
    }
    SUBCASE("origin limit phi ~ x v^2 e / 3") {
        const Vec3 x = {1e-5, 2e-5, -1e-5};
        auto s = bps::hedgehog_fields(cfg, x);
        for (int a = 0; a < 3; ++a)
            CHECK(s.phi[a] == doctest::Approx(x[a] / 3.0).epsilon(1e-8));
    }
    SUBCASE("|phi| -> v (coth xi - 1/xi) at xi = 30") {
        const double r = 30.0;
        const Vec3 x = {r, 0.0, 0.0};
        auto s = bps::hedgehog_fields(cfg, x);
        const double mag = std::sqrt(s.phi[0] * s.phi[0] + s.phi[1] * s.phi[1] +
                                     s.phi[2] * s.phi[2]);
        CHECK(mag == doctest::Approx(1.0 - 1.0 / 30.0).epsilon(1e-8));
    }
}

TEST_CASE("strengths: analytic vs finite differences") {
    MonopoleConfig cfg;
    const Vec3 x = {1.0 / 3, 2.0 / 3, 2.0 / 3};
    auto sa = bps::strengths(cfg, x, DerivMode::Analytic);
    auto sf = bps::strengths(cfg, x, DerivMode::FiniteDifference, 1e-4);
    double dev = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int a = 0; a < 3; ++a)
                dev = std::max(dev, std::abs(sa.F[i][j][a] - sf.F[i][j][a]));
    for (int i = 0; i < 3; ++i)
        for (int a = 0; a < 3; ++a)
            dev = std::max(dev, std::abs(sa.Dphi[i][a] - sf.Dphi[i][a]));
    CHECK(dev < 1e-7);

    // F antisymmetry is structural
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int a = 0; a < 3; ++a)
                CHECK(sa.F[i][j][a] == -sa.F[j][i][a]);

    CHECK_THROWS_AS(bps::strengths(cfg, x, DerivMode::FiniteDifference, 1e-13),
                    DomainError);
}

TEST_CASE("gauge covariance under a constant rotation") {
    MonopoleConfig cfg;
    const Vec3 x = {0.8, -0.2, 0.5};
    auto s = bps::strengths(cfg, x, DerivMode::Analytic);

    // rotation about (1,1,1)/sqrt 3 by 0.7 rad
    const double c = std::cos(0.7), sn = std::sin(0.7);
    const double u[3] = {1 / std::sqrt(3.0), 1 / std::sqrt(3.0), 1 / std::sqrt(3.0)};
    double R[3][3];
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            double eps_term = 0.0;
            for (int m = 0; m < 3; ++m)
                eps_term += double((a - b) * (b - m) * (m - a)) / 2.0 * u[m];
            R[a][b] = c * (a == b ? 1.0 : 0.0) + (1 - c) * u[a] * u[b] -
                      sn * eps_term;
        }

    // rotated scalars: |phi|, Tr F^2 and the energy density are invariant
    double phi2 = 0.0, phi2r = 0.0;
    double f2 = 0.0, f2r = 0.0;
    double rphi[3] = {0, 0, 0};
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) rphi[a] += R[a][b] * s.phi[b];
    for (int a = 0; a < 3; ++a) {
        phi2 += s.phi[a] * s.phi[a];
        phi2r += rphi[a] * rphi[a];
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double fr[3] = {0, 0, 0};
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) fr[a] += R[a][b] * s.F[i][j][b];
            for (int a = 0; a < 3; ++a) {
                f2 += s.F[i][j][a] * s.F[i][j][a];
                f2r += fr[a] * fr[a];
            }
        }
    CHECK(std::abs(phi2 - phi2r) < 1e-12);
    CHECK(std::abs(f2 - f2r) < 1e-12);
}

TEST_CASE("Bogomolny residual of the BPS hedgehog") {
    MonopoleConfig cfg;
    SUBCASE("analytic derivatives: residual at machine level") {
        bps::GridSpec grid;
        grid.n = 12;
        auto res = bps::bogomolny_residual(cfg, grid);
        CHECK(res.max_res < 1e-10);
        CHECK(res.sign_branch == +1);
    }
    SUBCASE("pointwise over the radial range [0.1, 40]") {
        for (double r : {0.1, 0.5, 2.0, 10.0, 40.0}) {
            const Vec3 x = {r / 3.0, 2.0 * r / 3.0, 2.0 * r / 3.0};
            auto s = bps::strengths(cfg, x, DerivMode::Analytic);
            double dev = 0.0;
            for (int i = 0; i < 3; ++i)
                for (int a = 0; a < 3; ++a)
                    dev = std::max(dev, std::abs(s.B[i][a] - s.Dphi[i][a]));
            CHECK(dev < 1e-10);
        }
    }
    SUBCASE("FD mode converges at second order") {
        auto res_at = [&](double h) {
            bps::GridSpec grid;
            grid.n = 6;
            grid.mode = DerivMode::FiniteDifference;
            grid.fd_step = h;
            return bps::bogomolny_residual(cfg, grid).max_res;
        };
        const double r1 = res_at(1e-2), r2 = res_at(5e-3);
        CHECK(r1 / r2 > 3.5);
        CHECK(r1 / r2 < 4.5);
    }
    SUBCASE("non-BPS profile (H, K^2) is discriminated") {
        MonopoleConfig broken;
        broken.profile = [](double xi) {
            bps::Profiles p = bps::bps_profiles(xi);
            p.dK = 2.0 * p.K * p.dK;
            p.K = p.K * p.K;
            return p;
        };
        bps::GridSpec grid;
        grid.n = 8;
        auto res = bps::bogomolny_residual(broken, grid);
        CHECK(res.max_res > 1e-2);
    }
    SUBCASE("non-BPS mode rejected") {
        MonopoleConfig massive;
        massive.lambda_h = 0.1;
        CHECK_THROWS_AS(bps::bogomolny_residual(massive, bps::GridSpec{}),
                        ModeError);
    }
}

TEST_CASE("energy and charge of the unit BPS monopole") {
    MonopoleConfig cfg;
    auto rep = bps::energy_and_charge(cfg, 40.0);
    CHECK(rep.M == doctest::Approx(4.0 * kPi).epsilon(0.005));
    CHECK(rep.g / (4.0 * kPi) == doctest::Approx(1.0).epsilon(0.01));
    CHECK(rep.k == 1);
    CHECK(rep.k_distance < 0.01);

    SUBCASE("doubling v doubles the energy") {
        MonopoleConfig cfg2;
        cfg2.v = 2.0;
        auto rep2 = bps::energy_and_charge(cfg2, 40.0);
        CHECK(rep2.M == doctest::Approx(2.0 * rep.M).epsilon(0.005));
    }
    SUBCASE("Bogomolny bound saturation") {
        CHECK(bps::bogomolny_bound(cfg.v, rep.g, 0.0) ==
              doctest::Approx(rep.M).epsilon(0.005));
    }
    SUBCASE("r_max precondition") {
        CHECK_THROWS_AS(bps::energy_and_charge(cfg, 10.0), DomainError);
    }
}

TEST_CASE("bogomolny_bound arithmetic") {
    CHECK(bps::bogomolny_bound(1, 1, 0) == doctest::Approx(1.0));
    CHECK(bps::bogomolny_bound(2, 3, 4) == doctest::Approx(10.0));
    CHECK(bps::bogomolny_bound(1, 4 * kPi, 0) == doctest::Approx(4 * kPi));
}

TEST_CASE("abelian projection") {
    MonopoleConfig cfg;
    SUBCASE("far-field radial magnetic field ~ 1/(e r^2)") {
        const double r = 30.0;
        const Vec3 x = {r / 3.0, 2.0 * r / 3.0, 2.0 * r / 3.0};
        auto pr = bps::abelian_projection(cfg, x);
        const double bmag =
            std::sqrt(pr.B[0] * pr.B[0] + pr.B[1] * pr.B[1] + pr.B[2] * pr.B[2]);
        CHECK(bmag == doctest::Approx(1.0 / (r * r)).epsilon(0.01));
    }
    SUBCASE("projected F_xy on the z-axis matches the Dirac k=2 field") {
        const Vec3 x = {0.0, 0.0, 3.0};
        auto pr = bps::abelian_projection(cfg, x);
        auto dirac = bps::dirac_field(2, x);
        // F_xy = -B_z for the abelian field
        CHECK(pr.F[0][1] == doctest::Approx(-dirac.B[2]).epsilon(0.01));
    }
    SUBCASE("winding charge equals 4 pi / e within 2%") {
        const double q = bps::winding_charge(cfg, 2.0);
        CHECK(q == doctest::Approx(4.0 * kPi).epsilon(0.02));
    }
    SUBCASE("projection singular near the zero of phi") {
        CHECK_THROWS_AS(bps::abelian_projection(cfg, {1e-9, 0.0, 0.0}),
                        DomainError);
    }
}

TEST_CASE("dirac field") {
    SUBCASE("flux through the unit sphere is -2 pi k") {
        // analytic: B_r = -k/(2 r^2); flux = -2 pi k.  quadrature uniform in
        // cos(theta) is exact for the constant radial component
        for (int k : {1, 2}) {
            const int m = 24;
            double flux = 0.0;
            for (int iu = 0; iu < m; ++iu) {
                const double u = -1.0 + 2.0 * (iu + 0.5) / m;
                const double sth = std::sqrt(1.0 - u * u);
                for (int ip = 0; ip < 2 * m; ++ip) {
                    const double ph = 2.0 * kPi * (ip + 0.5) / (2 * m);
                    const Vec3 n = {sth * std::cos(ph), sth * std::sin(ph), u};
                    auto d = bps::dirac_field(k, n);
                    const double br =
                        d.B[0] * n[0] + d.B[1] * n[1] + d.B[2] * n[2];
                    flux += br * (2.0 / m) * (kPi / m);
                }
            }
            CHECK(flux == doctest::Approx(-2.0 * kPi * k).epsilon(1e-9));
        }
    }
    SUBCASE("B = grad phi by central differences") {
        const Vec3 x = {1.0, 1.0, 1.0};
        auto d = bps::dirac_field(1, x);
        const double h = 1e-6;
        for (int i = 0; i < 3; ++i) {
            Vec3 xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            const double g = (bps::dirac_field(1, xp).phi -
                              bps::dirac_field(1, xm).phi) /
                             (2.0 * h);
            CHECK(std::abs(g - d.B[i]) < 1e-8);
        }
    }
    CHECK_THROWS_AS(bps::dirac_field(1, {0, 0, 0}), DomainError);
}

TEST_CASE("linearized Bogomolny residuals on a gauge direction") {
    MonopoleConfig cfg;
    // keep the support away from the core so field derivatives stay mild on
    // the FD stencil
    bps::BumpSpec bump;
    bump.center = {0.0, 0.0, 2.2};
    bump.width = 1.4;

    auto rep = bps::linearized_residuals(cfg, bump);
    CHECK(rep.linearized_residual < 1e-6);
    CHECK(rep.orthogonality_residual > 1e-3);
    CHECK(rep.l2_norm > 0.0);

    SUBCASE("zero tangent") {
        bps::BumpSpec zero = bump;
        zero.amplitude = 0.0;
        auto r0 = bps::linearized_residuals(cfg, zero);
        CHECK(r0.linearized_residual == 0.0);
        CHECK(r0.orthogonality_residual == 0.0);
        CHECK(r0.l2_norm == 0.0);
    }
    SUBCASE("support touching the origin exclusion ball") {
        bps::BumpSpec bad = bump;
        bad.center = {0.0, 0.0, 0.5};
        CHECK_THROWS_AS(bps::linearized_residuals(cfg, bad), DomainError);
    }
}
