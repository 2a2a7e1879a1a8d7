#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "halphen/ah_geodesics.hpp"
#include "halphen/line_scattering.hpp"
#include "halphen/rational_map.hpp"
#include "halphen/schrodinger.hpp"

using namespace halphen;
using moduli::Coord4;
using moduli::RationalMap;

TEST_CASE("rational map construction and k=2 closed-form resultant") {
    auto m1 = RationalMap::make(2, {1.0, 0.0}, {5.0, 0.0});
    CHECK(std::abs(m1.resultant() - cdouble(1.0)) < 1e-12);

    auto m2 = RationalMap::make(2, {1.0, 2.0}, {3.0, 0.0});
    CHECK(std::abs(m2.resultant() - cdouble(13.0)) < 1e-12);

    // shared root at z = 0: S = z/z^2
    CHECK_THROWS_AS(RationalMap::make(2, {0.0, 1.0}, {0.0, 0.0}),
                    DegenerateMapError);
}

TEST_CASE("Sylvester equals a0^2 + b0 a1^2 on seeded random triples") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    for (int i = 0; i < 100; ++i) {
        const cdouble a0(d(rng), d(rng)), a1(d(rng), d(rng)), b0(d(rng), d(rng));
        const cdouble closed = a0 * a0 + b0 * a1 * a1;
        const cdouble syl = moduli::sylvester_resultant({a0, a1}, {b0, 0.0});
        CHECK(std::abs(syl - closed) <=
              1e-12 * std::max(1.0, std::abs(closed)));
    }
}

TEST_CASE("resultant vanishes iff a root is shared (planted roots)") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> d(-1.5, 1.5);
    for (int i = 0; i < 25; ++i) {
        const cdouble w(d(rng), d(rng));
        // p(z) = a1 (z - w), q(z) = (z - w)(z - u) monic
        const cdouble u(d(rng), d(rng));
        const cdouble a1(d(rng), d(rng));
        std::vector<cdouble> a = {-a1 * w, a1};
        std::vector<cdouble> b = {w * u, -(w + u)};
        const cdouble syl = moduli::sylvester_resultant(a, b);
        CHECK(std::abs(syl) < 1e-12 * std::max(1.0, std::abs(a1) * 4.0));
        CHECK_THROWS_AS(RationalMap::make(2, a, b), DegenerateMapError);
    }
}

TEST_CASE("k2 surface membership and involution representative") {
    auto p1 = moduli::k2_surface(1.0, 0.0, 42.0);
    CHECK(p1.on_surface);
    CHECK(p1.residual == 0.0);

    auto p2 = moduli::k2_surface(-1.0, 0.0, 5.0);
    CHECK(p2.representative[0] == cdouble(1.0));
    CHECK(p2.representative[1] == cdouble(0.0));
    CHECK(p2.representative[2] == cdouble(5.0));

    auto p3 = moduli::k2_surface(3.0, 2.0, 2.0);
    CHECK(p3.on_surface); // 9 - 2*4 = 1
}

namespace {

geom::CoframeMetric ah_metric() {
    return geom::CoframeMetric::build(dh::ah_provider(), 0.5, 3.4, 400);
}

} // namespace

TEST_CASE("AH coordinate metric: structure, determinant, positivity") {
    auto m = ah_metric();

    SUBCASE("beta-psi block diagonal at alpha = pi/2 for isotropic triads") {
        auto mi = geom::CoframeMetric::build(dh::isotropic_provider(), 0.0, 4.0);
        auto g = moduli::ah_metric_at(mi, {1.0, kPi / 2, 0.3, 1.1});
        CHECK(std::abs(g[2][3]) < 1e-14); // d beta . d psi term: cos(alpha) = 0
    }

    SUBCASE("determinant equals product of coefficients times sin^2 alpha") {
        const Coord4 p = {1.7, 1.1, 0.4, 2.0};
        auto g = moduli::ah_metric_at(m, p);
        auto c = m.coefficients(p[0]);
        const double expect = c.fsq[0] * c.fsq[1] * c.fsq[2] * c.fsq[3] *
                              std::sin(p[1]) * std::sin(p[1]);
        CHECK(moduli::metric_determinant(g) ==
              doctest::Approx(expect).epsilon(1e-10));
    }

    SUBCASE("unit lapse gauge drops f0^2") {
        const Coord4 p = {2.0, 1.0, 0.2, 0.9};
        auto gt = moduli::ah_metric_at(m, p, moduli::LapseGauge::Theta);
        auto gu = moduli::ah_metric_at(m, p, moduli::LapseGauge::Unit);
        CHECK(gu[0][0] == doctest::Approx(1.0));
        CHECK(gt[1][1] == doctest::Approx(gu[1][1]));
    }

    SUBCASE("symmetry and positive definiteness at random chart points") {
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> ut(0.6, 3.2), ua(0.2, kPi - 0.2),
            ub(0.0, 2 * kPi), up(0.0, 4 * kPi);
        for (int i = 0; i < 100; ++i) {
            const Coord4 p = {ut(rng), ua(rng), ub(rng), up(rng)};
            auto g = moduli::ah_metric_at(m, p);
            Eigen::Matrix4d M;
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) M(r, c) = g[r][c];
            CHECK((M - M.transpose()).norm() < 1e-14);
            Eigen::LLT<Eigen::Matrix4d> llt(M);
            CHECK(llt.info() == Eigen::Success);
        }
    }
}

TEST_CASE("geodesics on the AH metric") {
    auto m = ah_metric();

    SUBCASE("zero initial velocity stays put") {
        moduli::GeodesicState init;
        init.x = {2.0, 1.2, 0.5, 1.0};
        init.v = {0, 0, 0, 0};
        auto res = moduli::geodesic_integrate(m, init, 1.0);
        CHECK_FALSE(res.boundary_exit);
        const auto& last = res.samples.back();
        for (int i = 0; i < 4; ++i) {
            CHECK(last.state.x[i] == doctest::Approx(init.x[i]).epsilon(1e-12));
            CHECK(std::abs(last.state.v[i]) < 1e-12);
        }
    }

    SUBCASE("conservation over arc length 10") {
        moduli::GeodesicState init;
        init.x = {2.6, 1.3, 0.4, 0.7};
        init.v = {0.0, 0.25, 0.35, 0.2};
        // normalize to unit speed
        auto g = moduli::ah_metric_at(m, init.x);
        const double n2 = moduli::metric_norm2(g, init.v);
        for (auto& c : init.v) c /= std::sqrt(n2);

        moduli::GeodesicOptions opt;
        opt.tol = 1e-10;
        auto res = moduli::geodesic_integrate(m, init, 10.0, opt);
        CHECK(res.s_end == doctest::Approx(10.0));
        CHECK(res.norm2_drift < 1e-8);
        CHECK(res.p_beta_drift < 1e-8);
    }

    SUBCASE("purely radial geodesic matches the 1-d quadrature") {
        // isotropic provider: radial motion obeys f0(t) dt/ds = const
        auto mi = geom::CoframeMetric::build(dh::isotropic_provider(), 0.0, 6.0);
        moduli::GeodesicState init;
        init.x = {1.0, 1.2, 0.5, 1.0};
        auto g0 = moduli::ah_metric_at(mi, init.x);
        init.v = {1.0 / std::sqrt(g0[0][0]), 0, 0, 0}; // unit speed, outward

        moduli::GeodesicOptions opt;
        opt.tol = 1e-11;
        const double arc = 0.5;
        auto res = moduli::geodesic_integrate(mi, init, arc, opt);
        const double t_end = res.samples.back().state.x[0];

        // oracle: s(t) = int_t0^t f0 du with f0 = (1+u)^{-3/2}, closed form
        // s(t) = 2[(1+t0)^{-1/2} - (1+t)^{-1/2}]
        auto s_of = [&](double t) {
            return 2.0 * (1.0 / std::sqrt(1.0 + init.x[0]) - 1.0 / std::sqrt(1.0 + t));
        };
        // invert by bisection
        double lo = init.x[0], hi = 6.0;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (s_of(mid) < arc ? lo : hi) = mid;
        }
        CHECK(std::abs(t_end - lo) < 1e-7);
    }

    SUBCASE("domain exit reports instead of failing") {
        moduli::GeodesicState init;
        init.x = {3.3, 1.3, 0.4, 0.7};
        init.v = {1.0, 0, 0, 0}; // run off the positivity window
        auto g = moduli::ah_metric_at(m, init.x);
        init.v[0] = 1.0 / std::sqrt(g[0][0]);
        auto res = moduli::geodesic_integrate(m, init, 10.0);
        CHECK(res.boundary_exit);
        CHECK(res.s_end < 10.0);
    }
}

TEST_CASE("radial Schrodinger eigenproblem") {
    SUBCASE("constant coefficients: E_n = n^2/pi on [0, pi]") {
        auto prob = moduli::constant_coefficient_problem(kPi, 2000);
        auto spec = moduli::solve_radial_schrodinger(prob, 6);
        for (int n = 1; n <= 6; ++n)
            CHECK(spec.energies[n - 1] ==
                  doctest::Approx(n * n / kPi).epsilon(1e-3));
    }

    SUBCASE("second-order grid convergence") {
        auto e_at = [](int n) {
            auto prob = moduli::constant_coefficient_problem(kPi, n);
            return moduli::solve_radial_schrodinger(prob, 1).energies[0];
        };
        const double exact = 1.0 / kPi;
        const double e1 = std::abs(e_at(250) - exact);
        const double e2 = std::abs(e_at(500) - exact);
        CHECK(e1 / e2 > 3.5);
        CHECK(e1 / e2 < 4.5);
    }

    SUBCASE("AH preset: ordering, nodelessness, weighted orthogonality") {
        auto prob = moduli::ah_problem(0.6, 3.2, 800);
        auto spec = moduli::solve_radial_schrodinger(prob, 5);
        for (int i = 0; i + 1 < 5; ++i)
            CHECK(spec.energies[i] < spec.energies[i + 1]);

        // ground state has no interior sign change
        int sign_changes = 0;
        const auto& g0 = spec.modes[0];
        for (std::size_t i = 1; i < g0.size(); ++i)
            if (g0[i - 1] * g0[i] < 0.0) ++sign_changes;
        CHECK(sign_changes == 0);

        // discrete weighted inner products
        const double h = spec.grid[1] - spec.grid[0];
        for (int a = 0; a < 5; ++a)
            for (int b = a + 1; b < 5; ++b) {
                double ip = 0.0;
                for (std::size_t i = 0; i < spec.grid.size(); ++i)
                    ip += spec.weight[i] * spec.modes[a][i] * spec.modes[b][i] * h;
                CHECK(std::abs(ip) < 1e-10);
            }
    }

    SUBCASE("refinement keeps the ordering stable") {
        auto p1 = moduli::ah_problem(0.6, 3.2, 400);
        auto p2 = moduli::ah_problem(0.6, 3.2, 800);
        auto s1 = moduli::solve_radial_schrodinger(p1, 4);
        auto s2 = moduli::solve_radial_schrodinger(p2, 4);
        for (int i = 0; i < 4; ++i)
            CHECK(s1.energies[i] ==
                  doctest::Approx(s2.energies[i]).epsilon(1e-3));
    }

    SUBCASE("argument validation") {
        auto prob = moduli::constant_coefficient_problem(1.0, 50);
        CHECK_THROWS_AS(moduli::solve_radial_schrodinger(prob, 49), DomainError);
    }
}

TEST_CASE("line scattering" * doctest::timeout(300)) {
    bps::MonopoleConfig cfg;
    moduli::ScatterOptions opt;
    opt.T = 14.0;
    opt.rtol = 1e-11;
    opt.levels = 6;

    SUBCASE("vacuum: trivial k = 0 sector") {
        auto fields = moduli::vacuum_field_map(1.0, {0.0, 0.0, 1.0});
        auto res = moduli::fit_line_scattering(fields, opt);
        CHECK(res.trivial);
        CHECK_FALSE(res.map.has_value());
    }

    SUBCASE("centered hedgehog: single pole near z = 0") {
        auto res = moduli::fit_line_scattering(moduli::hedgehog_field_map(cfg), opt);
        CHECK_FALSE(res.trivial);
        CHECK(std::abs(res.winding) == 1);
        CHECK(std::abs(res.pole) < 0.05);
        REQUIRE(res.map.has_value());
        CHECK(res.map->degree() == 1);
        // structural degree check: numerator is a constant
        CHECK(res.map->numerator().size() == 1);
    }

    SUBCASE("transverse translation moves the pole accordingly") {
        bps::MonopoleConfig moved = cfg;
        moved.center = {0.5, 0.0, 0.0};
        auto res =
            moduli::fit_line_scattering(moduli::hedgehog_field_map(moved), opt);
        CHECK_FALSE(res.trivial);
        CHECK(std::abs(res.pole - cdouble(0.5, 0.0)) < 0.05);
    }
}
