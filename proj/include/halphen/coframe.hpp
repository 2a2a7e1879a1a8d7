#ifndef HALPHEN_COFRAME_HPP
#define HALPHEN_COFRAME_HPP

#include <array>
#include <cmath>

namespace halphen::geom {

/// Forms over the invariant basis {dt, s1, s2, s3} on M3 x R, with t-only
/// coefficients.  Each 1-form coefficient carries its t-derivative so that
/// exterior derivatives stay algebraic:
///   d(c0(t) dt) = 0,
///   d(ci(t) s^i) = ci' dt^s^i + ci ds^i,   ds^i = -(1/2) eps_ijk s^j^s^k.

struct OneForm {
    double dt = 0.0;
    std::array<double, 3> sig{};
    double dt_dot = 0.0;
    std::array<double, 3> sig_dot{};

    OneForm operator-() const {
        OneForm o;
        o.dt = -dt;
        o.dt_dot = -dt_dot;
        for (int i = 0; i < 3; ++i) {
            o.sig[i] = -sig[i];
            o.sig_dot[i] = -sig_dot[i];
        }
        return o;
    }
};

/// 2-form components: dts[i] multiplies dt^s^i, ss[i] multiplies s^j^s^k for
/// (i,j,k) cyclic.
struct TwoForm {
    std::array<double, 3> dts{};
    std::array<double, 3> ss{};

    TwoForm& axpy(const TwoForm& o, double a) {
        for (int i = 0; i < 3; ++i) {
            dts[i] += a * o.dts[i];
            ss[i] += a * o.ss[i];
        }
        return *this;
    }
    double max_abs() const {
        double m = 0.0;
        for (int i = 0; i < 3; ++i) {
            m = std::max(m, std::abs(dts[i]));
            m = std::max(m, std::abs(ss[i]));
        }
        return m;
    }
};

/// 3-form components: dtss[i] multiplies dt^s^j^s^k (cyclic), vol multiplies
/// s^1^s^2^s^3.
struct ThreeForm {
    std::array<double, 3> dtss{};
    double vol = 0.0;
    double max_abs() const {
        double m = std::abs(vol);
        for (int i = 0; i < 3; ++i) m = std::max(m, std::abs(dtss[i]));
        return m;
    }
};

inline TwoForm exterior_d(const OneForm& w) {
    TwoForm out;
    for (int i = 0; i < 3; ++i) {
        out.dts[i] += w.sig_dot[i];
        out.ss[i] -= w.sig[i];
    }
    return out;
}

inline TwoForm wedge(const OneForm& a, const OneForm& b) {
    TwoForm out;
    for (int i = 0; i < 3; ++i) {
        out.dts[i] = a.dt * b.sig[i] - a.sig[i] * b.dt;
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        out.ss[i] = a.sig[j] * b.sig[k] - a.sig[k] * b.sig[j];
    }
    return out;
}

inline ThreeForm wedge(const TwoForm& T, const OneForm& w) {
    ThreeForm out;
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        out.dtss[i] = T.dts[j] * w.sig[k] - T.dts[k] * w.sig[j] + T.ss[i] * w.dt;
        out.vol += T.ss[i] * w.sig[i];
    }
    return out;
}

} // namespace halphen::geom

#endif
