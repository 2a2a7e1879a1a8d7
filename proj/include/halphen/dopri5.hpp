#ifndef HALPHEN_DOPRI5_HPP
#define HALPHEN_DOPRI5_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "halphen/errors.hpp"

namespace halphen::ode {

/// Dormand-Prince 5(4) with the classic order-4 continuous extension.
/// Works in either time direction; steps are signed.

struct IntegratorOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double max_step = 0.0;        // 0 = no cap
    double blowup_guard = 1e12;   // |y_i| above this is a finite-time singularity
    long max_steps = 2'000'000;
};

struct IntegratorStats {
    long n_steps = 0;
    long n_rejected = 0;
    double rtol = 0.0;
    double atol = 0.0;
};

template <std::size_t N>
using State = std::array<double, N>;

template <std::size_t N>
struct DenseStep {
    double t0 = 0.0;
    double h = 0.0;
    std::array<State<N>, 5> cont{};
};

/// Piecewise continuous solution; evaluation clamps to the covered span.
template <std::size_t N>
class DenseTrajectory {
public:
    double t_begin() const { return t_begin_; }
    double t_end() const { return t_end_; }
    const IntegratorStats& stats() const { return stats_; }
    std::size_t size() const { return steps_.size(); }

    State<N> at(double t) const {
        if (steps_.empty())
            throw DomainError("DenseTrajectory: empty");
        const double dir = (t_end_ >= t_begin_) ? 1.0 : -1.0;
        // binary search on signed time
        std::size_t lo = 0, hi = steps_.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            const DenseStep<N>& s = steps_[mid];
            if ((t - (s.t0 + s.h)) * dir > 0.0)
                lo = mid + 1;
            else
                hi = mid;
        }
        const DenseStep<N>& s = steps_[lo];
        double theta = (t - s.t0) / s.h;
        theta = std::min(1.0, std::max(0.0, theta));
        const double th1 = 1.0 - theta;
        State<N> y;
        for (std::size_t i = 0; i < N; ++i) {
            y[i] = s.cont[0][i] +
                   theta * (s.cont[1][i] +
                            th1 * (s.cont[2][i] +
                                   theta * (s.cont[3][i] + th1 * s.cont[4][i])));
        }
        return y;
    }

    template <std::size_t M>
    friend class Builder;

    std::vector<DenseStep<N>> steps_;
    double t_begin_ = 0.0, t_end_ = 0.0;
    IntegratorStats stats_;
};

namespace dp5 {
// Butcher tableau
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                        a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - bhat (embedded 4th order error coefficients)
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense output
inline constexpr double d1 = -12715105075.0 / 11282082432.0;
inline constexpr double d3 = 87487479700.0 / 32700410799.0;
inline constexpr double d4 = -10690763975.0 / 1880347072.0;
inline constexpr double d5 = 701980252875.0 / 199316789632.0;
inline constexpr double d6 = -1453857185.0 / 822651844.0;
inline constexpr double d7 = 69997945.0 / 29380423.0;
} // namespace dp5

/// Integrate y' = f(t, y) from t0 to t1 and record the continuous extension.
template <std::size_t N, typename F>
DenseTrajectory<N> integrate(F&& f, State<N> y0, double t0, double t1,
                             const IntegratorOptions& opt = {}) {
    if (t1 == t0)
        throw DomainError("integrate: empty time interval");

    DenseTrajectory<N> traj;
    traj.t_begin_ = t0;
    traj.t_end_ = t1;
    traj.stats_.rtol = opt.rtol;
    traj.stats_.atol = opt.atol;

    const double dir = (t1 > t0) ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);

    auto guard = [&](const State<N>& y, double t) {
        for (std::size_t i = 0; i < N; ++i)
            if (!std::isfinite(y[i]) || std::abs(y[i]) > opt.blowup_guard)
                throw SingularityError("integrate: solution escaped blow-up guard", t);
    };

    State<N> y = y0;
    guard(y, t0);
    State<N> k1 = f(t0, y);

    double h = dir * std::min(1e-2 * span, 1e-2);
    if (opt.max_step > 0.0) h = dir * std::min(std::abs(h), opt.max_step);
    double t = t0;

    while ((t1 - t) * dir > 0.0) {
        if (traj.stats_.n_steps + traj.stats_.n_rejected > opt.max_steps)
            throw AccuracyError("integrate: step budget exhausted");
        if ((t + h - t1) * dir > 0.0) h = t1 - t;

        State<N> y2, y3, y4, y5, y6, y7;
        for (std::size_t i = 0; i < N; ++i)
            y2[i] = y[i] + h * dp5::a21 * k1[i];
        State<N> k2 = f(t + dp5::c2 * h, y2);
        for (std::size_t i = 0; i < N; ++i)
            y3[i] = y[i] + h * (dp5::a31 * k1[i] + dp5::a32 * k2[i]);
        State<N> k3 = f(t + dp5::c3 * h, y3);
        for (std::size_t i = 0; i < N; ++i)
            y4[i] = y[i] + h * (dp5::a41 * k1[i] + dp5::a42 * k2[i] + dp5::a43 * k3[i]);
        State<N> k4 = f(t + dp5::c4 * h, y4);
        for (std::size_t i = 0; i < N; ++i)
            y5[i] = y[i] + h * (dp5::a51 * k1[i] + dp5::a52 * k2[i] +
                                dp5::a53 * k3[i] + dp5::a54 * k4[i]);
        State<N> k5 = f(t + dp5::c5 * h, y5);
        for (std::size_t i = 0; i < N; ++i)
            y6[i] = y[i] + h * (dp5::a61 * k1[i] + dp5::a62 * k2[i] +
                                dp5::a63 * k3[i] + dp5::a64 * k4[i] + dp5::a65 * k5[i]);
        State<N> k6 = f(t + h, y6);
        for (std::size_t i = 0; i < N; ++i)
            y7[i] = y[i] + h * (dp5::b1 * k1[i] + dp5::b3 * k3[i] + dp5::b4 * k4[i] +
                                dp5::b5 * k5[i] + dp5::b6 * k6[i]);
        State<N> k7 = f(t + h, y7); // FSAL

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            double ei = h * (dp5::e1 * k1[i] + dp5::e3 * k3[i] + dp5::e4 * k4[i] +
                             dp5::e5 * k5[i] + dp5::e6 * k6[i] + dp5::e7 * k7[i]);
            double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y7[i]));
            err += (ei / sc) * (ei / sc);
        }
        err = std::sqrt(err / double(N));

        if (err <= 1.0) {
            DenseStep<N> rec;
            rec.t0 = t;
            rec.h = h;
            for (std::size_t i = 0; i < N; ++i) {
                double ydiff = y7[i] - y[i];
                double bspl = h * k1[i] - ydiff;
                rec.cont[0][i] = y[i];
                rec.cont[1][i] = ydiff;
                rec.cont[2][i] = bspl;
                rec.cont[3][i] = ydiff - h * k7[i] - bspl;
                rec.cont[4][i] = h * (dp5::d1 * k1[i] + dp5::d3 * k3[i] +
                                      dp5::d4 * k4[i] + dp5::d5 * k5[i] +
                                      dp5::d6 * k6[i] + dp5::d7 * k7[i]);
            }
            traj.steps_.push_back(rec);
            t += h;
            y = y7;
            k1 = k7;
            guard(y, t);
            ++traj.stats_.n_steps;
        } else {
            ++traj.stats_.n_rejected;
        }

        double fac = (err > 0.0) ? 0.9 * std::pow(err, -0.2) : 5.0;
        fac = std::min(5.0, std::max(0.2, fac));
        h *= fac;
        if (opt.max_step > 0.0 && std::abs(h) > opt.max_step) h = dir * opt.max_step;
        if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t)))
            throw AccuracyError("integrate: step size underflow");
    }

    traj.t_end_ = t;
    return traj;
}

} // namespace halphen::ode

#endif
