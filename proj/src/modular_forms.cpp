#include "halphen/modular_forms.hpp"

#include <algorithm>
#include <limits>
#include <memory>
#include <mutex>
#include <vector>

namespace halphen::forms {

namespace detail {

namespace {

struct SigmaCache {
    std::mutex mu;
    std::vector<double> s1, s3, s5;
    int filled = 0;

    // Divisor sieve in doubles; grows monotonically, never shrinks, so
    // earlier pointers remain valid only through the vectors below.  To keep
    // pointers stable we sieve into freshly reserved storage on growth.
    void grow(int n) {
        if (n <= filled) return;
        int cap = std::max(n, std::max(64, 2 * filled));
        std::vector<double> n1(cap + 1, 0.0), n3(cap + 1, 0.0), n5(cap + 1, 0.0);
        for (int d = 1; d <= cap; ++d) {
            double d1 = d;
            double d3 = d1 * d1 * d1;
            double d5 = d3 * d1 * d1;
            for (int m = d; m <= cap; m += d) {
                n1[m] += d1;
                n3[m] += d3;
                n5[m] += d5;
            }
        }
        s1 = std::move(n1);
        s3 = std::move(n3);
        s5 = std::move(n5);
        filled = cap;
    }
};

SigmaCache& cache() {
    static SigmaCache c;
    return c;
}

} // namespace

const double* sigma_table(int k, int n_terms) {
    SigmaCache& c = cache();
    std::lock_guard<std::mutex> lock(c.mu);
    c.grow(n_terms);
    switch (k) {
        case 1: return c.s1.data();
        case 3: return c.s3.data();
        case 5: return c.s5.data();
        default: throw DomainError("sigma_table: k must be 1, 3 or 5");
    }
}

} // namespace detail

namespace {

void check_domain(const HalfPlanePoint& p) {
    if (p.tau().imag() < kMinImTau)
        throw DomainError("eval: Im(tau) below supported minimum 0.05");
}

struct EisensteinSpec {
    int k;          // divisor power
    double coeff;   // series prefactor
};

EisensteinSpec spec_of(Eisenstein kind) {
    switch (kind) {
        case Eisenstein::E2: return {1, -24.0};
        case Eisenstein::E4: return {3, 240.0};
        case Eisenstein::E6: return {5, -504.0};
    }
    throw DomainError("unknown Eisenstein kind");
}

// Tail of |c| * sum_{n>N} sigma_k(n) |q|^n, majorized by sigma_k(n) <= n^{k+1}
// and a geometric series on the term ratio.
double eisenstein_tail(double c, int k, double x, int N) {
    double t1 = std::abs(c) * std::pow(double(N + 1), k + 1) * std::pow(x, N + 1);
    double r = x * std::pow(double(N + 2) / double(N + 1), k + 1);
    if (r >= 1.0) return -1.0; // majorant not yet geometric
    return t1 / (1.0 - r);
}

} // namespace

SeriesValue eval_eisenstein(Eisenstein kind, const HalfPlanePoint& p,
                            const SeriesParams& params) {
    check_domain(p);
    const EisensteinSpec sp = spec_of(kind);
    const cdouble q = p.q();
    const double x = p.abs_q();
    const double* sig = detail::sigma_table(sp.k, params.max_terms);

    cdouble sum = 1.0;
    cdouble qn = 1.0;
    for (int n = 1; n <= params.max_terms; ++n) {
        qn *= q;
        sum += sp.coeff * sig[n] * qn;
        double tail = eisenstein_tail(sp.coeff, sp.k, x, n);
        if (tail >= 0.0 && tail <= params.tail_tolerance)
            return {sum, tail};
    }
    double tail = eisenstein_tail(sp.coeff, sp.k, x, params.max_terms);
    throw TruncationError("eval_eisenstein: tail bound unattainable within max_terms",
                          tail < 0.0 ? std::numeric_limits<double>::infinity() : tail);
}

SeriesValue eval_theta(Theta kind, const HalfPlanePoint& p,
                       const SeriesParams& params) {
    check_domain(p);
    const cdouble w = p.theta_nome();
    const double x = p.abs_theta_nome();
    const cdouble w2 = w * w;

    if (kind == Theta::T2) {
        // 2 sum_{n>=0} w^{(n+1/2)^2} = 2 w^{1/4} sum_{n>=0} w^{n(n+1)}
        cdouble head = 2.0 * std::exp(cdouble(0.0, kPi * 0.25) * p.tau());
        cdouble sum = 0.0;
        cdouble cur = 1.0;  // w^{n(n+1)}
        cdouble step = w2;  // w^{2(n+1)}, exponent increment (n+1)(n+2)-n(n+1)
        for (int n = 0; n <= params.max_terms; ++n) {
            sum += cur;
            cur *= step;
            step *= w2;
            double tail = 2.0 * std::pow(x, (n + 1.5) * (n + 1.5)) / (1.0 - x);
            if (tail <= params.tail_tolerance)
                return {head * sum, tail};
        }
        throw TruncationError("eval_theta: tail bound unattainable within max_terms",
                              std::numeric_limits<double>::infinity());
    }

    const double sign = (kind == Theta::T4) ? -1.0 : 1.0;
    cdouble sum = 1.0;
    cdouble cur = 1.0;  // w^{n^2}
    cdouble wodd = w;   // w^{2n+1}
    double sgn = 1.0;
    for (int n = 1; n <= params.max_terms; ++n) {
        cur *= wodd;    // w^{n^2} = w^{(n-1)^2} * w^{2n-1}
        wodd *= w2;
        sgn *= sign;
        sum += 2.0 * sgn * cur;
        double tail = 2.0 * std::pow(x, double(n + 1) * double(n + 1)) / (1.0 - x);
        if (tail <= params.tail_tolerance)
            return {sum, tail};
    }
    throw TruncationError("eval_theta: tail bound unattainable within max_terms",
                          std::numeric_limits<double>::infinity());
}

SeriesValue eisenstein_derivative(Eisenstein kind, const HalfPlanePoint& p,
                                  const SeriesParams& params) {
    const SeriesValue e2 = eval_eisenstein(Eisenstein::E2, p, params);
    const SeriesValue e4 = eval_eisenstein(Eisenstein::E4, p, params);
    const cdouble ipi(0.0, kPi);

    switch (kind) {
        case Eisenstein::E2: {
            cdouble v = ipi / 6.0 * (e2.value * e2.value - e4.value);
            double d2 = e2.tail_bound, d4 = e4.tail_bound;
            double tail = kPi / 6.0 * ((2.0 * std::abs(e2.value) + d2) * d2 + d4);
            return {v, tail};
        }
        case Eisenstein::E4: {
            const SeriesValue e6 = eval_eisenstein(Eisenstein::E6, p, params);
            cdouble v = 2.0 * ipi / 3.0 * (e2.value * e4.value - e6.value);
            double tail = 2.0 * kPi / 3.0 *
                (std::abs(e2.value) * e4.tail_bound +
                 std::abs(e4.value) * e2.tail_bound + e2.tail_bound * e4.tail_bound +
                 e6.tail_bound);
            return {v, tail};
        }
        case Eisenstein::E6: {
            const SeriesValue e6 = eval_eisenstein(Eisenstein::E6, p, params);
            cdouble v = ipi * (e2.value * e6.value - e4.value * e4.value);
            double tail = kPi *
                (std::abs(e2.value) * e6.tail_bound +
                 std::abs(e6.value) * e2.tail_bound +
                 (2.0 * std::abs(e4.value) + e4.tail_bound) * e4.tail_bound);
            return {v, tail};
        }
    }
    throw DomainError("unknown Eisenstein kind");
}

TransformResiduals transform_residuals(const HalfPlanePoint& p,
                                       const SeriesParams& params) {
    const cdouble tau = p.tau();
    const HalfPlanePoint ps = HalfPlanePoint::from_tau(-1.0 / tau);

    const SeriesValue e2 = eval_eisenstein(Eisenstein::E2, p, params);
    const SeriesValue e4 = eval_eisenstein(Eisenstein::E4, p, params);
    const SeriesValue e6 = eval_eisenstein(Eisenstein::E6, p, params);
    const SeriesValue f2 = eval_eisenstein(Eisenstein::E2, ps, params);
    const SeriesValue f4 = eval_eisenstein(Eisenstein::E4, ps, params);
    const SeriesValue f6 = eval_eisenstein(Eisenstein::E6, ps, params);

    TransformResiduals out;
    const cdouble anomaly = 12.0 * tau / (cdouble(0.0, 2.0 * kPi));
    out.e2 = std::abs(f2.value - (tau * tau * e2.value + anomaly));
    out.e4 = std::abs(f4.value - std::pow(tau, 4) * e4.value);
    out.e6 = std::abs(f6.value - std::pow(tau, 6) * e6.value);
    out.combined_tail = f2.tail_bound + f4.tail_bound + f6.tail_bound +
        std::norm(tau) * (e2.tail_bound + e4.tail_bound + e6.tail_bound);
    return out;
}

} // namespace halphen::forms
