#include "halphen/schrodinger.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "halphen/darboux_halphen.hpp"

namespace halphen::moduli {

Spectrum solve_radial_schrodinger(const SchrodingerProblem& prob, int n_eigs) {
    if (prob.n < 3) throw DomainError("solve_radial_schrodinger: grid too small");
    if (!(prob.r1 > prob.r0))
        throw DomainError("solve_radial_schrodinger: empty interval");
    if (n_eigs < 1 || n_eigs >= prob.n - 2)
        throw DomainError("solve_radial_schrodinger: n_eigs out of range");

    const int m = prob.n - 2; // interior nodes
    const double h = (prob.r1 - prob.r0) / (prob.n - 1);

    // Sturm-Liouville form: -(p u')' = mu w u, p = P/f, w = P f
    std::vector<double> r(m), w(m), p_half(m + 1);
    for (int i = 0; i < m; ++i) {
        r[i] = prob.r0 + h * (i + 1);
        const double P = prob.P(r[i]);
        const double f = prob.f(r[i]);
        if (!(P > 0.0) || !(f > 0.0))
            throw DomainError("solve_radial_schrodinger: coefficients must be positive");
        w[i] = P * f;
    }
    for (int i = 0; i <= m; ++i) {
        const double rh = prob.r0 + h * (i + 0.5);
        const double P = prob.P(rh);
        const double f = prob.f(rh);
        if (!(P > 0.0) || !(f > 0.0))
            throw DomainError("solve_radial_schrodinger: coefficients must be positive");
        p_half[i] = P / f;
    }

    // symmetrized tridiagonal: D^{-1/2} A D^{-1/2}, D = diag(w)
    Eigen::VectorXd diag(m), sub(m - 1);
    for (int i = 0; i < m; ++i)
        diag(i) = (p_half[i] + p_half[i + 1]) / (h * h * w[i]);
    for (int i = 0; i + 1 < m; ++i)
        sub(i) = -p_half[i + 1] / (h * h * std::sqrt(w[i] * w[i + 1]));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success)
        throw AccuracyError("solve_radial_schrodinger: eigensolver failed");

    Spectrum out;
    out.grid = r;
    out.weight = w;
    const double scale = prob.hbar * prob.hbar / 3.141592653589793238462643;
    for (int k = 0; k < n_eigs; ++k) {
        out.energies.push_back(scale * solver.eigenvalues()(k));
        std::vector<double> mode(m);
        for (int i = 0; i < m; ++i)
            mode[i] = solver.eigenvectors()(i, k) / std::sqrt(w[i]);
        // sign convention: first nonzero component positive
        for (int i = 0; i < m; ++i) {
            if (std::abs(mode[i]) > 1e-12) {
                if (mode[i] < 0.0)
                    for (double& v : mode) v = -v;
                break;
            }
        }
        out.modes.push_back(std::move(mode));
    }
    return out;
}

SchrodingerProblem constant_coefficient_problem(double length, int n) {
    SchrodingerProblem p;
    p.r0 = 0.0;
    p.r1 = length;
    p.n = n;
    p.P = [](double) { return 1.0; };
    p.f = [](double) { return 1.0; };
    return p;
}

SchrodingerProblem ah_problem(double r_lo, double r_hi, int n) {
    SchrodingerProblem p;
    p.r0 = r_lo;
    p.r1 = r_hi;
    p.n = n;
    auto provider = dh::ah_provider();
    p.P = [provider](double r) {
        const auto jet = provider(r);
        return std::abs(jet.theta[0] * jet.theta[1] * jet.theta[2]);
    };
    p.f = [provider](double r) {
        const auto jet = provider(r);
        return std::abs(jet.theta[1]) / r;
    };
    return p;
}

} // namespace halphen::moduli
