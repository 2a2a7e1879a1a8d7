#ifndef HALPHEN_SCHRODINGER_HPP
#define HALPHEN_SCHRODINGER_HPP

#include <functional>
#include <vector>

#include "halphen/errors.hpp"

namespace halphen::moduli {

/// Radial Schrodinger problem in the j = 0 sector,
///   -(1/(P f)) d/dr ( (P/f) dPsi/dr ) = (pi E / hbar^2) Psi,
/// with P(r) = Theta^1 Theta^2 Theta^3 and a caller-supplied positive f
/// (the paper's literal choice |Theta^2(r)|/r ships as a preset).
/// Dirichlet conditions at both ends.
struct SchrodingerProblem {
    double r0 = 0.0;
    double r1 = 1.0;
    int n = 1000; // grid points including both boundary nodes
    std::function<double(double)> P;
    std::function<double(double)> f;
    double hbar = 1.0;
};

struct Spectrum {
    std::vector<double> energies;              // ascending
    std::vector<std::vector<double>> modes;    // interior values, one per energy
    std::vector<double> grid;                  // interior nodes
    std::vector<double> weight;                // Sturm-Liouville weight P*f at nodes
};

/// Lowest n_eigs eigenpairs of the symmetric finite-difference
/// discretization; E = hbar^2 * (operator eigenvalue) / pi.
Spectrum solve_radial_schrodinger(const SchrodingerProblem& prob, int n_eigs);

/// Constant-coefficient preset (P = f = 1): exact E_n = hbar^2 n^2 pi / L^2.
SchrodingerProblem constant_coefficient_problem(double length = 3.141592653589793,
                                                int n = 2000);

/// Atiyah-Hitchin preset on [r_lo, r_hi] built from the positive-branch
/// closed form, with f = |Theta^2(r)|/r.
SchrodingerProblem ah_problem(double r_lo = 0.6, double r_hi = 3.2, int n = 1500);

} // namespace halphen::moduli

#endif
