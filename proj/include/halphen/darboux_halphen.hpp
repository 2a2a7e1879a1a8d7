#ifndef HALPHEN_DARBOUX_HALPHEN_HPP
#define HALPHEN_DARBOUX_HALPHEN_HPP

#include <array>
#include <functional>

#include "halphen/dopri5.hpp"
#include "halphen/series.hpp"

namespace halphen::dh {

using Triad = std::array<double, 3>;

/// Real Darboux-Halphen state at parameter t.
struct TriadState {
    double t = 0.0;
    Triad theta{};
};

/// Right-hand side of the real Darboux-Halphen system,
///   dTheta^1/dt = Theta^2 Theta^3 - Theta^1 (Theta^2 + Theta^3), cyclic.
Triad dh_rhs(const Triad& th);

/// Jacobian of dh_rhs applied to a vector (used for analytic second
/// derivatives along solutions).
Triad dh_rhs_jacobian_times(const Triad& th, const Triad& v);

/// Numerical trajectory with dense output.
class Trajectory {
public:
    Trajectory(ode::DenseTrajectory<3> traj, double t0)
        : traj_(std::move(traj)), t0_(t0) {}

    TriadState at(double t) const {
        auto y = traj_.at(t);
        return {t, {y[0], y[1], y[2]}};
    }
    double t_begin() const { return traj_.t_begin(); }
    double t_end() const { return traj_.t_end(); }
    const ode::IntegratorStats& stats() const { return traj_.stats(); }

private:
    ode::DenseTrajectory<3> traj_;
    double t0_;
};

/// Adaptive integration of the DH system.  Throws SingularityError with the
/// escape time when a component exceeds the blow-up guard (movable
/// singularities are expected for generic data).
Trajectory dh_integrate(const TriadState& initial, double t_end, double tol);

/// Complex Darboux-Halphen triple at z.
struct ComplexTriad {
    cdouble z{};
    std::array<cdouble, 3> gamma{};
    double tail_bound = 0.0;
};

/// Closed-form fully anisotropic solution built from E2 and the theta
/// nullwerte:
///   gamma^1 = (pi/6i)(E2 - th2^4 - th3^4)
///   gamma^2 = (pi/6i)(E2 + th3^4 + th4^4)
///   gamma^3 = (pi/6i)(E2 + th2^4 - th4^4)
/// The sign of the theta terms in gamma^2 is fixed by requiring that the
/// triple actually solves the system (and equivalently that
/// y = i pi E2 = -2 (g1+g2+g3) holds); see the identity checks in
/// halphen_identities.
ComplexTriad gamma_closed_form(cdouble z, const SeriesParams& params = {});

/// Real-line restriction Theta^k(t) = i gamma^k(i t).  Requires t >= 0.05;
/// asserts the imaginary parts are below 1e-10 before discarding them.
/// On the real line this lands on the branch with signs (-,+,+), whose
/// metric coefficients are negative; see ah_metric_triad for the
/// positive-metric reflection.
TriadState theta_real_solution(double t, const SeriesParams& params = {},
                               double* tail_bound = nullptr);

/// Reflected solution Xi(t) = -Theta(c - t).  Also an exact DH solution
/// (the system is invariant under (t, Theta) -> (c - t, -Theta)), with sign
/// pattern (+,-,-) and positive metric coefficients on the working window.
TriadState ah_metric_triad(double t, double c = 3.5,
                           const SeriesParams& params = {});

/// Symmetric-function and lambda-chain identities at z.
struct HalphenIdentityReport {
    double y_sum_residual = 0.0;     // |y + 2(w1+w2+w3)|
    double ypp_residual = 0.0;       // |y'' + 12 w1 w2 w3|
    cdouble jacobian{};              // J = (w1-w2)(w2-w3)(w3-w1)
    cdouble yp_constant{};           // measured y'/ (w1w2+w2w3+w3w1); exact value 2
    double lambda_e1_residual = 0.0; // |E^1 - i pi th4^4|
    double lambda_e2_residual = 0.0; // |E^2 + i pi th2^4|
    double lambda_e3_residual = 0.0; // |E^3 + i pi th3^4|
    double logderiv_residual = 0.0;  // max_i |gamma^i + (1/2) d/dz log E^i|
};

HalphenIdentityReport halphen_identities(cdouble z,
                                         const SeriesParams& params = {});

/// Value plus first and second t-derivatives of a triad, as consumed by the
/// geometry layer.
struct TriadJet {
    Triad theta{};
    Triad theta_dot{};
    Triad theta_ddot{};
};

using TriadProvider = std::function<TriadJet(double)>;

/// Jet of an exact DH solution: derivatives follow from the flow.
TriadJet solution_jet(const Triad& theta);

/// Provider for the positive-metric Atiyah-Hitchin closed form.
TriadProvider ah_provider(double c = 3.5, const SeriesParams& params = {});

/// Provider for the isotropic solution Theta^i = c0/(1 + c0 t).
TriadProvider isotropic_provider(double c0 = 1.0);

/// Provider for a constant (non-solution) triad.
TriadProvider constant_provider(const Triad& theta);

/// Provider adding a constant offset to another provider's values (the
/// derivative jets are kept, so the result no longer solves the system).
TriadProvider offset_provider(TriadProvider base, const Triad& delta);

} // namespace halphen::dh

#endif
