#ifndef HALPHEN_BPS_MONOPOLE_HPP
#define HALPHEN_BPS_MONOPOLE_HPP

#include <array>
#include <functional>

#include "halphen/errors.hpp"

namespace halphen::bps {

using Vec3 = std::array<double, 3>;

/// Profile functions H(xi), K(xi) and their xi-derivatives.
struct Profiles {
    double H = 0.0;
    double K = 0.0;
    double dH = 0.0;
    double dK = 0.0;
};

/// BPS closed forms K = xi/sinh(xi), H = xi coth(xi) - 1; series branch
/// below xi = 1e-4 avoids cancellation.
Profiles bps_profiles(double xi);

/// SU(2) Yang-Mills-Higgs couplings and the (H, K) profile pair.  An empty
/// profile means the BPS closed forms.
struct MonopoleConfig {
    double e = 1.0;        // gauge coupling
    double v = 1.0;        // Higgs vev
    double lambda_h = 0.0; // quartic coupling; 0 in the BPS limit
    Vec3 center{};         // monopole position
    std::function<Profiles(double)> profile;

    bool bps() const { return lambda_h == 0.0; }
    Profiles profiles_at(double xi) const {
        return profile ? profile(xi) : bps_profiles(xi);
    }
};

/// Pointwise su(2)-valued fields of the hedgehog ansatz
///   phi^a = y^a H(xi)/(e r^2),  A_n^a = eps_{anm} y^m (1-K(xi))/(e r^2),
/// y = x - center, xi = v e r.  F and Dphi use the conventions
///   F_ij^a = d_i A_j^a - d_j A_i^a + e eps_abc A_i^b A_j^c,
///   (D_i phi)^a = d_i phi^a + e eps_abc A_i^b phi^c,
///   B_i^a = -(1/2) eps_ijk F_jk^a.
struct FieldSample {
    Vec3 x{};
    double A[3][3]{};    // A[n][a]
    double phi[3]{};
    bool has_strengths = false;
    double F[3][3][3]{}; // F[i][j][a]
    double B[3][3]{};    // B[i][a]
    double Dphi[3][3]{}; // Dphi[i][a]
};

FieldSample hedgehog_fields(const MonopoleConfig& cfg, const Vec3& x);

enum class DerivMode { Analytic, FiniteDifference };

/// Fields plus strengths; analytic mode differentiates the profile closed
/// forms, FD mode uses central differences with step h.
FieldSample strengths(const MonopoleConfig& cfg, const Vec3& x, DerivMode mode,
                      double h = 1e-4);

struct GridSpec {
    int n = 20;                // points per axis
    double half_width = 5.0;   // box [-hw, hw]^3
    double exclusion = 0.1;    // skip r < exclusion
    DerivMode mode = DerivMode::Analytic;
    double fd_step = 1e-4;
};

struct BogomolnyResidual {
    double max_res = 0.0;
    double l2_res = 0.0;
    int sign_branch = 0; // +1 when B = +Dphi fits best
    long n_points = 0;
};

/// Residual of B_i^a = (sign) D_i phi^a over the grid; BPS mode only.
BogomolnyResidual bogomolny_residual(const MonopoleConfig& cfg,
                                     const GridSpec& grid);

struct QuadratureSpec {
    double rel_tol = 1e-9;
    int max_depth = 30;
};

struct ChargeReport {
    double g = 0.0;            // surface flux of (phi-hat, B) in 4 pi k/e units
    double q = 0.0;            // electric charge (0 for static hedgehog)
    double M = 0.0;            // total energy incl. exterior Coulomb tail
    int k = 0;                 // rounded topological charge
    double k_distance = 0.0;   // |flux e/(4 pi) - k|
    double energy_interior = 0.0;
    double energy_tail = 0.0;
};

/// Radial quadrature of the static energy plus flux charge at r_max.
/// The exterior Coulomb tail 4 pi/(e^2 r_max) is added in closed form (the
/// fields are exponentially close to the abelian monopole there).
ChargeReport energy_and_charge(const MonopoleConfig& cfg, double r_max,
                               const QuadratureSpec& quad = {});

/// Energy density T_00 at radius r (spherically symmetric for the hedgehog).
double energy_density(const MonopoleConfig& cfg, double r);

/// Flux of (phi-hat, B) through the sphere of radius r about the center.
double winding_flux_sphere(const MonopoleConfig& cfg, double r);

/// 't Hooft abelian projection at x: projected F_ij, its magnetic field, and
/// the printed-form current density k0 (all by central differences of phi).
struct AbelianProjection {
    double F[3][3]{};
    double B[3]{};
    double k0 = 0.0;
};

AbelianProjection abelian_projection(const MonopoleConfig& cfg, const Vec3& x,
                                     double h = 1e-5);

/// Magnetic charge through the sphere of radius r as the winding-form
/// surface integral (1/2e) oint eps_ijk eps_abc phihat^a d_j phihat^b
/// d_k phihat^c dS_i; equals 4 pi k/e for charge k.
double winding_charge(const MonopoleConfig& cfg, double r, int n_polar = 24);

/// Bogomolny bound M = v sqrt(g^2 + q^2).
double bogomolny_bound(double v, double g, double q);

struct DiracField {
    double phi = 0.0;
    Vec3 B{};
};

/// Abelian Bogomolny solution phi = k/(2r), B = grad phi.
DiracField dirac_field(int k, const Vec3& x);

/// Compactly supported radial bump, su(2) direction dir:
/// eps^a(x) = dir^a * exp(1 - 1/(1-u^2)) for u = |x - c|/w < 1, else 0.
struct BumpSpec {
    Vec3 center{0.0, 0.0, 1.5};
    double width = 1.0;
    std::array<double, 3> direction{0.0, 0.0, 1.0};
    double amplitude = 1.0;
};

struct LinearizedReport {
    double linearized_residual = 0.0;  // | *D_A a - D_A psi + [phi, a] | max
    double orthogonality_residual = 0.0; // | *D_A *a + [phi, psi] | max
    double l2_norm = 0.0;              // moduli-space norm of (a, psi)
};

/// Residuals of the linearized Bogomolny pair on the gauge direction
/// (a, psi) = (D_A eps, e [phi, eps]) generated by the bump; derivatives by
/// central differences with step fd_step, sampled in the bump support.
LinearizedReport linearized_residuals(const MonopoleConfig& cfg,
                                      const BumpSpec& bump,
                                      double fd_step = 1e-3);

} // namespace halphen::bps

#endif
