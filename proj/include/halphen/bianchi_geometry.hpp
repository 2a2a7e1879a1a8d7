#ifndef HALPHEN_BIANCHI_GEOMETRY_HPP
#define HALPHEN_BIANCHI_GEOMETRY_HPP

#include <array>
#include <optional>

#include "halphen/coframe.hpp"
#include "halphen/darboux_halphen.hpp"

namespace halphen::geom {

/// Euler angles on the Bianchi IX orbit.
struct EulerPoint {
    double alpha = 0.0; // [0, pi]
    double beta = 0.0;  // [0, 2 pi]
    double psi = 0.0;   // [0, 4 pi]
};

/// Maurer-Cartan forms at an Euler point, expressed over (d alpha, d beta,
/// d psi), together with the finite-difference residual of the structure
/// equation ds^i + (1/2) eps_ijk s^j ^ s^k = 0 and the volume coefficient of
/// s^1^s^2^s^3 (equal to sin alpha).
struct MaurerCartan {
    std::array<std::array<double, 3>, 3> comp{}; // comp[i] = sigma^i over (da, db, dpsi)
    double structure_residual = 0.0;
    double volume_coefficient = 0.0;
};

MaurerCartan maurer_cartan_at(const EulerPoint& p, double fd_step = 1e-5,
                              double exclusion = 1e-3);

/// Component matrix only (no residual checks); comp[i] = sigma^i over
/// (d alpha, d beta, d psi).
std::array<std::array<double, 3>, 3> sigma_components(const EulerPoint& p);

/// Diagonal metric coefficients of the invariant coframe,
///   f0^2 = T1 T2 T3,  fi^2 = Tj Tk / Ti,
/// with first and second t-derivatives from the provider jet.
struct MetricCoefficients {
    std::array<double, 4> fsq{};      // f0^2, f1^2, f2^2, f3^2
    std::array<double, 4> fsq_dot{};
    std::array<double, 4> fsq_ddot{};
    std::array<double, 4> f{};        // positive square roots
    std::array<double, 4> f_dot{};
    std::array<double, 4> f_ddot{};
};

/// Bianchi IX metric over a t-interval with positivity-checked coefficients.
class CoframeMetric {
public:
    /// Scans [t_lo, t_hi] at scan_points and records the discovered
    /// positivity domain; throws EmptyDomainError if no scanned point has
    /// all four coefficients positive.
    static CoframeMetric build(dh::TriadProvider provider, double t_lo,
                               double t_hi, int scan_points = 200);

    MetricCoefficients coefficients(double t) const;
    double domain_lo() const { return dom_lo_; }
    double domain_hi() const { return dom_hi_; }
    const dh::TriadProvider& provider() const { return provider_; }

private:
    CoframeMetric(dh::TriadProvider p, double lo, double hi)
        : provider_(std::move(p)), dom_lo_(lo), dom_hi_(hi) {}

    dh::TriadProvider provider_;
    double dom_lo_, dom_hi_;
};

/// Levi-Civita connection over the invariant coframe, solved algebraically
/// from Cartan's first structure equation:
///   omega^i_0 = (fi'/f0) s^i,
///   omega^j_k = x_i s^i,  x_i = (fi^2 - fj^2 - fk^2)/(2 fj fk),  (i,j,k) cyclic.
struct ConnectionAt {
    double t = 0.0;
    std::array<std::array<OneForm, 4>, 4> omega{};
    MetricCoefficients coef;
    double torsion_residual = 0.0;
};

ConnectionAt solve_connection(const CoframeMetric& m, double t);

struct CurvatureAt {
    std::array<std::array<TwoForm, 4>, 4> R{};
};

CurvatureAt curvature(const ConnectionAt& conn);

/// Self-dual/anti-self-dual split of connection and curvature with respect
/// to the index-pair duality; the (o-8) structure residuals and the duality
/// eigenvalue residual are verified at construction.
struct SDDecomposition {
    std::array<OneForm, 3> s{};
    std::array<OneForm, 3> a{};
    std::array<TwoForm, 3> S{};
    std::array<TwoForm, 3> A{};
    double duality_residual = 0.0;   // |s - ~s|, |a + ~a| (max)
    double structure_residual = 0.0; // (o-8) both families (max)
};

SDDecomposition sd_decompose(const ConnectionAt& conn, const CurvatureAt& curv,
                             bool flip_orientation = false);

/// Anti-self-duality diagnostics at t.
struct AsdReport {
    double residual = 0.0;          // max |A_i| component
    double a_coefficient_dev = 0.0; // max_i | |a_i(sigma^i)| - 1/2 |
    double bracket_residual = 0.0;  // max_i |bracket_i(Theta, rhs) - 2 Theta^i|
};

AsdReport asd_residual(const CoframeMetric& m, double t);

struct RicciResult {
    std::array<std::array<double, 4>, 4> comp{};
    double max_abs = 0.0;
    double scalar = 0.0;
};

RicciResult ricci(const CoframeMetric& m, double t);

/// max over frame indices of |R^a_b ^ theta^b| (first Bianchi identity).
double first_bianchi_residual(const ConnectionAt& conn, const CurvatureAt& curv);

/// max over frame indices of |dR^a_b + omega^a_c^R^c_b - R^a_c^omega^c_b|
/// with the t-derivative of curvature taken by central differences.
double second_bianchi_residual(const CoframeMetric& m, double t,
                               double fd_step = 1e-4);

} // namespace halphen::geom

#endif
