#ifndef HALPHEN_RATIONAL_MAP_HPP
#define HALPHEN_RATIONAL_MAP_HPP

#include <array>
#include <complex>
#include <vector>

#include "halphen/errors.hpp"

namespace halphen::moduli {

using cdouble = std::complex<double>;

/// Resultant of the monic polynomial q(z) = z^k + sum b_i z^i and the
/// numerator p(z) = sum a_i z^i (formal degree k-1), via the Sylvester
/// determinant.  Equals prod_i p(alpha_i) over the roots of q.
cdouble sylvester_resultant(const std::vector<cdouble>& a,
                            const std::vector<cdouble>& b);

/// Degree-k scattering function S(z) = (sum a_i z^i)/(z^k + sum b_i z^i) in
/// Donaldson normal form (S(infinity) = 0 structurally).
class RationalMap {
public:
    /// Throws DegenerateMapError when the resultant vanishes (numerator and
    /// denominator share a root, i.e. the map is not in the moduli space).
    static RationalMap make(int k, std::vector<cdouble> a, std::vector<cdouble> b);

    int degree() const { return k_; }
    const std::vector<cdouble>& numerator() const { return a_; }
    const std::vector<cdouble>& denominator() const { return b_; }
    cdouble resultant() const { return delta_; }

    cdouble operator()(cdouble z) const;

private:
    RationalMap(int k, std::vector<cdouble> a, std::vector<cdouble> b, cdouble d)
        : k_(k), a_(std::move(a)), b_(std::move(b)), delta_(d) {}

    int k_;
    std::vector<cdouble> a_, b_;
    cdouble delta_;
};

/// Membership and involution data for the k=2 surface x^2 - z y^2 = 1 with
/// (x, y, z) -> (-x, -y, z).
struct K2SurfacePoint {
    double residual = 0.0;              // |x^2 - z y^2 - 1|
    std::array<cdouble, 3> representative{}; // lexicographic max of the orbit
    bool on_surface = false;
};

K2SurfacePoint k2_surface(cdouble x, cdouble y, cdouble z, double tol = 1e-12);

} // namespace halphen::moduli

#endif
