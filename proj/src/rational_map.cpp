#include "halphen/rational_map.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>

namespace halphen::moduli {

cdouble sylvester_resultant(const std::vector<cdouble>& a,
                            const std::vector<cdouble>& b) {
    const int k = int(b.size());
    if (int(a.size()) != k || k < 1)
        throw DomainError("sylvester_resultant: need |a| = |b| = k >= 1");

    // q has degree k (monic), p formal degree k-1: Sylvester size 2k-1
    const int n = 2 * k - 1;
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(n, n);

    // k-1 rows of q coefficients (descending): 1, b_{k-1}, ..., b_0
    std::vector<cdouble> q(k + 1);
    q[0] = 1.0;
    for (int i = 0; i < k; ++i) q[1 + i] = b[k - 1 - i];
    for (int r = 0; r < k - 1; ++r)
        for (int c = 0; c <= k; ++c) S(r, r + c) = q[c];

    // k rows of p coefficients (descending): a_{k-1}, ..., a_0
    std::vector<cdouble> p(k);
    for (int i = 0; i < k; ++i) p[i] = a[k - 1 - i];
    for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) S(k - 1 + r, r + c) = p[c];

    if (k == 1) return a[0]; // 1x1 Sylvester block is just a_0
    return S.determinant();
}

RationalMap RationalMap::make(int k, std::vector<cdouble> a,
                              std::vector<cdouble> b) {
    if (k < 1) throw DomainError("RationalMap: degree must be positive");
    if (int(a.size()) != k || int(b.size()) != k)
        throw DomainError("RationalMap: need k numerator and k denominator coefficients");

    const cdouble delta = sylvester_resultant(a, b);
    double scale = 1.0;
    for (const cdouble& c : a) scale = std::max(scale, std::abs(c));
    for (const cdouble& c : b) scale = std::max(scale, std::abs(c));
    if (std::abs(delta) <= 1e-9 * std::pow(scale, 2 * k - 1))
        throw DegenerateMapError("RationalMap: resultant vanishes");
    return RationalMap(k, std::move(a), std::move(b), delta);
}

cdouble RationalMap::operator()(cdouble z) const {
    // Horner; den starts from the monic leading coefficient
    cdouble num = 0.0, den = 1.0;
    for (int i = k_ - 1; i >= 0; --i) num = num * z + a_[i];
    for (int i = k_ - 1; i >= 0; --i) den = den * z + b_[i];
    return num / den;
}

K2SurfacePoint k2_surface(cdouble x, cdouble y, cdouble z, double tol) {
    K2SurfacePoint out;
    out.residual = std::abs(x * x - z * y * y - 1.0);
    out.on_surface = out.residual <= tol;

    const std::array<cdouble, 3> p1 = {x, y, z};
    const std::array<cdouble, 3> p2 = {-x, -y, z};
    auto lex_less = [](const std::array<cdouble, 3>& u,
                       const std::array<cdouble, 3>& v) {
        for (int i = 0; i < 3; ++i) {
            if (u[i].real() != v[i].real()) return u[i].real() < v[i].real();
            if (u[i].imag() != v[i].imag()) return u[i].imag() < v[i].imag();
        }
        return false;
    };
    out.representative = lex_less(p1, p2) ? p2 : p1;
    return out;
}

} // namespace halphen::moduli
