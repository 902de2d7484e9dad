#include "opext/operators.hpp"

#include <cmath>
#include <limits>

namespace opext {

CMatrix PartialMap::ambient() const {
    if (src.dim() == 0) return CMatrix::Zero(matrix.rows(), src.ambient);
    return matrix * src.basis.adjoint();
}

Subspace PartialMap::range(const TolPolicy& tol) const { return orthonormalize(matrix, tol); }

bool PartialMap::is_isometric(double eps) const {
    const long k = src.dim();
    return (matrix.adjoint() * matrix - CMatrix::Identity(k, k)).norm() <= eps;
}

PartialMap map_from_pairs(const CMatrix& g, const CMatrix& y, const TolPolicy& tol) {
    const long n = g.rows();
    if (g.cols() == 0) return {Subspace::zero(n), CMatrix(y.rows(), 0)};
    Subspace src = orthonormalize(g, tol);
    if (src.dim() < g.cols()) throw Singular("map_from_pairs: source vectors are dependent", sigma_min(g));
    Eigen::JacobiSVD<CMatrix> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
    CMatrix coef = svd.solve(src.basis);
    return {src, y * coef};
}

PartialMap direct_sum(const PartialMap& a, const PartialMap& b) {
    const long n = a.src.ambient;
    CMatrix basis(n, a.src.dim() + b.src.dim());
    basis << a.src.basis, b.src.basis;
    CMatrix img(a.matrix.rows(), a.src.dim() + b.src.dim());
    img << a.matrix, b.matrix;
    return {Subspace(n, basis), img};
}

IsometryOp IsometryOp::make(const Subspace& dom, const CMatrix& ran, double eps) {
    const long d = dom.dim();
    if (ran.cols() != d || ran.rows() != dom.ambient)
        throw std::invalid_argument("IsometryOp: range basis has the wrong shape");
    if ((dom.basis.adjoint() * dom.basis - CMatrix::Identity(d, d)).norm() > eps)
        throw std::invalid_argument("IsometryOp: domain basis is not orthonormal");
    if ((ran.adjoint() * ran - CMatrix::Identity(d, d)).norm() > eps)
        throw std::invalid_argument("IsometryOp: operator is not isometric");
    return {dom.ambient, dom, ran};
}

SymmetricOp SymmetricOp::make(const Subspace& dom, const CMatrix& action, double eps) {
    const long d = dom.dim();
    if (action.cols() != d || action.rows() != dom.ambient)
        throw std::invalid_argument("SymmetricOp: action has the wrong shape");
    if ((dom.basis.adjoint() * dom.basis - CMatrix::Identity(d, d)).norm() > 1e-10)
        throw std::invalid_argument("SymmetricOp: domain basis is not orthonormal");
    CMatrix g = dom.basis.adjoint() * action;
    if ((g - g.adjoint()).norm() > eps * std::max(1.0, g.norm()))
        throw std::invalid_argument("SymmetricOp: operator is not symmetric");
    return {LinOp{dom.ambient, dom, action}};
}

Point Point::reciprocal_conj(cplx z) {
    if (z == cplx(0.0, 0.0)) return Point::inf();
    return Point(1.0 / std::conj(z));
}

DefectPair defect_subspaces(const IsometryOp& v, Point zeta, const TolPolicy& tol) {
    Subspace m;
    if (zeta.infinity) {
        m = orthonormalize(v.ran, tol);
    } else if (std::abs(zeta.value) <= 1.0) {
        m = orthonormalize(v.dom.basis - zeta.value * v.ran, tol);
    } else {
        m = orthonormalize(v.dom.basis / zeta.value - v.ran, tol);
    }
    if (v.d() == 0) m = Subspace::zero(v.n);
    return {m, orthogonal_complement(m, tol)};
}

DefectPair defect_subspaces(const LinOp& a, cplx z, const TolPolicy& tol) {
    Subspace m = a.d() == 0 ? Subspace::zero(a.n) : orthonormalize(a.action - z * a.dom.basis, tol);
    return {m, orthogonal_complement(m, tol)};
}

IsometryOp moebius_transform(const IsometryOp& v, cplx z, Direction dir, const TolPolicy& tol) {
    if (std::abs(z) >= 1.0) throw std::invalid_argument("moebius_transform: |z| must be < 1");
    if (dir == Direction::inverse) z = -z;
    if (v.d() == 0) return IsometryOp::zero(v.n);
    CMatrix g = v.dom.basis - z * v.ran;
    CMatrix y = v.ran - std::conj(z) * v.dom.basis;
    PartialMap m = map_from_pairs(g, y, tol);
    return {v.n, m.src, m.matrix};
}

PartialMap cayley_map(const LinOp& a, cplx z, const TolPolicy& tol) {
    if (a.d() == 0) return PartialMap::empty(a.n);
    CMatrix g = a.action - z * a.dom.basis;
    CMatrix y = a.action - std::conj(z) * a.dom.basis;
    return map_from_pairs(g, y, tol);
}

IsometryOp cayley_transform(const SymmetricOp& a, cplx z, const TolPolicy& tol) {
    if (z.imag() == 0.0) throw std::invalid_argument("cayley_transform: z must be non-real");
    PartialMap m = cayley_map(a, z, tol);
    return {a.n, m.src, m.matrix};
}

LinOp cayley_inverse_map(const PartialMap& w, cplx z, const TolPolicy& tol) {
    const long n = w.src.ambient;
    if (w.src.dim() == 0) return {n, Subspace::zero(n), CMatrix(n, 0)};
    CMatrix g = w.matrix - w.src.basis;
    double s = sigma_min(g);
    if (s <= tol.threshold(1.0, n))
        throw FixedPointObstruction("cayley inverse: the map has a fixed vector (eigenvalue 1)");
    CMatrix y = z * w.matrix - std::conj(z) * w.src.basis;
    PartialMap m = map_from_pairs(g, y, tol);
    return {n, m.src, m.matrix};
}

SymmetricOp cayley_inverse(const IsometryOp& u, cplx z, const TolPolicy& tol) {
    if (z.imag() == 0.0) throw std::invalid_argument("cayley_inverse: z must be non-real");
    LinOp b = cayley_inverse_map(u.as_map(), z, tol);
    return {b};
}

namespace {
RegularType bounded_below(const CMatrix& g, const TolPolicy& tol) {
    if (g.cols() == 0) return {true, std::numeric_limits<double>::infinity()};
    double s = sigma_min(g);
    return {s > tol.threshold(std::max(1.0, opnorm(g)), g.rows()), s};
}
}  // namespace

RegularType is_regular_type(const IsometryOp& v, cplx point, const TolPolicy& tol) {
    return bounded_below(v.ran - point * v.dom.basis, tol);
}

RegularType is_regular_type(const LinOp& a, cplx point, const TolPolicy& tol) {
    return bounded_below(a.action - point * a.dom.basis, tol);
}

FullContraction orthogonal_extension(const IsometryOp& v, const CMatrix& c, cplx z0, const TolPolicy& tol) {
    const long n = v.n;
    if (opnorm(c) > 1.0 + 1e-10) throw NotContraction("orthogonal_extension: parameter norm exceeds 1");
    IsometryOp vz = moebius_transform(v, z0, Direction::forward, tol);
    if (vz.d() > 0 && (c * vz.dom.basis).norm() > 1e-9)
        throw PreconditionViolated("orthogonal_extension: parameter does not vanish on M_z0");
    CMatrix vplus = vz.ambient() + c;
    CMatrix id = CMatrix::Identity(n, n);
    CMatrix num = vplus + std::conj(z0) * id;
    CMatrix den = id + z0 * vplus;
    // right division: num * den^{-1}
    CMatrix vc = solve(den.adjoint(), num.adjoint(), tol).adjoint();
    return {vc, opnorm(vc)};
}

CMatrix orthogonal_extension_plus(const CMatrix& vc, cplx z0, const TolPolicy& tol) {
    const long n = vc.rows();
    CMatrix id = CMatrix::Identity(n, n);
    CMatrix num = vc - std::conj(z0) * id;
    CMatrix den = id - z0 * vc;
    return solve(den.adjoint(), num.adjoint(), tol).adjoint();
}

SignClass classify_signs(const LinOp& b, const TolPolicy& tol) {
    if (b.d() == 0) return SignClass::symmetric;
    CMatrix g = b.gram();
    CMatrix k = (g - g.adjoint()) / (2.0 * kI);
    k = 0.5 * (k + k.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(k);
    double lo = es.eigenvalues().minCoeff();
    double hi = es.eigenvalues().maxCoeff();
    double eps = std::max(1e-9, 10.0 * tol.abs_floor) * std::max(1.0, g.norm());
    if (lo >= -eps && hi <= eps) return SignClass::symmetric;
    if (lo >= -eps) return SignClass::dissipative;
    if (hi <= eps) return SignClass::accumulative;
    return SignClass::neither;
}

const char* to_string(SignClass s) {
    switch (s) {
        case SignClass::symmetric: return "symmetric";
        case SignClass::dissipative: return "dissipative";
        case SignClass::accumulative: return "accumulative";
        case SignClass::neither: return "neither";
    }
    return "neither";
}

}  // namespace opext
