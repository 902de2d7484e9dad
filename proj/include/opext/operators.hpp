#pragma once

#include "opext/numkernel.hpp"

#include <optional>

namespace opext {

// A linear map defined on a subspace. matrix holds the images of the src basis
// columns, so the map is src.basis * c  |->  matrix * c.
struct PartialMap {
    Subspace src;
    CMatrix matrix;  // dst_ambient x src.dim()

    long dst_ambient() const { return matrix.rows(); }
    // the map extended by zero on the complement of src
    CMatrix ambient() const;
    Subspace range(const TolPolicy& tol = {}) const;
    bool is_isometric(double eps) const;
    double norm() const { return opnorm(matrix); }

    static PartialMap empty(long n) { return {Subspace::zero(n), CMatrix(n, 0)}; }
    // restriction of an everywhere-defined matrix to src
    static PartialMap from_ambient(const Subspace& src, const CMatrix& m) { return {src, m * src.basis}; }
};

// Build the map sending each column of g to the corresponding column of y.
// g must have full column rank. The source basis is orthonormalize(g).
PartialMap map_from_pairs(const CMatrix& g, const CMatrix& y, const TolPolicy& tol = {});

// orthogonal sum of two maps with mutually orthogonal sources
PartialMap direct_sum(const PartialMap& a, const PartialMap& b);

struct IsometryOp {
    long n = 0;
    Subspace dom;
    CMatrix ran;  // n x d, orthonormal

    long d() const { return dom.dim(); }
    CMatrix ambient() const { return ran * dom.basis.adjoint(); }
    PartialMap as_map() const { return {dom, ran}; }
    Subspace range_space() const { return {n, ran}; }

    static IsometryOp make(const Subspace& dom, const CMatrix& ran, double eps = 1e-10);
    static IsometryOp zero(long n) { return {n, Subspace::zero(n), CMatrix(n, 0)}; }
    static IsometryOp unitary(const CMatrix& u) {
        return {u.rows(), Subspace::whole(u.rows()), u};
    }
};

// Operator with an explicit domain: dom.basis * c |-> action * c.
// Used for symmetric operators and for their non-symmetric extensions.
struct LinOp {
    long n = 0;
    Subspace dom;
    CMatrix action;  // n x d

    long d() const { return dom.dim(); }
    CMatrix ambient() const { return action * dom.basis.adjoint(); }
    bool everywhere_defined() const { return d() == n; }
    // D^* action, Hermitian for a symmetric operator
    CMatrix gram() const { return dom.basis.adjoint() * action; }
};

struct SymmetricOp : LinOp {
    static SymmetricOp make(const Subspace& dom, const CMatrix& action, double eps = 1e-9);
    static SymmetricOp zero(long n) { return {LinOp{n, Subspace::zero(n), CMatrix(n, 0)}}; }
    static SymmetricOp hermitian(const CMatrix& h) {
        return {LinOp{h.rows(), Subspace::whole(h.rows()), h}};
    }
};

// A point of the extended plane; the point at infinity is a flag.
struct Point {
    cplx value{0.0, 0.0};
    bool infinity = false;

    Point() = default;
    Point(cplx v) : value(v) {}
    Point(double v) : value(v) {}
    static Point inf() {
        Point p;
        p.infinity = true;
        return p;
    }
    // the point 1 / conj(z)
    static Point reciprocal_conj(cplx z);
};

struct DefectPair {
    Subspace m_space;
    Subspace n_space;
};

DefectPair defect_subspaces(const IsometryOp& v, Point zeta, const TolPolicy& tol = {});
DefectPair defect_subspaces(const LinOp& a, cplx z, const TolPolicy& tol = {});

enum class Direction { forward, inverse };

IsometryOp moebius_transform(const IsometryOp& v, cplx z, Direction dir, const TolPolicy& tol = {});

// U_z = (A - conj z)(A - z)^{-1}
IsometryOp cayley_transform(const SymmetricOp& a, cplx z, const TolPolicy& tol = {});
// Same map for an arbitrary operator; the result need not be isometric.
PartialMap cayley_map(const LinOp& a, cplx z, const TolPolicy& tol = {});
// z + (z - conj z)(W - E)^{-1} for a partial map W without fixed vectors.
// Throws FixedPointObstruction when W has eigenvalue 1 on its domain.
LinOp cayley_inverse_map(const PartialMap& w, cplx z, const TolPolicy& tol = {});
SymmetricOp cayley_inverse(const IsometryOp& u, cplx z, const TolPolicy& tol = {});

struct RegularType {
    bool regular;
    double lower_bound;
};

RegularType is_regular_type(const IsometryOp& v, cplx point, const TolPolicy& tol = {});
RegularType is_regular_type(const LinOp& a, cplx point, const TolPolicy& tol = {});

struct FullContraction {
    CMatrix matrix;
    double norm_bound;
};

// c is given in ambient form: zero on M_{z0}, values in N_{1/conj z0}
FullContraction orthogonal_extension(const IsometryOp& v, const CMatrix& c, cplx z0,
                                     const TolPolicy& tol = {});
// inverse direction: the map V^+ = (V_C)_{z0} with V_C everywhere defined
CMatrix orthogonal_extension_plus(const CMatrix& vc, cplx z0, const TolPolicy& tol = {});

enum class SignClass { symmetric, dissipative, accumulative, neither };

SignClass classify_signs(const LinOp& b, const TolPolicy& tol = {});
const char* to_string(SignClass s);

}  // namespace opext
