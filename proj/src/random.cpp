#include "opext/random.hpp"

namespace opext {

IsometryOp random_isometry_op(long n, long d, Rng& rng) {
    CMatrix q = random_isometry(n, d, rng);
    CMatrix r = random_isometry(n, d, rng);
    return {n, Subspace(n, q), r};
}

SymmetricOp random_symmetric_op(long n, long d, Rng& rng) {
    CMatrix q = random_isometry(n, d, rng);
    CMatrix h = random_hermitian(d, rng);
    CMatrix y = random_gaussian(n, d, rng);
    CMatrix act = q * h + (CMatrix::Identity(n, n) - q * q.adjoint()) * y;
    return {LinOp{n, Subspace(n, q), act}};
}

CMatrix random_unitary_between(const Subspace& src, const Subspace& dst, Rng& rng) {
    if (src.dim() != dst.dim()) throw std::invalid_argument("random_unitary_between: dimensions differ");
    if (src.dim() == 0) return CMatrix::Zero(dst.ambient, src.ambient);
    return dst.basis * random_unitary(src.dim(), rng) * src.basis.adjoint();
}

ExitSpaceModel random_unitary_model(const IsometryOp& v, long m, Rng& rng) {
    IsometryOp big = direct_sum_ops(v, IsometryOp::zero(m));
    Subspace n0 = orthogonal_complement(big.dom);
    Subspace ninf = orthogonal_complement(big.range_space());
    return unitary_model(v, m, random_unitary_between(n0, ninf, rng));
}

ExitSpaceModel random_hermitian_model(const LinOp& a, long m, long d_e, cplx z, Rng& rng, const TolPolicy& tol) {
    LinOp a_e = random_symmetric_op(m, d_e, rng);
    LinOp big = direct_sum_ops(a, a_e);
    Subspace nz = defect_subspaces(big, z, tol).n_space;
    Subspace nzb = defect_subspaces(big, std::conj(z), tol).n_space;
    // a Haar unitary is admissible almost surely and couples H and H_e generically
    PartialMap t = PartialMap::from_ambient(nz, random_unitary_between(nz, nzb, rng));
    if (!is_admissible(big, z, t, tol)) t = build_admissible_isometry(big, z, nz, nzb, rng(), tol);
    return exit_space_extension(a, a_e, z, t, tol);
}

}  // namespace opext
