#include "opext/extensions.hpp"

#include <cmath>
#include <limits>

namespace opext {

PartialMap forbidden_operator(const LinOp& a, cplx z, const TolPolicy& tol) {
    if (z.imag() == 0.0) throw std::invalid_argument("forbidden_operator: z must be non-real");
    const long n = a.n;
    Subspace k = orthogonal_complement(a.dom, tol);
    if (k.dim() == 0) return PartialMap::empty(n);
    CMatrix pz = projector(defect_subspaces(a, z, tol).n_space);
    CMatrix pzb = projector(defect_subspaces(a, std::conj(z), tol).n_space);
    return map_from_pairs(pz * k.basis, pzb * k.basis, tol);
}

AdmissibilityDetail admissibility_detail(const LinOp& a, cplx z, const PartialMap& t, const TolPolicy& tol) {
    const long n = a.n;
    const double thr = tol.threshold(1.0, n);
    PartialMap x = forbidden_operator(a, z, tol);

    double ks = std::numeric_limits<double>::infinity();
    Subspace common = intersect(t.src, x.src, tol);
    if (common.dim() > 0) ks = sigma_min((t.ambient() - x.ambient()) * common.basis);

    PartialMap w = direct_sum(cayley_map(a, z, tol), t);
    double fs = std::numeric_limits<double>::infinity();
    if (w.src.dim() > 0) fs = sigma_min(w.matrix - w.src.basis);

    bool a_ok = ks > thr;
    bool b_ok = fs > thr;
    if (a_ok != b_ok)
        throw InternalDisagreement("is_admissible: kernel test and fixed-point test disagree (kernel sigma " +
                                   std::to_string(ks) + ", fixed-point sigma " + std::to_string(fs) + ")");
    return {a_ok, ks, fs};
}

bool is_admissible(const LinOp& a, cplx z, const PartialMap& t, const TolPolicy& tol) {
    return admissibility_detail(a, z, t, tol).admissible;
}

PartialMap neumann_parameter(const LinOp& b, const LinOp& a, cplx z, const TolPolicy& tol) {
    PartialMap ub = cayley_map(b, z, tol);
    Subspace nz = defect_subspaces(a, z, tol).n_space;
    Subspace dt = intersect(ub.src, nz, tol);
    if (dt.dim() == 0) return PartialMap::empty(a.n);
    return {dt, ub.ambient() * dt.basis};
}

NeumannResult neumann_extension(const LinOp& a, cplx z, const PartialMap& t, const TolPolicy& tol) {
    if (z.imag() == 0.0) throw std::invalid_argument("neumann_extension: z must be non-real");
    const long n = a.n;
    DefectPair dz = defect_subspaces(a, z, tol);
    DefectPair dzb = defect_subspaces(a, std::conj(z), tol);
    if (t.src.dim() > 0) {
        if ((projector(dz.m_space) * t.src.basis).norm() > 1e-8)
            throw PreconditionViolated("neumann_extension: parameter domain is not inside N_z");
        if ((projector(dzb.m_space) * t.matrix).norm() > 1e-8)
            throw PreconditionViolated("neumann_extension: parameter range is not inside N_conj(z)");
    }
    double tn = t.norm();
    if (tn > 1.0 + 1e-10) throw NotContraction("neumann_extension: parameter norm exceeds 1");
    if (!is_admissible(a, z, t, tol)) throw NotAdmissible("neumann_extension: parameter is not admissible");

    PartialMap w = direct_sum(cayley_map(a, z, tol), t);
    LinOp b = cayley_inverse_map(w, z, tol);

    NeumannResult r;
    r.op = b;
    bool iso = t.is_isometric(1e-9);
    bool full_dom = t.src.dim() == dz.n_space.dim();
    bool full_ran = numerical_rank(t.matrix, tol) == dzb.n_space.dim();
    r.signs = classify_signs(b, tol);
    if (iso) {
        r.maximal = full_dom || full_ran;
        r.selfadjoint = full_dom && full_ran;
    } else {
        r.maximal = full_dom;
        r.selfadjoint = false;
    }
    // the parameter must be recoverable from the extension
    PartialMap back = neumann_parameter(b, a, z, tol);
    if (map_distance(back, t) > 1e-8 * std::max(1.0, b.action.norm()))
        throw InternalDisagreement("neumann_extension: parameter is not recovered from the extension");
    (void)n;
    return r;
}

PartialMap build_admissible_isometry(const LinOp& a, cplx z, const Subspace& n_src, const Subspace& n_dst,
                                     std::uint64_t seed, const TolPolicy& tol) {
    const long n = a.n;
    if (n_src.dim() != n_dst.dim())
        throw std::invalid_argument("build_admissible_isometry: subspace dimensions differ");
    if (n_src.dim() == 0) return PartialMap::empty(n);
    Rng rng(seed);
    double alpha = random_uniform(rng, kPi / 4, 7 * kPi / 4);
    CMatrix id = CMatrix::Identity(n, n);
    CMatrix p_src = projector(n_src);
    CMatrix p_dst = projector(n_dst);

    // restriction of X_z to vectors of N_src sent into N_dst
    PartialMap x = forbidden_operator(a, z, tol);
    PartialMap x0 = PartialMap::empty(n);
    if (x.src.dim() > 0) {
        CMatrix stacked(2 * n, x.src.dim());
        stacked << (id - p_src) * x.src.basis, (id - p_dst) * x.matrix;
        CMatrix c = null_space(stacked, tol);
        if (c.cols() > 0) x0 = map_from_pairs(x.src.basis * c, x.matrix * c, tol);
    }
    const long k = x0.src.dim();

    PartialMap corrected = PartialMap::empty(n);
    Subspace kspace = Subspace::zero(n);
    if (k > 0) {
        Subspace n2 = x0.range(tol);
        CMatrix kb = n_dst.basis * random_isometry(n_dst.dim(), k, rng);
        kspace = Subspace(n, kb);
        CMatrix u = polar_unitary(kb.adjoint() * n2.basis);
        // U: n2.basis v |-> kb u v, and its fixed vectors
        CMatrix uimg = kb * u;
        CMatrix h0 = null_space(uimg - n2.basis, tol);
        CMatrix h0amb = n2.basis * h0;
        CMatrix ph0 = h0amb * h0amb.adjoint();
        CMatrix uamb = uimg * n2.basis.adjoint();
        CMatrix s = std::polar(1.0, alpha) * ph0 + uamb * (projector(n2) - ph0);
        corrected = {x0.src, s * x0.matrix};
    }

    Subspace rest_src = orthonormalize((id - projector(x0.src)) * n_src.basis, tol);
    Subspace rest_dst = orthonormalize((id - projector(kspace)) * n_dst.basis, tol);
    if (rest_src.dim() != rest_dst.dim())
        throw InternalDisagreement("build_admissible_isometry: complement dimensions differ");
    PartialMap t = {rest_src, rest_dst.basis * random_unitary(rest_dst.dim(), rng)};

    PartialMap v = direct_sum(corrected, t);
    if (!v.is_isometric(1e-9)) throw InternalDisagreement("build_admissible_isometry: result is not isometric");
    if (!is_admissible(a, z, v, tol)) throw InternalDisagreement("build_admissible_isometry: result not admissible");
    return v;
}

CMatrix BlockParam::assembled() const {
    const long n = t11.rows(), m = t22.rows();
    CMatrix t(n + m, n + m);
    t << t11, t12, t21, t22;
    return t;
}

BlockParam BlockParam::split(const CMatrix& t, long n) {
    const long m = t.rows() - n;
    return {t.topLeftCorner(n, n), t.topRightCorner(n, m), t.bottomLeftCorner(m, n), t.bottomRightCorner(m, m)};
}

CMatrix ExitSpaceModel::big() const {
    if (!big_op.everywhere_defined())
        throw PreconditionViolated("exit-space model: extension is not everywhere defined");
    return big_op.ambient();
}

LinOp direct_sum_ops(const LinOp& a, const LinOp& b) {
    const long n = a.n, m = b.n, N = n + m;
    CMatrix dom = CMatrix::Zero(N, a.d() + b.d());
    CMatrix act = CMatrix::Zero(N, a.d() + b.d());
    dom.topLeftCorner(n, a.d()) = a.dom.basis;
    dom.bottomRightCorner(m, b.d()) = b.dom.basis;
    act.topLeftCorner(n, a.d()) = a.action;
    act.bottomRightCorner(m, b.d()) = b.action;
    return {N, Subspace(N, dom), act};
}

IsometryOp direct_sum_ops(const IsometryOp& a, const IsometryOp& b) {
    LinOp s = direct_sum_ops(LinOp{a.n, a.dom, a.ran}, LinOp{b.n, b.dom, b.ran});
    return {s.n, s.dom, s.action};
}

namespace {

LinOp hermitian_part_checked(const LinOp& big) {
    if (!big.everywhere_defined()) return big;
    CMatrix h = big.ambient();
    double scale = std::max(1.0, h.norm());
    if ((h - h.adjoint()).norm() > 1e-9 * scale)
        throw InternalDisagreement("exit_space_extension: extension is not Hermitian");
    return {big.n, Subspace::whole(big.n), 0.5 * (h + h.adjoint())};
}

}  // namespace

ExitSpaceModel exit_space_extension(const LinOp& a, long m, cplx z, const BlockParam& t, const TolPolicy& tol) {
    const long n = a.n, N = n + m;
    LinOp big_a = direct_sum_ops(a, SymmetricOp::zero(m));
    CMatrix tamb = t.assembled();
    if (tamb.rows() != N) throw std::invalid_argument("exit_space_extension: block sizes do not match");
    Subspace nz = defect_subspaces(big_a, z, tol).n_space;
    Subspace nzb = defect_subspaces(big_a, std::conj(z), tol).n_space;
    CMatrix pz = projector(nz), pzb = projector(nzb);
    if ((tamb - tamb * pz).norm() > 1e-9 || (pzb * tamb - tamb).norm() > 1e-9 ||
        (tamb.adjoint() * tamb - pz).norm() > 1e-9 || nz.dim() != nzb.dim())
        throw PreconditionViolated("exit_space_extension: T is not unitary from N_z onto N_conj(z)");

    // T22 against X_z(o) = identity on H_e
    if (m > 0) {
        double s = sigma_min(CMatrix::Identity(m, m) - t.t22);
        if (s <= tol.threshold(1.0, m)) throw NotAdmissible("exit_space_extension: T22 is not admissible", "t22");
    }
    PartialMap phi = phi_operator(a, m, z, t, tol);
    bool phi_ok = is_admissible(a, z, phi, tol);
    PartialMap tmap = PartialMap::from_ambient(nz, tamb);
    bool whole_ok = is_admissible(big_a, z, tmap, tol);
    if (!phi_ok) {
        if (whole_ok) throw InternalDisagreement("exit_space_extension: admissibility transfer failed");
        throw NotAdmissible("exit_space_extension: Phi is not admissible", "phi");
    }
    if (!whole_ok) throw InternalDisagreement("exit_space_extension: admissibility transfer failed");

    NeumannResult r = neumann_extension(big_a, z, tmap, tol);
    ExitSpaceModel model;
    model.kind = ExitSpaceModel::Kind::hermitian;
    model.n = n;
    model.m = m;
    model.big_op = hermitian_part_checked(r.op);
    model.inner_sym = a;
    model.exit_sym = SymmetricOp::zero(m);
    model.z = z;
    model.t = tmap;
    return model;
}

ExitSpaceModel exit_space_extension(const LinOp& a, const LinOp& a_e, cplx z, const PartialMap& t,
                                    const TolPolicy& tol) {
    LinOp big_a = direct_sum_ops(a, a_e);
    NeumannResult r = neumann_extension(big_a, z, t, tol);
    ExitSpaceModel model;
    model.kind = ExitSpaceModel::Kind::hermitian;
    model.n = a.n;
    model.m = a_e.n;
    model.big_op = hermitian_part_checked(r.op);
    model.inner_sym = a;
    model.exit_sym = a_e;
    model.z = z;
    model.t = t;
    return model;
}

ExitSpaceModel unitary_model(const IsometryOp& v, long m, const CMatrix& t, const TolPolicy& tol) {
    const long N = v.n + m;
    IsometryOp big_v = direct_sum_ops(v, IsometryOp::zero(m));
    (void)tol;
    CMatrix p0 = CMatrix::Identity(N, N) - projector(big_v.dom);
    CMatrix pinf = CMatrix::Identity(N, N) - big_v.ran * big_v.ran.adjoint();
    if ((t - t * p0).norm() > 1e-9 || (pinf * t - t).norm() > 1e-9 || (t.adjoint() * t - p0).norm() > 1e-9)
        throw PreconditionViolated("unitary_model: T is not unitary from N_0 onto N_inf");
    ExitSpaceModel model;
    model.kind = ExitSpaceModel::Kind::unitary;
    model.n = v.n;
    model.m = m;
    model.big_op = {N, Subspace::whole(N), big_v.ambient() + t};
    model.inner_iso = v;
    return model;
}

PartialMap phi_operator(const LinOp& a, long m, cplx z, const BlockParam& t, const TolPolicy& tol) {
    Subspace nz = defect_subspaces(a, z, tol).n_space;
    CMatrix phi = t.t11;
    if (m > 0) {
        CMatrix corr;
        try {
            corr = solve(CMatrix::Identity(m, m) - t.t22, t.t21, tol);
        } catch (const Singular&) {
            throw T22NotAdmissible("phi_operator: X_z(A_e) - T22 is not invertible");
        }
        phi += t.t12 * corr;
    }
    PartialMap out = PartialMap::from_ambient(nz, phi);
    // isometric T gives isometric Phi
    LinOp big_a = direct_sum_ops(a, SymmetricOp::zero(m));
    Subspace bnz = defect_subspaces(big_a, z, tol).n_space;
    CMatrix tb = t.assembled() * bnz.basis;
    if ((tb.adjoint() * tb - CMatrix::Identity(bnz.dim(), bnz.dim())).norm() < 1e-9 && !out.is_isometric(1e-8))
        throw InternalDisagreement("phi_operator: Phi is not isometric although T is");
    return out;
}

PartialMap phi_via_theta(const ExitSpaceModel& model, const TolPolicy& tol) {
    if (!model.inner_sym || !model.exit_sym || !model.z || !model.t)
        throw PreconditionViolated("phi_via_theta: model carries no symmetric provenance");
    const LinOp& a = *model.inner_sym;
    const long n = model.n, m = model.m;
    const cplx z = *model.z;
    LinOp big_a = direct_sum_ops(a, *model.exit_sym);
    PartialMap w = direct_sum(cayley_map(big_a, z, tol), *model.t);
    if (w.src.dim() == 0) return PartialMap::empty(n);
    CMatrix c = m > 0 ? null_space((w.matrix - w.src.basis).bottomRows(m), tol)
                      : CMatrix::Identity(w.src.dim(), w.src.dim());
    if (c.cols() == 0) return PartialMap::empty(n);
    CMatrix theta = w.src.basis * c;
    CMatrix img = w.matrix * c;
    CMatrix pz = projector(defect_subspaces(a, z, tol).n_space);
    CMatrix pzb = projector(defect_subspaces(a, std::conj(z), tol).n_space);
    CMatrix g = pz * theta.topRows(n);
    CMatrix y = pzb * img.topRows(n);
    Subspace src = orthonormalize(g, tol);
    if (src.dim() == 0) return PartialMap::empty(n);
    Eigen::JacobiSVD<CMatrix> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(tol.abs_floor);
    CMatrix coef = svd.solve(src.basis);
    return {src, y * coef};
}

double operator_distance(const LinOp& a, const LinOp& b) {
    if (a.d() != b.d() || a.n != b.n) return std::numeric_limits<double>::infinity();
    double dd = (projector(a.dom) - projector(b.dom)).norm();
    return dd + (a.ambient() - b.ambient()).norm();
}

double map_distance(const PartialMap& a, const PartialMap& b) {
    if (a.src.dim() != b.src.dim()) return std::numeric_limits<double>::infinity();
    double dd = (projector(a.src) - projector(b.src)).norm();
    return dd + (a.ambient() - b.ambient()).norm();
}

LinOp compressed_extension(const ExitSpaceModel& model, const TolPolicy& tol) {
    const long n = model.n, m = model.m;
    const LinOp& big = model.big_op;
    LinOp b;
    if (m == 0) {
        b = big;
    } else {
        CMatrix c = null_space(big.dom.basis.bottomRows(m), tol);
        if (c.cols() == 0) {
            b = {n, Subspace::zero(n), CMatrix(n, 0)};
        } else {
            CMatrix l = (big.dom.basis * c).topRows(n);
            CMatrix y = (big.action * c).topRows(n);
            PartialMap pm = map_from_pairs(l, y, tol);
            b = {n, pm.src, pm.matrix};
        }
    }
    if (model.inner_sym && model.z && model.t && m > 0) {
        PartialMap phi = phi_via_theta(model, tol);
        LinOp a_phi = neumann_extension(*model.inner_sym, *model.z, phi, tol).op;
        double dist = operator_distance(b, a_phi);
        if (!(dist <= 1e-9 * std::max(1.0, big.action.norm())))
            throw InternalDisagreement("compressed_extension: compression differs from A_Phi");
    }
    return b;
}

}  // namespace opext
