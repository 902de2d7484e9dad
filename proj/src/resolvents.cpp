#include "opext/resolvents.hpp"

#include <cmath>
#include <limits>

namespace opext {

namespace {

bool on_circle(cplx p) { return std::abs(std::abs(p) - 1.0) < 1e-14; }

CMatrix eye(long n) { return CMatrix::Identity(n, n); }

// right division num * den^{-1}
CMatrix rdiv(const CMatrix& num, const CMatrix& den, const TolPolicy& tol) {
    return solve(den.adjoint(), num.adjoint(), tol).adjoint();
}

bool same_half_plane(cplx a, cplx b) { return a.imag() * b.imag() > 0.0; }

}  // namespace

CMatrix ContractionParam::operator()(cplx p) const {
    if (auto c = std::get_if<Constant>(&form)) return c->k;
    if (auto a = std::get_if<Affine>(&form)) {
        CMatrix k = a->k0 + p * a->k1;
        if (std::abs(p) > 1.0 && opnorm(k) > 1.0 + 1e-10)
            throw NotContraction("affine parameter is not contractive at the requested point");
        return k;
    }
    CMatrix k = std::get<Callback>(form).eval(p);
    if (opnorm(k) > 1.0 + 1e-10) throw NotContraction("parameter value is not a contraction");
    return k;
}

ContractionParam ContractionParam::constant(const Subspace& src, const Subspace& dst, const CMatrix& k) {
    double nk = opnorm(k);
    if (nk > 1.0 + 1e-10) throw NotContraction("constant parameter norm exceeds 1");
    return {src, dst, Constant{k}, nk};
}

ContractionParam ContractionParam::affine(const Subspace& src, const Subspace& dst, const CMatrix& k0,
                                          const CMatrix& k1) {
    double b = opnorm(k0) + opnorm(k1);
    if (b > 1.0 + 1e-10) throw NotContraction("affine parameter is not certified on the disk");
    return {src, dst, Affine{k0, k1}, b};
}

ContractionParam ContractionParam::callback(const Subspace& src, const Subspace& dst,
                                            std::function<CMatrix(cplx)> f) {
    return {src, dst, Callback{std::move(f)}, 1.0};
}

CMatrix chumakin_resolvent(const IsometryOp& v, const ContractionParam& f, cplx zeta, const TolPolicy& tol) {
    const long n = v.n;
    if (on_circle(zeta)) throw PointExcluded("chumakin_resolvent: |zeta| = 1");
    if (zeta == cplx(0.0)) return eye(n);
    if (std::abs(zeta) > 1.0) {
        CMatrix inner = chumakin_resolvent(v, f, 1.0 / std::conj(zeta), tol);
        return eye(n) - inner.adjoint();
    }
    CMatrix w = v.ambient() + f(zeta);
    return inverse(eye(n) - zeta * w, tol);
}

CMatrix inin_resolvent(const IsometryOp& v, const ContractionParam& c, cplx z0, cplx zeta, const TolPolicy& tol) {
    const long n = v.n;
    if (on_circle(zeta)) throw PointExcluded("inin_resolvent: |zeta| = 1");
    if (zeta == cplx(0.0)) return eye(n);
    if (std::abs(zeta) > 1.0) {
        CMatrix inner = inin_resolvent(v, c, z0, 1.0 / std::conj(zeta), tol);
        return eye(n) - inner.adjoint();
    }
    CMatrix vc = orthogonal_extension(v, c(zeta), z0, tol).matrix;
    return inverse(eye(n) - zeta * vc, tol);
}

CMatrix dilation_resolvent(const ExitSpaceModel& model, cplx point, const TolPolicy& tol) {
    const long n = model.n, N = model.n + model.m;
    CMatrix big = model.big();
    CMatrix rhs = CMatrix::Zero(N, n);
    rhs.topRows(n) = eye(n);
    CMatrix x;
    if (model.kind == ExitSpaceModel::Kind::unitary)
        x = solve(eye(N) - point * big, rhs, tol);
    else
        x = solve(big - point * eye(N), rhs, tol);
    return x.topRows(n);
}

CMatrix shtraus_resolvent(const LinOp& a, const ContractionParam& f, cplx lambda0, cplx lambda,
                          const TolPolicy& tol) {
    if (lambda.imag() == 0.0) throw PointExcluded("shtraus_resolvent: real point");
    if (lambda0.imag() == 0.0) throw std::invalid_argument("shtraus_resolvent: lambda0 must be non-real");
    const long n = a.n;
    cplx z = lambda0;
    CMatrix k;
    if (same_half_plane(lambda, lambda0)) {
        k = f(lambda);
    } else {
        z = std::conj(lambda0);
        k = f(std::conj(lambda)).adjoint();
    }
    Subspace nz = defect_subspaces(a, z, tol).n_space;
    NeumannResult b = neumann_extension(a, z, PartialMap::from_ambient(nz, k), tol);
    if (!b.op.everywhere_defined())
        throw PreconditionViolated("shtraus_resolvent: parameter is not defined on the whole defect space");
    return inverse(b.op.ambient() - lambda * eye(n), tol);
}

ResolventModel chumakin_model(const IsometryOp& v, const ContractionParam& f, const TolPolicy& tol) {
    return {v.n, ResolventSide::isometric, "chumakin",
            [v, f, tol](cplx p) { return chumakin_resolvent(v, f, p, tol); }};
}

ResolventModel inin_model(const IsometryOp& v, const ContractionParam& c, cplx z0, const TolPolicy& tol) {
    return {v.n, ResolventSide::isometric, "inin",
            [v, c, z0, tol](cplx p) { return inin_resolvent(v, c, z0, p, tol); }};
}

ResolventModel dilation_model(const ExitSpaceModel& model, const TolPolicy& tol) {
    ResolventSide side =
        model.kind == ExitSpaceModel::Kind::unitary ? ResolventSide::isometric : ResolventSide::symmetric;
    return {model.n, side, "dilation", [model, tol](cplx p) { return dilation_resolvent(model, p, tol); }};
}

ResolventModel shtraus_model(const LinOp& a, const ContractionParam& f, cplx lambda0, const TolPolicy& tol) {
    return {a.n, ResolventSide::symmetric, "shtraus",
            [a, f, lambda0, tol](cplx p) { return shtraus_resolvent(a, f, lambda0, p, tol); }};
}

namespace {

CMatrix circle_mean(const std::function<CMatrix(cplx)>& f, cplx c, double r) {
    CMatrix acc;
    for (int k = 0; k < 16; ++k) {
        CMatrix v = f(c + std::polar(r, 2 * kPi * k / 16.0));
        if (k == 0)
            acc = v;
        else
            acc += v;
    }
    return acc / 16.0;
}

}  // namespace

CMatrix recover_parameter(const ResolventModel& r, const IsometryOp& v, cplx zeta, const TolPolicy& tol) {
    if (std::abs(zeta) >= 1.0) throw PointExcluded("recover_parameter: zeta must lie in the open disk");
    if (zeta == cplx(0.0))
        return circle_mean([&](cplx p) { return recover_parameter(r, v, p, tol); }, 0.0, 0.1);
    const long n = v.n;
    DefectPair d0 = defect_subspaces(v, Point(0.0), tol);
    DefectPair dinf = defect_subspaces(v, Point::inf(), tol);
    CMatrix t = (eye(n) - inverse(r(zeta), tol)) / zeta;
    return projector(dinf.n_space) * t * projector(d0.n_space);
}

ContractionParam recovered_parameter(const ResolventModel& r, const IsometryOp& v, const TolPolicy& tol) {
    Subspace n0 = defect_subspaces(v, Point(0.0), tol).n_space;
    Subspace ninf = defect_subspaces(v, Point::inf(), tol).n_space;
    return ContractionParam::callback(n0, ninf, [r, v, tol](cplx p) { return recover_parameter(r, v, p, tol); });
}

CMatrix recover_inin_parameter(const ResolventModel& r, const IsometryOp& v, cplx z0, cplx zeta,
                               const TolPolicy& tol) {
    if (std::abs(zeta) >= 1.0) throw PointExcluded("recover_inin_parameter: zeta must lie in the open disk");
    if (zeta == cplx(0.0))
        return circle_mean([&](cplx p) { return recover_inin_parameter(r, v, z0, p, tol); }, 0.0, 0.1);
    const long n = v.n;
    CMatrix vc = (eye(n) - inverse(r(zeta), tol)) / zeta;
    CMatrix vplus = orthogonal_extension_plus(vc, z0, tol);
    Subspace nz0 = defect_subspaces(v, Point(z0), tol).n_space;
    return vplus * projector(nz0);
}

bool AxiomReport::all_pass() const {
    for (const auto& a : axioms)
        if (!a.pass) return false;
    return true;
}

double mean_value_residual(const std::function<CMatrix(cplx)>& f, cplx p, double radius) {
    CMatrix c = f(p);
    CMatrix m = circle_mean(f, p, radius);
    return (c - m).norm() / std::max(1.0, c.norm());
}

AxiomReport verify_resolvent_axioms(const ResolventModel& r, const IsometryOp& v, const std::vector<cplx>& samples,
                                    double tol) {
    const long n = v.n;
    double r1 = 0, r2 = 0, r3 = 0, r4 = 0, r5 = 0;
    CMatrix r0 = r(0.0);
    r2 = (r0 - eye(n)).norm();
    for (cplx z : samples) {
        if (on_circle(z)) throw PointExcluded("verify_resolvent_axioms: sample on the unit circle");
        CMatrix rz = r(z);
        if (v.d() > 0) r1 = std::max(r1, (rz * (v.dom.basis - z * v.ran) - v.dom.basis).norm());
        CMatrix re = 0.5 * (rz + rz.adjoint());
        Eigen::SelfAdjointEigenSolver<CMatrix> es(re);
        if (std::abs(z) < 1.0)
            r3 = std::max(r3, 0.5 - es.eigenvalues().minCoeff());
        else
            r3 = std::max(r3, es.eigenvalues().maxCoeff() - 0.5);
        double scale = z == cplx(0.0) ? 1.0 : std::abs(1.0 - std::abs(z));
        r4 = std::max(r4, mean_value_residual(r.eval, z, 0.05 * scale));
        if (z != cplx(0.0)) r5 = std::max(r5, (rz.adjoint() - eye(n) + r(1.0 / std::conj(z))).norm());
    }
    r3 = std::max(r3, 0.0);
    AxiomReport rep;
    rep.axioms = {{"inverse_on_domain", r1 <= tol, r1},
                  {"identity_at_zero", r2 <= tol, r2},
                  {"real_part_bound", r3 <= tol, r3},
                  {"analyticity", r4 <= tol, r4},
                  {"adjoint_identity", r5 <= tol, r5}};
    return rep;
}

CMatrix cayley_transfer(const ResolventModel& r_in, cplx z, TransferDirection dir, cplx point) {
    if (z.imag() == 0.0) throw std::invalid_argument("cayley_transfer: z must be non-real");
    const long n = r_in.n;
    const cplx zb = std::conj(z);
    if (dir == TransferDirection::sym_to_iso) {
        cplx zeta = point;
        if (on_circle(zeta)) throw PointExcluded("cayley_transfer: unimodular point");
        if (zeta == cplx(0.0)) return eye(n);
        cplx lambda = (z - zb * zeta) / (1.0 - zeta);
        return ((lambda - zb) / (z - zb)) * eye(n) + ((lambda - zb) * (lambda - z) / (z - zb)) * r_in(lambda);
    }
    cplx lambda = point;
    if (lambda == z || lambda == zb || lambda.imag() == 0.0) throw PointExcluded("cayley_transfer: excluded point");
    cplx zeta = (lambda - z) / (lambda - zb);
    return (r_in(zeta) - ((lambda - zb) / (z - zb)) * eye(n)) * ((z - zb) / ((lambda - zb) * (lambda - z)));
}

ResolventModel cayley_transfer_model(const ResolventModel& r_in, cplx z, TransferDirection dir) {
    ResolventSide side = dir == TransferDirection::sym_to_iso ? ResolventSide::isometric : ResolventSide::symmetric;
    return {r_in.n, side, r_in.provenance + "+cayley",
            [r_in, z, dir](cplx p) { return cayley_transfer(r_in, z, dir, p); }};
}

CMatrix b_lambda(const ResolventModel& r, cplx lambda, const TolPolicy& tol) {
    if (lambda.imag() == 0.0) throw PointExcluded("b_lambda: real point");
    return inverse(r(lambda), tol) + lambda * eye(r.n);
}

CMatrix frak_F(const ResolventModel& r, const LinOp& a, cplx lambda0, cplx lambda, const TolPolicy& tol) {
    if (!same_half_plane(lambda, lambda0)) throw PointExcluded("frak_F: lambda outside the half-plane of lambda0");
    const long n = a.n;
    CMatrix b = b_lambda(r, lambda, tol);
    CMatrix pn = projector(defect_subspaces(a, lambda0, tol).n_space);
    return (b - std::conj(lambda0) * eye(n)) * solve(b - lambda0 * eye(n), pn, tol);
}

ContractionParam frak_F_param(const ResolventModel& r, const LinOp& a, cplx lambda0, const TolPolicy& tol) {
    Subspace src = defect_subspaces(a, lambda0, tol).n_space;
    Subspace dst = defect_subspaces(a, std::conj(lambda0), tol).n_space;
    return ContractionParam::callback(src, dst, [r, a, lambda0, tol](cplx p) {
        return frak_F(r, a, lambda0, p, tol);
    });
}

CMatrix zero_parameter_extension(const LinOp& a, cplx lambda, const TolPolicy& tol) {
    const long n = a.n;
    Subspace nb = defect_subspaces(a, std::conj(lambda), tol).n_space;
    CMatrix dom(n, a.d() + nb.dim()), act(n, a.d() + nb.dim());
    dom << a.dom.basis, nb.basis;
    act << a.action, lambda * nb.basis;
    return rdiv(act, dom, tol);
}

CMatrix characteristic_function(const LinOp& a, cplx lambda0, cplx lambda, const TolPolicy& tol) {
    if (!same_half_plane(lambda, lambda0))
        throw PointExcluded("characteristic_function: lambda outside the half-plane of lambda0");
    const long n = a.n;
    const cplx z = lambda0, zb = std::conj(lambda0);
    CMatrix azb = zero_parameter_extension(a, zb, tol);
    CMatrix pz = projector(defect_subspaces(a, z, tol).n_space);
    CMatrix pzb = projector(defect_subspaces(a, zb, tol).n_space);
    CMatrix proj = ((lambda - zb) / (z - zb)) * pz * (azb - z * eye(n)) * solve(azb - lambda * eye(n), pzb, tol);
    return ((lambda - lambda0) / (lambda - std::conj(lambda0))) * proj;
}

CMatrix frak_F_via_char(const BlockParam& t, const LinOp& a_e, cplx lambda0, cplx lambda, const TolPolicy& tol) {
    const long m = a_e.n;
    if (m == 0) return t.t11;
    CMatrix ce = characteristic_function(a_e, lambda0, lambda, tol);
    return t.t11 + t.t12 * solve(eye(m) - ce * t.t22, ce * t.t21, tol);
}

void RaySpec::validate() const {
    if (lambda0.imag() == 0.0) throw std::invalid_argument("RaySpec: lambda0 must be non-real");
    if (!(epsilon > 0.0 && epsilon < kPi / 2)) throw std::invalid_argument("RaySpec: epsilon out of range");
    double a = lambda0.imag() > 0 ? angle : -angle;
    if (!(a > epsilon && a < kPi - epsilon)) throw std::invalid_argument("RaySpec: direction outside the sector");
    for (std::size_t k = 0; k < magnitudes.size(); ++k) {
        if (magnitudes[k] <= 0.0 || (k > 0 && magnitudes[k] <= magnitudes[k - 1]))
            throw std::invalid_argument("RaySpec: magnitudes must be positive and increasing");
    }
}

RaySpec RaySpec::powers_of_ten(cplx lambda0, int k_from, int k_to, double epsilon) {
    RaySpec r;
    r.lambda0 = lambda0;
    r.angle = lambda0.imag() > 0 ? kPi / 2 : -kPi / 2;
    r.epsilon = epsilon;
    for (int k = k_from; k <= k_to; ++k) r.magnitudes.push_back(std::pow(10.0, k));
    return r;
}

std::vector<std::vector<double>> norm_defect_profile(const std::function<CMatrix(cplx)>& family,
                                                     const Subspace& basis, const RaySpec& ray) {
    std::vector<std::vector<double>> out(static_cast<std::size_t>(basis.dim()));
    for (std::size_t k = 0; k < ray.magnitudes.size(); ++k) {
        cplx lam = ray.at(k);
        CMatrix f = family(lam);
        for (long j = 0; j < basis.dim(); ++j) {
            CVector psi = basis.basis.col(j);
            out[static_cast<std::size_t>(j)].push_back(std::abs(lam) * (psi.norm() - (f * psi).norm()));
        }
    }
    return out;
}

PhiInfinityReport phi_infinity(const LinOp& a, const ExitSpaceModel& model, cplx lambda0, const RaySpec& ray,
                               const TolPolicy& tol) {
    ray.validate();
    PhiInfinityReport rep;
    LinOp b_inf = compressed_extension(model, tol);
    rep.direct = neumann_parameter(b_inf, a, lambda0, tol);
    rep.magnitudes = ray.magnitudes;
    ResolventModel r = dilation_model(model, tol);
    auto family = [&](cplx p) { return frak_F(r, a, lambda0, p, tol); };
    CMatrix phi = rep.direct.ambient();
    rep.errors.resize(static_cast<std::size_t>(rep.direct.src.dim()));
    for (std::size_t k = 0; k < ray.magnitudes.size(); ++k) {
        CMatrix f = family(ray.at(k));
        for (long j = 0; j < rep.direct.src.dim(); ++j) {
            CVector psi = rep.direct.src.basis.col(j);
            rep.errors[static_cast<std::size_t>(j)].push_back((f * psi - phi * psi).norm());
        }
    }
    rep.membership = norm_defect_profile(family, defect_subspaces(a, lambda0, tol).n_space, ray);
    return rep;
}

ClassCheck admissible_class_check(const ContractionParam& f, const LinOp& a, cplx lambda0, const RaySpec& ray,
                                  const TolPolicy& tol) {
    PartialMap x = forbidden_operator(a, lambda0, tol);
    if (x.src.dim() == 0) return {true, false};
    Subspace common = intersect(f.src, x.src, tol);
    if (auto c = std::get_if<ContractionParam::Constant>(&f.form)) {
        return {is_admissible(a, lambda0, PartialMap::from_ambient(f.src, c->k), tol), false};
    }
    if (common.dim() == 0) return {true, f.is_callback()};
    CMatrix xamb = x.ambient();
    if (auto af = std::get_if<ContractionParam::Affine>(&f.form)) {
        // the limit along the ray exists only where k1 vanishes, and equals k0 there
        CMatrix stacked(2 * a.n, common.dim());
        stacked << af->k1 * common.basis, (af->k0 - xamb) * common.basis;
        return {null_space(stacked, tol).cols() == 0, false};
    }
    ray.validate();
    const std::size_t last = ray.magnitudes.size() - 1;
    CMatrix diff = (f(ray.at(last)) - xamb) * common.basis;
    Eigen::JacobiSVD<CMatrix> svd(diff, Eigen::ComputeFullV);
    CVector psi = common.basis * svd.matrixV().col(common.dim() - 1);
    double gap_last = svd.singularValues()(common.dim() - 1);
    auto prof = norm_defect_profile(std::get<ContractionParam::Callback>(f.form).eval, Subspace(a.n, psi), ray);
    double q_first = std::abs(prof[0].front());
    double q_last = std::abs(prof[0].back());
    bool bounded = q_last <= 10.0 * q_first + 1e-6;
    bool converges = gap_last < 1e-3;
    return {!(bounded && converges), true};
}

}  // namespace opext
