#include "opext/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace opext {

bool ArcSpec::contains(double location) const { return location >= lo && location < hi; }

ArcSpec ArcSpec::arc(double t1, double t2) {
    if (!(0.0 <= t1 && t1 < t2 && t2 < 2 * kPi)) throw std::invalid_argument("ArcSpec: need 0 <= t1 < t2 < 2pi");
    return {SpectralAtoms::Kind::circle, t1, t2};
}

ArcSpec ArcSpec::interval(double a, double b) {
    if (!(a < b)) throw std::invalid_argument("ArcSpec: empty interval");
    return {SpectralAtoms::Kind::line, a, b};
}

SpectralAtoms spectral_measure(const CMatrix& op, NormalKind kind, const TolPolicy& tol) {
    ExitSpaceModel m;
    m.kind = kind == NormalKind::unitary ? ExitSpaceModel::Kind::unitary : ExitSpaceModel::Kind::hermitian;
    m.n = op.rows();
    m.m = 0;
    m.big_op = {op.rows(), Subspace::whole(op.rows()), op};
    return spectral_measure(m, tol);
}

SpectralAtoms spectral_measure(const ExitSpaceModel& model, const TolPolicy& tol) {
    const long n = model.n;
    bool unitary = model.kind == ExitSpaceModel::Kind::unitary;
    auto parts = eig_normal(model.big(), unitary ? NormalKind::unitary : NormalKind::hermitian, tol);
    SpectralAtoms out;
    out.kind = unitary ? SpectralAtoms::Kind::circle : SpectralAtoms::Kind::line;
    for (const auto& p : parts) {
        CMatrix w = p.proj.topLeftCorner(n, n);
        if (w.norm() <= tol.abs_floor) continue;
        w = 0.5 * (w + w.adjoint());
        double loc = unitary ? angle_of(p.value) : p.value.real();
        out.atoms.push_back({loc, w});
    }
    std::sort(out.atoms.begin(), out.atoms.end(),
              [](const SpectralAtoms::Atom& a, const SpectralAtoms::Atom& b) { return a.location < b.location; });
    return out;
}

std::vector<double> atoms_in_region(const SpectralAtoms& atoms, const ArcSpec& region) {
    std::vector<double> out;
    for (const auto& a : atoms.atoms)
        if (region.contains(a.location)) out.push_back(a.location);
    return out;
}

double verify_integral_representation(const SpectralAtoms& atoms, const ResolventModel& r,
                                      const std::vector<cplx>& samples) {
    double worst = 0.0;
    for (cplx p : samples) {
        CMatrix acc = CMatrix::Zero(r.n, r.n);
        for (const auto& a : atoms.atoms) {
            cplx kernel = atoms.kind == SpectralAtoms::Kind::circle ? 1.0 / (1.0 - p * std::polar(1.0, a.location))
                                                                    : 1.0 / (a.location - p);
            acc += kernel * a.weight;
        }
        worst = std::max(worst, (acc - r(p)).norm());
    }
    return worst;
}

PartialMap w_zeta(const IsometryOp& v, cplx zeta, const TolPolicy& tol) {
    if (std::abs(std::abs(zeta) - 1.0) > 1e-12) throw std::invalid_argument("w_zeta: zeta must be unimodular");
    const cplx inv = 1.0 / zeta;
    RegularType rt = is_regular_type(v, inv, tol);
    if (!rt.regular) throw NotRegularType("w_zeta: 1/zeta is not a point of regular type", inv);
    Subspace nz = defect_subspaces(v, Point(zeta), tol).n_space;
    Subspace n0 = orthogonal_complement(v.dom, tol);
    Subspace ninf = orthogonal_complement(v.range_space(), tol);
    if (nz.dim() != n0.dim() || nz.dim() != ninf.dim())
        throw NotRegularType("w_zeta: defect dimensions differ", inv);
    if (n0.dim() == 0) return PartialMap::empty(v.n);
    CMatrix s = n0.basis.adjoint() * nz.basis;
    CMatrix q = ninf.basis.adjoint() * nz.basis;
    CMatrix sinv;
    try {
        sinv = inverse(s, tol);
    } catch (const Singular&) {
        throw NotRegularType("w_zeta: projection onto N_0 is not invertible", inv);
    }
    return {n0, ninf.basis * (inv * q * sinv)};
}

PartialMap calW_lambda(const LinOp& a, cplx z, double lambda, const TolPolicy& tol) {
    RegularType rt = is_regular_type(a, lambda, tol);
    if (!rt.regular) throw NotRegularType("calW_lambda: lambda is not a point of regular type", lambda);
    IsometryOp u = cayley_transform(SymmetricOp{a}, z, tol);
    cplx zeta = (lambda - z) / (lambda - std::conj(z));
    try {
        return w_zeta(u, zeta / std::abs(zeta), tol);
    } catch (const NotRegularType& e) {
        throw NotRegularType(e.what(), lambda);
    }
}

ContractionParam continued_parameter(const ResolventModel& r, const IsometryOp& v, const TolPolicy& tol) {
    Subspace n0 = defect_subspaces(v, Point(0.0), tol).n_space;
    Subspace ninf = defect_subspaces(v, Point::inf(), tol).n_space;
    CMatrix p0 = projector(n0), pinf = projector(ninf);
    const long n = v.n;
    return ContractionParam::callback(n0, ninf, [r, p0, pinf, n, tol](cplx zeta) -> CMatrix {
        if (std::abs(zeta) > 1.0 + 1e-12) throw PointExcluded("continued_parameter: point outside the closed disk");
        if (zeta == cplx(0.0)) throw PointExcluded("continued_parameter: use recover_parameter at 0");
        return pinf * ((CMatrix::Identity(n, n) - inverse(r(zeta), tol)) / zeta) * p0;
    });
}

ContractionParam continued_parameter(const ResolventModel& r, const LinOp& a, cplx lambda0, const TolPolicy& tol) {
    Subspace src = defect_subspaces(a, lambda0, tol).n_space;
    Subspace dst = defect_subspaces(a, std::conj(lambda0), tol).n_space;
    CMatrix pn = projector(src);
    const long n = a.n;
    return ContractionParam::callback(src, dst, [r, pn, n, lambda0, tol](cplx lambda) -> CMatrix {
        if (lambda.imag() * lambda0.imag() < 0.0)
            throw PointExcluded("continued_parameter: point in the opposite half-plane");
        CMatrix id = CMatrix::Identity(n, n);
        CMatrix b = inverse(r(lambda), tol) + lambda * id;
        return (b - std::conj(lambda0) * id) * solve(b - lambda0 * id, pn, tol);
    });
}

namespace {

bool side_condition(const Subspace& m_target, const Subspace& m_other, const TolPolicy& tol) {
    // P_{target} applied to other covers target
    if (m_target.dim() == 0) return true;
    return numerical_rank(m_target.basis.adjoint() * m_other.basis, tol) == m_target.dim();
}

}  // namespace

GapCriteria gap_criteria(const IsometryOp& v, const CMatrix& c, cplx zeta, const TolPolicy& tol) {
    const long n = v.n;
    if (opnorm(c) > 1.0 + 1e-10) throw NotContraction("gap_criteria: parameter norm exceeds 1");
    PartialMap w = w_zeta(v, zeta, tol);
    Subspace ninf = orthogonal_complement(v.range_space(), tol);
    const double thr = tol.threshold(1.0, n);
    GapCriteria g;
    g.eigen = false;
    if (w.src.dim() > 0) {
        CMatrix k = ninf.basis.adjoint() * (c - w.ambient()) * w.src.basis;
        Eigen::JacobiSVD<CMatrix> svd(k);
        for (long i = 0; i < svd.singularValues().size(); ++i) g.singular_values.push_back(svd.singularValues()(i));
        g.eigen = g.singular_values.back() <= thr;
    }
    Subspace mz = defect_subspaces(v, Point(zeta), tol).m_space;
    g.side_condition = side_condition(v.range_space(), mz, tol);
    g.range = !g.eigen && g.side_condition;

    double direct = sigma_min(v.ambient() + c - (1.0 / zeta) * CMatrix::Identity(n, n));
    if ((direct <= thr) != g.eigen)
        throw InternalDisagreement("gap_criteria: kernel test disagrees with the direct eigenvalue test");
    return g;
}

namespace {

// evaluates one grid point; the closure returns (continued, unitarity defect, margin)
struct PointEval {
    bool continued;
    double defect;
    double margin;
    double regular = std::numeric_limits<double>::infinity();
    double objective() const { return std::min(margin, regular); }
};

template <class F>
void refine_minima(const std::vector<GapPoint>& grid, double lo, double hi, F eval, std::vector<GapPoint>& out) {
    const std::size_t g = grid.size();
    for (std::size_t i = 0; i < g; ++i) {
        if (!grid[i].continued) continue;
        auto obj = [](const GapPoint& p) { return std::min(p.margin, p.regular_bound); };
        double m = obj(grid[i]);
        bool left_ok = i == 0 || !grid[i - 1].continued || obj(grid[i - 1]) >= m;
        bool right_ok = i + 1 == g || !grid[i + 1].continued || obj(grid[i + 1]) >= m;
        if (!(left_ok && right_ok) || !std::isfinite(m)) continue;
        double a = i == 0 ? lo : grid[i - 1].location;
        double b = i + 1 == g ? hi : grid[i + 1].location;
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        PointEval f1 = eval(x1), f2 = eval(x2);
        for (int it = 0; it < 80 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
            if (f1.objective() < f2.objective()) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - gr * (b - a);
                f1 = eval(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + gr * (b - a);
                f2 = eval(x2);
            }
        }
        bool first = f1.objective() < f2.objective();
        double xb = first ? x1 : x2;
        PointEval fb = first ? f1 : f2;
        out.push_back({xb, fb.continued, fb.defect, fb.margin, fb.regular});
    }
}

bool verdict_of(const GapReport& r) {
    auto ok = [](const GapPoint& p) { return p.continued && p.unitarity_defect < 1e-8 && p.margin > 1e-8; };
    for (const auto& p : r.grid)
        if (!ok(p)) return false;
    for (const auto& p : r.refined)
        if (!ok(p)) return false;
    return true;
}

PointEval eval_param(const std::function<CMatrix()>& value, const Subspace& src, const Subspace& dst,
                     const CMatrix& w_amb) {
    CMatrix c;
    try {
        c = value();
    } catch (const OpextError&) {
        return {false, std::numeric_limits<double>::infinity(), 0.0};
    }
    if (src.dim() == 0) return {true, 0.0, std::numeric_limits<double>::infinity()};
    CMatrix k = dst.basis.adjoint() * c * src.basis;
    double leak = (c - dst.basis * k * src.basis.adjoint()).norm();
    double defect = (k.adjoint() * k - CMatrix::Identity(k.cols(), k.cols())).norm() + leak;
    double margin = sigma_min(dst.basis.adjoint() * (c - w_amb) * src.basis);
    return {true, defect, margin};
}

}  // namespace

GapReport gap_report(const IsometryOp& v, const ContractionParam& param, const ArcSpec& region, int grid_size,
                     const std::optional<SpectralAtoms>& oracle, const TolPolicy& tol) {
    if (region.kind != SpectralAtoms::Kind::circle) throw std::invalid_argument("gap_report: need an arc");
    if (grid_size < 2) throw std::invalid_argument("gap_report: grid too small");
    Subspace n0 = orthogonal_complement(v.dom, tol);
    Subspace ninf = orthogonal_complement(v.range_space(), tol);

    auto eval = [&](double theta) {
        cplx zeta = std::polar(1.0, -theta);
        RegularType rt = is_regular_type(v, 1.0 / zeta, tol);
        if (!rt.regular) return PointEval{false, std::numeric_limits<double>::infinity(), 0.0, 0.0};
        PartialMap w;
        try {
            w = w_zeta(v, zeta, tol);
        } catch (const NotRegularType&) {
            // the two regular-type tests sit on different scales near the spectrum
            return PointEval{false, std::numeric_limits<double>::infinity(), 0.0, 0.0};
        }
        PointEval pe = eval_param([&] { return param(zeta); }, n0, ninf, w.ambient());
        pe.regular = rt.lower_bound;
        return pe;
    };

    GapReport rep;
    for (int k = 0; k < grid_size; ++k) {
        double theta = region.lo + (region.hi - region.lo) * k / grid_size;
        cplx zeta = std::polar(1.0, -theta);
        RegularType rt = is_regular_type(v, 1.0 / zeta, tol);
        if (!rt.regular) throw NotRegularType("gap_report: grid point is not of regular type", 1.0 / zeta);
        Subspace mz = defect_subspaces(v, Point(zeta), tol).m_space;
        if (!side_condition(v.range_space(), mz, tol))
            throw PreconditionViolated("gap_report: P_{M_inf} M_zeta = M_inf fails at angle " + std::to_string(theta));
        PointEval pe = eval(theta);
        rep.grid.push_back({theta, pe.continued, pe.defect, pe.margin, rt.lower_bound});
    }
    refine_minima(rep.grid, region.lo, region.hi, eval, rep.refined);
    for (const auto& p : rep.refined)
        if (p.regular_bound == 0.0)
            throw NotRegularType("gap_report: the region contains a point that is not of regular type",
                                 std::polar(1.0, p.location));
    rep.analytic = verdict_of(rep);

    std::optional<SpectralAtoms> atoms = oracle;
    if (!atoms && param.is_constant()) {
        // no oracle for a non-unitary constant
        CMatrix u = v.ambient() + param(0.0);
        if ((u.adjoint() * u - CMatrix::Identity(v.n, v.n)).norm() < 1e-9)
            atoms = spectral_measure(u, NormalKind::unitary, tol);
    }
    if (atoms) {
        rep.oracle_available = true;
        rep.oracle_atoms = atoms_in_region(*atoms, region);
        rep.agrees = rep.analytic == rep.oracle_atoms.empty();
    }
    return rep;
}

GapReport gap_report(const LinOp& a, const ContractionParam& param, cplx z, const ArcSpec& region, int grid_size,
                     const std::optional<SpectralAtoms>& oracle, const TolPolicy& tol) {
    if (region.kind != SpectralAtoms::Kind::line) throw std::invalid_argument("gap_report: need an interval");
    if (grid_size < 2) throw std::invalid_argument("gap_report: grid too small");
    Subspace nz = defect_subspaces(a, z, tol).n_space;
    Subspace nzb = defect_subspaces(a, std::conj(z), tol).n_space;
    Subspace mzb = defect_subspaces(a, std::conj(z), tol).m_space;

    auto eval = [&](double lambda) {
        RegularType rt = is_regular_type(a, lambda, tol);
        if (!rt.regular) return PointEval{false, std::numeric_limits<double>::infinity(), 0.0, 0.0};
        PartialMap w;
        try {
            w = calW_lambda(a, z, lambda, tol);
        } catch (const NotRegularType&) {
            // the two regular-type tests sit on different scales near the spectrum
            return PointEval{false, std::numeric_limits<double>::infinity(), 0.0, 0.0};
        }
        PointEval pe = eval_param([&] { return param(lambda); }, nz, nzb, w.ambient());
        pe.regular = rt.lower_bound;
        return pe;
    };

    GapReport rep;
    for (int k = 0; k < grid_size; ++k) {
        double lambda = region.lo + (region.hi - region.lo) * k / grid_size;
        RegularType rt = is_regular_type(a, lambda, tol);
        if (!rt.regular) throw NotRegularType("gap_report: grid point is not of regular type", lambda);
        Subspace ml = defect_subspaces(a, lambda, tol).m_space;
        if (!side_condition(mzb, ml, tol))
            throw PreconditionViolated("gap_report: P_{M_conj z} M_lambda = M_conj z fails at " +
                                       std::to_string(lambda));
        PointEval pe = eval(lambda);
        rep.grid.push_back({lambda, pe.continued, pe.defect, pe.margin, rt.lower_bound});
    }
    refine_minima(rep.grid, region.lo, region.hi, eval, rep.refined);
    for (const auto& p : rep.refined)
        if (p.regular_bound == 0.0)
            throw NotRegularType("gap_report: the region contains a point that is not of regular type", p.location);
    rep.analytic = verdict_of(rep);

    std::optional<SpectralAtoms> atoms = oracle;
    if (!atoms && param.is_constant()) {
        CMatrix k = param(z);
        NeumannResult b = neumann_extension(a, z, PartialMap::from_ambient(nz, k), tol);
        if (b.selfadjoint) atoms = spectral_measure(b.op.ambient(), NormalKind::hermitian, tol);
    }
    if (atoms) {
        rep.oracle_available = true;
        rep.oracle_atoms = atoms_in_region(*atoms, region);
        rep.agrees = rep.analytic == rep.oracle_atoms.empty();
    }
    return rep;
}

Decomposition decomposition_check(const IsometryOp& v, cplx zeta, const TolPolicy& tol) {
    const long n = v.n;
    RegularType rt = is_regular_type(v, 1.0 / zeta, tol);
    if (!rt.regular) throw NotRegularType("decomposition_check: 1/zeta is not a point of regular type", 1.0 / zeta);
    Subspace nz = defect_subspaces(v, Point(zeta), tol).n_space;
    CMatrix dn(n, v.d() + nz.dim()), rn(n, v.d() + nz.dim());
    dn << v.dom.basis, nz.basis;
    rn << v.ran, nz.basis;
    bool sizes = v.d() + nz.dim() == n;
    return {sizes && numerical_rank(dn, tol) == n, sizes && numerical_rank(rn, tol) == n};
}

std::optional<EigenStructure> eigen_vector_structure(const IsometryOp& v, const CMatrix& c, cplx zeta,
                                                     const TolPolicy& tol) {
    const long n = v.n;
    const cplx inv = 1.0 / zeta;
    CMatrix ns = null_space(v.ambient() + c - inv * CMatrix::Identity(n, n), tol);
    if (ns.cols() == 0) return std::nullopt;
    CVector f = ns.col(0);
    DefectPair dz = defect_subspaces(v, Point(zeta), tol);
    CMatrix pm0 = projector(v.dom);
    CMatrix pminf = v.ran * v.ran.adjoint();
    CMatrix id = CMatrix::Identity(n, n);
    EigenStructure es;
    es.f = f;
    es.n_zeta_residual = (projector(dz.m_space) * f).norm();
    es.c_residual = (c * (id - pm0) * f - inv * (id - pminf) * f).norm();
    es.v_residual = (v.ambient() * pm0 * f - inv * pminf * f).norm();
    if (es.n_zeta_residual > 1e-8 || es.c_residual > 1e-8 || es.v_residual > 1e-8)
        throw InternalDisagreement("eigen_vector_structure: eigenvector identities fail");
    return es;
}

}  // namespace opext
