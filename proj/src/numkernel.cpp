#include "opext/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace opext {

double TolPolicy::threshold(double sigma_max, long n) const {
    double rel = rank_rel > 0.0 ? rank_rel
                                : 16.0 * static_cast<double>(std::max<long>(n, 1)) *
                                      std::numeric_limits<double>::epsilon();
    return std::max(abs_floor, rel * sigma_max);
}

void canonical_phases(CMatrix& m) {
    for (long j = 0; j < m.cols(); ++j) {
        long best = 0;
        double bmag = -1.0;
        for (long i = 0; i < m.rows(); ++i) {
            // ties resolved toward the first index, with a small slack so that
            // roundoff does not flip the choice
            double a = std::abs(m(i, j));
            if (a > bmag + 1e-12) {
                bmag = a;
                best = i;
            }
        }
        if (bmag > 0.0) {
            cplx ph = m(best, j) / bmag;
            m.col(j) *= std::conj(ph);
        }
    }
}

Subspace orthonormalize(const CMatrix& m, const TolPolicy& tol) {
    const long n = m.rows();
    if (m.cols() == 0 || n == 0) return Subspace::zero(n);
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    double thr = tol.threshold(s(0), std::max(m.rows(), m.cols()));
    long r = 0;
    while (r < s.size() && s(r) > thr) ++r;
    if (r == n) return Subspace::whole(n);
    CMatrix b = svd.matrixU().leftCols(r);
    canonical_phases(b);
    return Subspace(n, b);
}

Subspace orthogonal_complement(const Subspace& s, const TolPolicy& tol) {
    const long n = s.ambient;
    if (s.dim() == 0) return Subspace::whole(n);
    if (s.dim() >= n) return Subspace::zero(n);
    CMatrix p = CMatrix::Identity(n, n) - projector(s);
    Eigen::JacobiSVD<CMatrix> svd(p, Eigen::ComputeFullU);
    (void)tol;
    CMatrix b = svd.matrixU().leftCols(n - s.dim());
    canonical_phases(b);
    return Subspace(n, b);
}

CMatrix projector(const Subspace& s) {
    if (s.dim() == 0) return CMatrix::Zero(s.ambient, s.ambient);
    return s.basis * s.basis.adjoint();
}

CMatrix null_space(const CMatrix& m, const TolPolicy& tol) {
    const long c = m.cols();
    if (c == 0) return CMatrix(0, 0);
    if (m.rows() == 0) return CMatrix::Identity(c, c);
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    double thr = tol.threshold(s(0), std::max(m.rows(), c));
    long r = 0;
    while (r < s.size() && s(r) > thr) ++r;
    CMatrix v = svd.matrixV().rightCols(c - r);
    canonical_phases(v);
    return v;
}

long numerical_rank(const CMatrix& m, const TolPolicy& tol) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<CMatrix> svd(m);
    const auto& s = svd.singularValues();
    double thr = tol.threshold(s(0), std::max(m.rows(), m.cols()));
    long r = 0;
    while (r < s.size() && s(r) > thr) ++r;
    return r;
}

Subspace intersect(const Subspace& a, const Subspace& b, const TolPolicy& tol) {
    const long n = a.ambient;
    if (a.dim() == 0 || b.dim() == 0) return Subspace::zero(n);
    CMatrix m = a.basis - b.basis * (b.basis.adjoint() * a.basis);
    // absolute test: a column of a.basis has unit norm, so sin of the angle is compared
    // against the floor directly rather than against the largest singular value
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    double thr = tol.threshold(1.0, n);
    long r = 0;
    while (r < s.size() && s(r) > thr) ++r;
    CMatrix c = svd.matrixV().rightCols(a.dim() - r);
    if (c.cols() == 0) return Subspace::zero(n);
    return orthonormalize(a.basis * c, tol);
}

Subspace span_sum(const Subspace& a, const Subspace& b, const TolPolicy& tol) {
    CMatrix m(a.ambient, a.dim() + b.dim());
    m << a.basis, b.basis;
    return orthonormalize(m, tol);
}

bool same_subspace(const Subspace& a, const Subspace& b, double eps) {
    if (a.dim() != b.dim()) return false;
    return (projector(a) - projector(b)).norm() <= eps;
}

double angle_of(cplx u) {
    double t = std::arg(u);
    if (t < 0) t += 2 * kPi;
    if (t >= 2 * kPi) t -= 2 * kPi;
    return t;
}

namespace {

struct Raw {
    cplx value;
    double key;
    CVector vec;
};

std::vector<EigenPart> cluster(std::vector<Raw> raw, NormalKind kind, long n) {
    std::sort(raw.begin(), raw.end(), [](const Raw& x, const Raw& y) { return x.key < y.key; });
    std::vector<std::vector<long>> groups;
    for (long i = 0; i < static_cast<long>(raw.size()); ++i) {
        if (!groups.empty() && raw[i].key - raw[groups.back().back()].key < kClusterGap)
            groups.back().push_back(i);
        else
            groups.push_back({i});
    }
    if (kind == NormalKind::unitary && groups.size() > 1) {
        double wrap = raw[groups.front().front()].key + 2 * kPi - raw[groups.back().back()].key;
        if (wrap < kClusterGap) {
            for (long i : groups.back()) groups.front().push_back(i);
            groups.pop_back();
        }
    }
    std::vector<EigenPart> out;
    for (auto& g : groups) {
        CMatrix vecs(n, static_cast<long>(g.size()));
        cplx mean = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            vecs.col(static_cast<long>(k)) = raw[g[k]].vec;
            mean += raw[g[k]].value;
        }
        mean /= static_cast<double>(g.size());
        if (kind == NormalKind::unitary)
            mean /= std::abs(mean);
        else
            mean = cplx(mean.real(), 0.0);
        out.push_back({mean, vecs * vecs.adjoint()});
    }
    if (kind == NormalKind::unitary)
        std::sort(out.begin(), out.end(),
                  [](const EigenPart& x, const EigenPart& y) { return angle_of(x.value) < angle_of(y.value); });
    return out;
}

}  // namespace

std::vector<EigenPart> eig_normal(const CMatrix& m, NormalKind kind, const TolPolicy& tol) {
    if (m.rows() != m.cols()) throw KindMismatch("eig_normal: matrix is not square");
    const long n = m.rows();
    if (n == 0) return {};
    double scale = std::max(1.0, opnorm(m));
    double kind_tol = std::max(1e-9, 100.0 * tol.abs_floor) * scale;
    std::vector<Raw> raw;
    if (kind == NormalKind::hermitian) {
        if ((m - m.adjoint()).norm() > kind_tol) throw KindMismatch("eig_normal: matrix is not Hermitian");
        CMatrix h = 0.5 * (m + m.adjoint());
        Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
        for (long i = 0; i < n; ++i)
            raw.push_back({cplx(es.eigenvalues()(i), 0.0), es.eigenvalues()(i), es.eigenvectors().col(i)});
    } else {
        if ((m.adjoint() * m - CMatrix::Identity(n, n)).norm() > kind_tol)
            throw KindMismatch("eig_normal: matrix is not unitary");
        Eigen::ComplexSchur<CMatrix> cs(m);
        const CMatrix& t = cs.matrixT();
        for (long i = 0; i < n; ++i) {
            cplx v = t(i, i) / std::abs(t(i, i));
            raw.push_back({v, angle_of(v), cs.matrixU().col(i)});
        }
    }
    return cluster(std::move(raw), kind, n);
}

double opnorm(const CMatrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues()(0);
}

double sigma_min(const CMatrix& m) {
    if (m.size() == 0) return std::numeric_limits<double>::infinity();
    Eigen::JacobiSVD<CMatrix> svd(m);
    const auto& s = svd.singularValues();
    if (m.rows() < m.cols()) return 0.0;
    return s(s.size() - 1);
}

CMatrix solve(const CMatrix& m, const CMatrix& b, const TolPolicy& tol) {
    if (m.rows() != m.cols()) throw std::invalid_argument("solve: matrix is not square");
    if (m.rows() == 0) return CMatrix(0, b.cols());
    Eigen::JacobiSVD<CMatrix> svd(m);
    const auto& s = svd.singularValues();
    double smin = s(s.size() - 1);
    if (smin <= tol.threshold(s(0), m.rows()))
        throw Singular("solve: matrix is numerically singular", smin);
    return m.partialPivLu().solve(b);
}

CMatrix inverse(const CMatrix& m, const TolPolicy& tol) {
    return solve(m, CMatrix::Identity(m.rows(), m.rows()), tol);
}

CMatrix polar_unitary(const CMatrix& m) {
    if (m.size() == 0) return m;
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

CMatrix random_gaussian(long rows, long cols, Rng& rng) {
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
    CMatrix m(rows, cols);
    for (long j = 0; j < cols; ++j)
        for (long i = 0; i < rows; ++i) {
            double re = nd(rng);
            double im = nd(rng);
            m(i, j) = cplx(re, im);
        }
    return m;
}

CMatrix random_unitary(long n, Rng& rng) {
    if (n == 0) return CMatrix(0, 0);
    CMatrix g = random_gaussian(n, n, rng);
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
    CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (long i = 0; i < n; ++i) {
        cplx d = r(i, i);
        if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
    }
    return q;
}

CMatrix random_isometry(long n, long k, Rng& rng) {
    return random_unitary(n, rng).leftCols(k);
}

CMatrix random_hermitian(long n, Rng& rng, double scale) {
    CMatrix g = random_gaussian(n, n, rng);
    return 0.5 * scale * (g + g.adjoint());
}

double random_uniform(Rng& rng, double lo, double hi) {
    std::uniform_real_distribution<double> ud(lo, hi);
    return ud(rng);
}

}  // namespace opext
