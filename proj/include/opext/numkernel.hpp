#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace opext {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline const cplx kI{0.0, 1.0};

// errors

struct OpextError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Singular : OpextError {
    double sigma_min;
    Singular(const std::string& what, double s) : OpextError(what), sigma_min(s) {}
};
struct KindMismatch : OpextError { using OpextError::OpextError; };
struct NotContraction : OpextError { using OpextError::OpextError; };
struct NotAdmissible : OpextError {
    std::string which;  // "phi", "t22" or "" for a plain operator test
    NotAdmissible(const std::string& what, std::string w = "") : OpextError(what), which(std::move(w)) {}
};
struct T22NotAdmissible : NotAdmissible {
    explicit T22NotAdmissible(const std::string& what) : NotAdmissible(what, "t22") {}
};
struct FixedPointObstruction : OpextError { using OpextError::OpextError; };
struct InternalDisagreement : OpextError { using OpextError::OpextError; };
struct NotRegularType : OpextError {
    cplx point;
    NotRegularType(const std::string& what, cplx p) : OpextError(what), point(p) {}
};
struct PreconditionViolated : OpextError { using OpextError::OpextError; };
struct PointExcluded : OpextError { using OpextError::OpextError; };
struct ParseError : OpextError { using OpextError::OpextError; };
struct IoError : OpextError { using OpextError::OpextError; };

struct TolPolicy {
    double abs_floor = 1e-10;
    // 0 selects 16 * n * machine epsilon for an n-column problem
    double rank_rel = 0.0;

    double threshold(double sigma_max, long n) const;
};

struct Subspace {
    long ambient = 0;
    CMatrix basis;  // ambient x k, orthonormal columns

    Subspace() = default;
    Subspace(long n, CMatrix b) : ambient(n), basis(std::move(b)) {}
    static Subspace zero(long n) { return Subspace(n, CMatrix(n, 0)); }
    static Subspace whole(long n) { return Subspace(n, CMatrix::Identity(n, n)); }
    long dim() const { return basis.cols(); }
};

Subspace orthonormalize(const CMatrix& m, const TolPolicy& tol = {});
Subspace orthogonal_complement(const Subspace& s, const TolPolicy& tol = {});
CMatrix projector(const Subspace& s);
Subspace intersect(const Subspace& a, const Subspace& b, const TolPolicy& tol = {});
Subspace span_sum(const Subspace& a, const Subspace& b, const TolPolicy& tol = {});
// orthonormal basis of {x : m x = 0}
CMatrix null_space(const CMatrix& m, const TolPolicy& tol = {});
long numerical_rank(const CMatrix& m, const TolPolicy& tol = {});
bool same_subspace(const Subspace& a, const Subspace& b, double eps);

enum class NormalKind { unitary, hermitian };

struct EigenPart {
    cplx value;
    CMatrix proj;
};

// eigenvalues closer than this are merged into one projection
inline constexpr double kClusterGap = 1e-8;

std::vector<EigenPart> eig_normal(const CMatrix& m, NormalKind kind, const TolPolicy& tol = {});

CMatrix solve(const CMatrix& m, const CMatrix& b, const TolPolicy& tol = {});
CMatrix inverse(const CMatrix& m, const TolPolicy& tol = {});

double opnorm(const CMatrix& m);
double sigma_min(const CMatrix& m);
// nearest isometry in the polar sense; square input
CMatrix polar_unitary(const CMatrix& m);
// rotate the phase of each column so that its largest entry is real positive
void canonical_phases(CMatrix& m);

double angle_of(cplx u);  // in [0, 2pi)

// random helpers, all driven by an explicit engine
using Rng = std::mt19937_64;
CMatrix random_gaussian(long rows, long cols, Rng& rng);
CMatrix random_unitary(long n, Rng& rng);
CMatrix random_isometry(long n, long k, Rng& rng);  // n x k orthonormal columns
CMatrix random_hermitian(long n, Rng& rng, double scale = 1.0);
double random_uniform(Rng& rng, double lo, double hi);

}  // namespace opext
