#pragma once

#include "opext/operators.hpp"

#include <cstdint>
#include <optional>

namespace opext {

// X_z: P_{N_z} h |-> P_{N_conj z} h for h orthogonal to D(A)
PartialMap forbidden_operator(const LinOp& a, cplx z, const TolPolicy& tol = {});

struct AdmissibilityDetail {
    bool admissible;
    double kernel_sigma;  // smallest singular value of (T - X_z) on D(T) and D(X_z) jointly
    double fixed_sigma;   // smallest singular value of (U_z + T - E) on its domain
};

AdmissibilityDetail admissibility_detail(const LinOp& a, cplx z, const PartialMap& t, const TolPolicy& tol = {});
bool is_admissible(const LinOp& a, cplx z, const PartialMap& t, const TolPolicy& tol = {});

struct NeumannResult {
    LinOp op;
    SignClass signs;
    bool closed = true;
    bool maximal = false;
    bool selfadjoint = false;
};

NeumannResult neumann_extension(const LinOp& a, cplx z, const PartialMap& t, const TolPolicy& tol = {});

// The parameter of an extension B of A at z: the Cayley map of B restricted to N_z(A).
PartialMap neumann_parameter(const LinOp& b, const LinOp& a, cplx z, const TolPolicy& tol = {});

PartialMap build_admissible_isometry(const LinOp& a, cplx z, const Subspace& n_src, const Subspace& n_dst,
                                     std::uint64_t seed, const TolPolicy& tol = {});

// Ambient blocks of a map on H + H_e, H = C^n first.
struct BlockParam {
    CMatrix t11, t12, t21, t22;

    CMatrix assembled() const;
    long n() const { return t11.rows(); }
    long m() const { return t22.rows(); }
    static BlockParam split(const CMatrix& t, long n);
};

struct ExitSpaceModel {
    enum class Kind { unitary, hermitian };
    Kind kind = Kind::hermitian;
    long n = 0;
    long m = 0;
    LinOp big_op;  // on C^{n+m}
    std::optional<LinOp> inner_sym;
    std::optional<LinOp> exit_sym;
    std::optional<IsometryOp> inner_iso;
    std::optional<cplx> z;
    std::optional<PartialMap> t;

    // requires an everywhere defined big operator
    CMatrix big() const;
};

// A placed in the first n coordinates, B in the last m
LinOp direct_sum_ops(const LinOp& a, const LinOp& b);
IsometryOp direct_sum_ops(const IsometryOp& a, const IsometryOp& b);

// self-adjoint extension of A + o_{H_e}; T must be unitary from N_z onto N_conj z
ExitSpaceModel exit_space_extension(const LinOp& a, long m, cplx z, const BlockParam& t, const TolPolicy& tol = {});
// general A_e; T need not be defined on the whole defect space
ExitSpaceModel exit_space_extension(const LinOp& a, const LinOp& a_e, cplx z, const PartialMap& t,
                                    const TolPolicy& tol = {});
// unitary U = V + o_{H_e} extended by T, T unitary from N_0(V)+H_e onto N_inf(V)+H_e
ExitSpaceModel unitary_model(const IsometryOp& v, long m, const CMatrix& t, const TolPolicy& tol = {});

// T11 + T12 (E - T22)^{-1} T21, for A_e = o
PartialMap phi_operator(const LinOp& a, long m, cplx z, const BlockParam& t, const TolPolicy& tol = {});
// Phi from the set of h with P_{H_e}(U + T)h = P_{H_e}h; works for partial T and any A_e
PartialMap phi_via_theta(const ExitSpaceModel& model, const TolPolicy& tol = {});

LinOp compressed_extension(const ExitSpaceModel& model, const TolPolicy& tol = {});

// distance between two operators with explicit domains; infinity if domains differ in dimension
double operator_distance(const LinOp& a, const LinOp& b);
double map_distance(const PartialMap& a, const PartialMap& b);

}  // namespace opext
