#pragma once

#include "opext/extensions.hpp"

#include <functional>
#include <memory>
#include <string>
#include <variant>

namespace opext {

// Values are ambient n x n matrices: zero off src, values inside dst.
struct ContractionParam {
    struct Constant {
        CMatrix k;
    };
    struct Affine {
        CMatrix k0, k1;  // k0 + zeta k1
    };
    struct Callback {
        std::function<CMatrix(cplx)> eval;
    };

    Subspace src;
    Subspace dst;
    std::variant<Constant, Affine, Callback> form;
    double certified_bound = 1.0;

    CMatrix operator()(cplx p) const;
    bool is_constant() const { return std::holds_alternative<Constant>(form); }
    bool is_callback() const { return std::holds_alternative<Callback>(form); }

    static ContractionParam constant(const Subspace& src, const Subspace& dst, const CMatrix& k);
    // certified on the closed unit disk: ||k0|| + ||k1|| <= 1
    static ContractionParam affine(const Subspace& src, const Subspace& dst, const CMatrix& k0, const CMatrix& k1);
    static ContractionParam callback(const Subspace& src, const Subspace& dst, std::function<CMatrix(cplx)> f);
};

enum class ResolventSide { isometric, symmetric };

struct ResolventModel {
    long n = 0;
    ResolventSide side = ResolventSide::isometric;
    std::string provenance;  // chumakin, inin, shtraus, dilation, or a free tag
    std::function<CMatrix(cplx)> eval;

    CMatrix operator()(cplx p) const { return eval(p); }
};

CMatrix chumakin_resolvent(const IsometryOp& v, const ContractionParam& f, cplx zeta, const TolPolicy& tol = {});
CMatrix inin_resolvent(const IsometryOp& v, const ContractionParam& c, cplx z0, cplx zeta,
                       const TolPolicy& tol = {});
CMatrix dilation_resolvent(const ExitSpaceModel& model, cplx point, const TolPolicy& tol = {});
CMatrix shtraus_resolvent(const LinOp& a, const ContractionParam& f, cplx lambda0, cplx lambda,
                          const TolPolicy& tol = {});

ResolventModel chumakin_model(const IsometryOp& v, const ContractionParam& f, const TolPolicy& tol = {});
ResolventModel inin_model(const IsometryOp& v, const ContractionParam& c, cplx z0, const TolPolicy& tol = {});
ResolventModel dilation_model(const ExitSpaceModel& model, const TolPolicy& tol = {});
ResolventModel shtraus_model(const LinOp& a, const ContractionParam& f, cplx lambda0, const TolPolicy& tol = {});

// (1/zeta)(E - R^{-1}) restricted to N_0 -> N_inf; zeta = 0 by a circle mean
CMatrix recover_parameter(const ResolventModel& r, const IsometryOp& v, cplx zeta, const TolPolicy& tol = {});
ContractionParam recovered_parameter(const ResolventModel& r, const IsometryOp& v, const TolPolicy& tol = {});
// the Inin parameter C(zeta; z0) of a generalized resolvent
CMatrix recover_inin_parameter(const ResolventModel& r, const IsometryOp& v, cplx z0, cplx zeta,
                               const TolPolicy& tol = {});

struct AxiomResult {
    std::string name;
    bool pass;
    double residual;
};

struct AxiomReport {
    std::vector<AxiomResult> axioms;  // five entries in fixed order
    bool all_pass() const;
};

AxiomReport verify_resolvent_axioms(const ResolventModel& r, const IsometryOp& v, const std::vector<cplx>& samples,
                                    double tol = 1e-9);
// Cauchy mean-value residual of f at p over 16 circle points
double mean_value_residual(const std::function<CMatrix(cplx)>& f, cplx p, double radius);

enum class TransferDirection { sym_to_iso, iso_to_sym };

CMatrix cayley_transfer(const ResolventModel& r_in, cplx z, TransferDirection dir, cplx point);
ResolventModel cayley_transfer_model(const ResolventModel& r_in, cplx z, TransferDirection dir);

CMatrix b_lambda(const ResolventModel& r, cplx lambda, const TolPolicy& tol = {});
// frak F(lambda) in ambient form on N_{lambda0}(A)
CMatrix frak_F(const ResolventModel& r, const LinOp& a, cplx lambda0, cplx lambda, const TolPolicy& tol = {});
ContractionParam frak_F_param(const ResolventModel& r, const LinOp& a, cplx lambda0, const TolPolicy& tol = {});

// Extension acting as lambda on N_{conj lambda}: the Neumann extension with zero parameter
CMatrix zero_parameter_extension(const LinOp& a, cplx lambda, const TolPolicy& tol = {});
// C(lambda): N_{conj lambda0} -> N_{lambda0}, ambient form
CMatrix characteristic_function(const LinOp& a, cplx lambda0, cplx lambda, const TolPolicy& tol = {});
CMatrix frak_F_via_char(const BlockParam& t, const LinOp& a_e, cplx lambda0, cplx lambda,
                        const TolPolicy& tol = {});

struct RaySpec {
    cplx lambda0;
    double angle;  // argument of the ray direction
    std::vector<double> magnitudes;
    double epsilon = 0.1;

    cplx at(std::size_t k) const { return std::polar(magnitudes[k], angle); }
    void validate() const;
    static RaySpec powers_of_ten(cplx lambda0, int k_from, int k_to, double epsilon = 0.1);
};

struct PhiInfinityReport {
    PartialMap direct;
    std::vector<double> magnitudes;
    std::vector<std::vector<double>> errors;      // [basis vector of D(Phi_inf)][ray point]
    std::vector<std::vector<double>> membership;  // [basis vector of N_{lambda0}][ray point]
};

PhiInfinityReport phi_infinity(const LinOp& a, const ExitSpaceModel& model, cplx lambda0, const RaySpec& ray,
                               const TolPolicy& tol = {});
// membership quantity |lambda| (||psi|| - ||F(lambda) psi||) for a parameter family
std::vector<std::vector<double>> norm_defect_profile(const std::function<CMatrix(cplx)>& family,
                                                     const Subspace& basis, const RaySpec& ray);

struct ClassCheck {
    bool admissible;
    bool approximate;
};

ClassCheck admissible_class_check(const ContractionParam& f, const LinOp& a, cplx lambda0, const RaySpec& ray,
                                  const TolPolicy& tol = {});

}  // namespace opext
