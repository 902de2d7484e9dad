#pragma once

#include "opext/resolvents.hpp"

#include <optional>
#include <string>
#include <vector>

namespace opext {

struct SpectralAtoms {
    enum class Kind { circle, line };
    struct Atom {
        double location;  // angle in [0, 2pi) or real point
        CMatrix weight;
    };
    Kind kind = Kind::circle;
    std::vector<Atom> atoms;
};

// open arc (theta1, theta2) of the circle or open interval (a, b)
struct ArcSpec {
    SpectralAtoms::Kind kind = SpectralAtoms::Kind::circle;
    double lo = 0.0;
    double hi = 0.0;

    // half-open membership [lo, hi)
    bool contains(double location) const;
    static ArcSpec arc(double t1, double t2);
    static ArcSpec interval(double a, double b);
};

SpectralAtoms spectral_measure(const ExitSpaceModel& model, const TolPolicy& tol = {});
// atoms of an everywhere defined unitary or Hermitian matrix acting in H itself
SpectralAtoms spectral_measure(const CMatrix& op, NormalKind kind, const TolPolicy& tol = {});
std::vector<double> atoms_in_region(const SpectralAtoms& atoms, const ArcSpec& region);

double verify_integral_representation(const SpectralAtoms& atoms, const ResolventModel& r,
                                      const std::vector<cplx>& samples);

// W_zeta: N_0 -> N_inf
PartialMap w_zeta(const IsometryOp& v, cplx zeta, const TolPolicy& tol = {});
// calW_lambda = W_{(lambda - z)/(lambda - conj z)} of U_z(A): N_z -> N_conj z
PartialMap calW_lambda(const LinOp& a, cplx z, double lambda, const TolPolicy& tol = {});

// parameters read off a resolvent and continued to the boundary: the unit circle
// (isometric) or the real axis (symmetric, anchored at lambda0)
ContractionParam continued_parameter(const ResolventModel& r, const IsometryOp& v, const TolPolicy& tol = {});
ContractionParam continued_parameter(const ResolventModel& r, const LinOp& a, cplx lambda0, const TolPolicy& tol = {});

struct GapCriteria {
    bool eigen;
    bool range;
    std::vector<double> singular_values;  // of C - W_zeta
    bool side_condition;                  // P_{M_inf} M_zeta = M_inf
};

// c in ambient form N_0 -> N_inf
GapCriteria gap_criteria(const IsometryOp& v, const CMatrix& c, cplx zeta, const TolPolicy& tol = {});

struct GapPoint {
    double location;  // angle or real point
    bool continued;   // parameter value available
    double unitarity_defect;
    double margin;  // smallest singular value of (param - W)
    double regular_bound;
};

struct GapReport {
    std::vector<GapPoint> grid;
    std::vector<GapPoint> refined;  // local minima of the margin, polished
    bool analytic = false;
    std::vector<double> oracle_atoms;  // atoms inside the region, when an oracle is available
    bool oracle_available = false;
    bool agrees = true;
    std::string verdict() const { return analytic ? "analytic" : "not analytic"; }
};

// isometric form: param is C(zeta; 0), region is in the angle of the spectral measure
GapReport gap_report(const IsometryOp& v, const ContractionParam& param, const ArcSpec& region, int grid_size = 64,
                     const std::optional<SpectralAtoms>& oracle = std::nullopt, const TolPolicy& tol = {});
// symmetric form: param is the Shtraus parameter F(lambda) at z
GapReport gap_report(const LinOp& a, const ContractionParam& param, cplx z, const ArcSpec& region,
                     int grid_size = 64, const std::optional<SpectralAtoms>& oracle = std::nullopt,
                     const TolPolicy& tol = {});

struct Decomposition {
    bool dom_split;
    bool ran_split;
};

Decomposition decomposition_check(const IsometryOp& v, cplx zeta, const TolPolicy& tol = {});

struct EigenStructure {
    CVector f;
    double n_zeta_residual;
    double c_residual;  // C P_{N_0} f = zeta^{-1} P_{N_inf} f
    double v_residual;  // V P_{M_0} f = zeta^{-1} P_{M_inf} f
};

std::optional<EigenStructure> eigen_vector_structure(const IsometryOp& v, const CMatrix& c, cplx zeta,
                                                     const TolPolicy& tol = {});

}  // namespace opext
