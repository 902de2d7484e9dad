#include "opext/random.hpp"
#include "opext/spectral.hpp"

#include <gtest/gtest.h>

using namespace opext;

namespace {

CMatrix scalar(cplx x) { return CMatrix::Constant(1, 1, x); }

CMatrix swap2() {
    CMatrix t(2, 2);
    t << 0, 1, 1, 0;
    return t;
}

ExitSpaceModel i1() { return unitary_model(IsometryOp::zero(1), 1, swap2()); }

ExitSpaceModel i2() {
    CMatrix t(2, 2);
    t << 0, kI, kI, 0;
    return exit_space_extension(SymmetricOp::zero(1), 1, kI, BlockParam::split(t, 1));
}

Subspace e(long k) {
    CMatrix b = CMatrix::Zero(2, 1);
    b(k, 0) = 1.0;
    return Subspace(2, b);
}

IsometryOp i4() { return IsometryOp::make(e(0), e(0).basis); }

CMatrix c_of(cplx c) { return c * projector(e(1)); }

ContractionParam i4_param(cplx c) { return ContractionParam::constant(e(1), e(1), c_of(c)); }

SymmetricOp i3() { return SymmetricOp::make(e(0), e(0).basis); }

}  // namespace

TEST(SpectralMeasure, I1) {
    SpectralAtoms s = spectral_measure(i1());
    ASSERT_EQ(s.atoms.size(), 2u);
    EXPECT_EQ(s.kind, SpectralAtoms::Kind::circle);
    EXPECT_NEAR(s.atoms[0].location, 0.0, 1e-12);
    EXPECT_NEAR(s.atoms[1].location, kPi, 1e-12);
    for (const auto& a : s.atoms) EXPECT_LT(std::abs(a.weight(0, 0) - 0.5), 1e-12);
}

TEST(SpectralMeasure, I2) {
    SpectralAtoms s = spectral_measure(i2());
    ASSERT_EQ(s.atoms.size(), 2u);
    EXPECT_EQ(s.kind, SpectralAtoms::Kind::line);
    EXPECT_NEAR(s.atoms[0].location, -1.0, 1e-12);
    EXPECT_NEAR(s.atoms[1].location, 1.0, 1e-12);
    for (const auto& a : s.atoms) EXPECT_LT(std::abs(a.weight(0, 0) - 0.5), 1e-12);
}

TEST(SpectralMeasure, DiagonalUnitary) {
    CMatrix u = CMatrix::Zero(3, 3);
    u(0, 0) = 1.0;
    u(1, 1) = kI;
    u(2, 2) = -kI;
    SpectralAtoms s = spectral_measure(u, NormalKind::unitary);
    ASSERT_EQ(s.atoms.size(), 3u);
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_LT((s.atoms[k].weight * s.atoms[k].weight - s.atoms[k].weight).norm(), 1e-12);
        EXPECT_NEAR(s.atoms[k].weight.trace().real(), 1.0, 1e-12);
    }
}

TEST(SpectralMeasure, WeightsSumToIdentity) {
    Rng rng(1);
    for (int t = 0; t < 20; ++t) {
        long n = 1 + t % 6, d = t % n, m = t % 4;
        SpectralAtoms s = spectral_measure(random_unitary_model(random_isometry_op(n, d, rng), m, rng));
        CMatrix sum = CMatrix::Zero(n, n);
        double prev = -1.0;
        for (const auto& a : s.atoms) {
            sum += a.weight;
            EXPECT_GT(Eigen::SelfAdjointEigenSolver<CMatrix>(a.weight).eigenvalues().minCoeff(), -1e-10);
            EXPECT_GT(a.location, prev);
            prev = a.location;
        }
        EXPECT_LT((sum - CMatrix::Identity(n, n)).norm(), 1e-9);
    }
}

TEST(Integral, ExactFixtures) {
    std::vector<cplx> zs = {0.3, cplx(0.1, 0.7), cplx(2.0, -1.0)};
    EXPECT_LT(verify_integral_representation(spectral_measure(i1()), dilation_model(i1()), zs), 1e-12);
    std::vector<cplx> ls = {cplx(0, 2), cplx(0.5, -0.5), cplx(-3, 1)};
    EXPECT_LT(verify_integral_representation(spectral_measure(i2()), dilation_model(i2()), ls), 1e-12);
}

TEST(Integral, Mismatch) {
    CMatrix u(2, 2);
    u << 0, kI, kI, 0;
    ExitSpaceModel other = unitary_model(IsometryOp::zero(1), 1, u);
    std::vector<cplx> zs = {0.5, cplx(0, 0.5)};
    EXPECT_GE(verify_integral_representation(spectral_measure(i1()), dilation_model(other), zs), 0.1);
}

TEST(WZeta, I4) {
    for (double th : {0.5, 2.0, 4.0}) {
        cplx z = std::polar(1.0, th);
        PartialMap w = w_zeta(i4(), z);
        EXPECT_LT((w.ambient() - c_of(1.0 / z)).norm(), 1e-12);
        EXPECT_TRUE(w.is_isometric(1e-10));
    }
    EXPECT_THROW(w_zeta(i4(), 1.0), NotRegularType);
}

TEST(WZeta, IsometricRandom) {
    Rng rng(2);
    for (int t = 0; t < 20; ++t) {
        IsometryOp v = random_isometry_op(5, 1 + t % 4, rng);
        PartialMap w = w_zeta(v, std::polar(1.0, random_uniform(rng, 0, 2 * kPi)));
        EXPECT_TRUE(w.is_isometric(1e-10));
    }
}

TEST(CalW, I3) {
    for (double l : {-2.0, 0.0, 0.5, 3.0}) {
        PartialMap w = calW_lambda(i3(), kI, l);
        EXPECT_LT((w.ambient() - c_of((l + kI) / (l - kI))).norm(), 1e-12) << l;
    }
    EXPECT_THROW(calW_lambda(i3(), kI, 1.0), NotRegularType);
}

TEST(GapCriteria, I4) {
    for (double th : {0.7, 2.0}) {
        cplx z = std::polar(1.0, th);
        for (cplx c : {1.0 / z, z, cplx(-1.0)}) {
            GapCriteria g = gap_criteria(i4(), c_of(c), z);
            EXPECT_EQ(g.eigen, std::abs(c - 1.0 / z) < 1e-12);
            EXPECT_TRUE(g.side_condition);
        }
    }
    EXPECT_THROW(gap_criteria(i4(), c_of(1.5), cplx(0, 1)), NotContraction);
}

TEST(GapCriteria, ExactlyW) {
    Rng rng(3);
    IsometryOp v = random_isometry_op(4, 2, rng);
    cplx z = std::polar(1.0, 1.3);
    EXPECT_TRUE(gap_criteria(v, w_zeta(v, z).ambient(), z).eigen);
}

TEST(GapReport, I4Arc) {
    ArcSpec arc = ArcSpec::arc(kPi / 4, 3 * kPi / 4);
    GapReport in = gap_report(i4(), i4_param(kI), arc, 64, spectral_measure(i4().ambient() + c_of(kI), NormalKind::unitary));
    EXPECT_FALSE(in.analytic);
    EXPECT_TRUE(in.agrees);
    ASSERT_EQ(in.oracle_atoms.size(), 1u);
    EXPECT_NEAR(in.oracle_atoms[0], kPi / 2, 1e-12);

    GapReport out = gap_report(i4(), i4_param(-1.0), arc);
    EXPECT_TRUE(out.analytic);
    EXPECT_TRUE(out.agrees);
    EXPECT_EQ(out.grid.size(), 64u);
}

TEST(GapReport, NonUnitaryParameter) {
    GapReport r = gap_report(i4(), i4_param(0.5), ArcSpec::arc(kPi / 4, 3 * kPi / 4));
    EXPECT_FALSE(r.analytic);
    EXPECT_FALSE(r.oracle_available);
    for (const auto& p : r.grid) EXPECT_GT(p.unitarity_defect, 0.1);
}

TEST(GapReport, I2Interval) {
    auto f = ContractionParam::constant(Subspace::whole(1), Subspace::whole(1), scalar(-1.0));
    GapReport r = gap_report(SymmetricOp::zero(1), f, kI, ArcSpec::interval(0.5, 2.0));
    EXPECT_TRUE(r.analytic);
    EXPECT_TRUE(r.agrees);
    GapReport s = gap_report(SymmetricOp::zero(1), f, kI, ArcSpec::interval(-0.5, 2.0));
    EXPECT_FALSE(s.analytic);
    EXPECT_TRUE(s.agrees);
}

TEST(GapReport, ContinuedDilationParameter) {
    ExitSpaceModel m = i1();
    ResolventModel r = dilation_model(m);
    ContractionParam p = continued_parameter(r, IsometryOp::zero(1));
    SpectralAtoms atoms = spectral_measure(m);
    EXPECT_TRUE(gap_report(IsometryOp::zero(1), p, ArcSpec::arc(0.5, 2.5), 32, atoms).analytic);
    GapReport across = gap_report(IsometryOp::zero(1), p, ArcSpec::arc(2.5, 4.0), 32, atoms);
    EXPECT_FALSE(across.analytic);
    EXPECT_TRUE(across.agrees);
}

TEST(ArcSpec, Membership) {
    ArcSpec a = ArcSpec::arc(1.0, 2.0);
    EXPECT_TRUE(a.contains(1.0));
    EXPECT_FALSE(a.contains(2.0));
    EXPECT_THROW(ArcSpec::arc(2.0, 1.0), std::invalid_argument);
    EXPECT_THROW(ArcSpec::arc(1.0, 7.0), std::invalid_argument);
}

TEST(Decomposition, Examples) {
    Decomposition d = decomposition_check(i4(), cplx(0, 1));
    EXPECT_TRUE(d.dom_split);
    EXPECT_TRUE(d.ran_split);
    EXPECT_THROW(decomposition_check(i4(), 1.0), NotRegularType);
    Rng rng(4);
    Decomposition u = decomposition_check(IsometryOp::unitary(random_unitary(3, rng)), std::polar(1.0, 0.123));
    EXPECT_TRUE(u.dom_split && u.ran_split);
}

TEST(EigenStructure, I4) {
    cplx z = std::polar(1.0, 2.2);
    auto s = eigen_vector_structure(i4(), c_of(1.0 / z), z);
    ASSERT_TRUE(s.has_value());
    EXPECT_NEAR(std::abs(s->f(1)), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(s->f(0)), 0.0, 1e-12);
    EXPECT_FALSE(eigen_vector_structure(i4(), c_of(-1.0), z).has_value());
}

TEST(EigenStructure, RandomLemmas) {
    Rng rng(5);
    for (int t = 0; t < 20; ++t) {
        IsometryOp v = random_isometry_op(5, 2, rng);
        cplx z = std::polar(1.0, random_uniform(rng, 0.1, 6.0));
        // C - W has a kernel: take C = W on one direction, a rotation elsewhere
        CMatrix w = w_zeta(v, z).ambient();
        Subspace n0 = defect_subspaces(v, Point(0.0)).n_space;
        CMatrix g = n0.basis.col(0);
        CMatrix c = w * g * g.adjoint() - w * (projector(n0) - g * g.adjoint());
        ASSERT_TRUE(gap_criteria(v, c, z).eigen);
        auto s = eigen_vector_structure(v, c, z);
        ASSERT_TRUE(s.has_value());
        EXPECT_LT(s->n_zeta_residual, 1e-9);
        EXPECT_LT(s->c_residual, 1e-9);
        EXPECT_LT(s->v_residual, 1e-9);
    }
}
