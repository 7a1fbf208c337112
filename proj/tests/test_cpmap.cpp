#include "dilatory/suite.hpp"

#include <gtest/gtest.h>

using namespace dilatory;

namespace {

OcpMap transpose_map(int n) {
  const FdCStarAlgebra a({n});
  std::vector<CMatrix> images;
  for (const AlgebraElement& e : matrix_units(a)) images.push_back(e.blocks[0].transpose());
  return OcpMap(a, n, images);
}

OcpMap identity_channel(int n) {
  const FdCStarAlgebra a({n});
  std::vector<CMatrix> images;
  for (const AlgebraElement& e : matrix_units(a)) images.push_back(e.blocks[0]);
  return OcpMap(a, n, images);
}

}  // namespace

TEST(OcpMap, RejectsBadShapes) {
  const FdCStarAlgebra a({2});
  EXPECT_THROW(OcpMap(a, 0, {}), Error);
  EXPECT_THROW(OcpMap(a, 1, {CMatrix::Zero(1, 1)}), Error);
}

TEST(Choi, TransposeHasEigenvalueMinusOne) {
  const CpReport r = is_completely_positive(transpose_map(2));
  EXPECT_FALSE(r.completely_positive);
  EXPECT_TRUE(r.self_adjoint);
  EXPECT_NEAR(r.min_eigenvalue(), -1.0, 1e-12);
}

TEST(Choi, AdTHasRankOneBlock) {
  Rng rng(1);
  const CMatrix t = random_complex(3, 2, rng);
  const OcpMap phi = ad_map(t, 2);
  ASSERT_TRUE(is_completely_positive(phi));
  const auto blocks = choi_blocks(phi);
  ASSERT_EQ(blocks.size(), 1u);
  EXPECT_EQ(rank_psd(blocks[0]).rank, 1);
}

TEST(Choi, TracialStateIsMaximallyMixed) {
  for (int m = 2; m <= 3; ++m) {
    const auto blocks = choi_blocks(tracial_map(m, 1));
    EXPECT_LE(max_abs(blocks[0] - identity(m) / static_cast<double>(m)), 1e-15);
  }
}

TEST(Choi, NonSelfAdjointMapIsNotCp) {
  const FdCStarAlgebra a({1});
  const OcpMap phi(a, 1, {CMatrix::Constant(1, 1, Complex(0.0, 1.0))});
  const CpReport r = is_completely_positive(phi);
  EXPECT_FALSE(r.self_adjoint);
  EXPECT_FALSE(r.completely_positive);
}

// Positivity on a random positive element of the 2-ampliation, checked
// directly rather than through the Choi matrix.
TEST(Choi, AmpliationOfRandomCpMapIsPositive) {
  Rng rng(21);
  const FdCStarAlgebra a({2, 1});
  const OcpMap phi = random_cp_map(a, 2, 2, rng);
  ASSERT_TRUE(is_completely_positive(phi));
  // x = [x_ij] ∈ M_2(A) built as y*y
  std::vector<std::vector<AlgebraElement>> y(2, std::vector<AlgebraElement>(2));
  for (auto& row : y)
    for (auto& e : row) e = random_element(a, rng);
  std::vector<std::vector<AlgebraElement>> x(2, std::vector<AlgebraElement>(2, AlgebraElement::zero(a)));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int l = 0; l < 2; ++l) x[i][j] = x[i][j] + y[l][i].adjoint() * y[l][j];
  const CMatrix image = ampliation_apply(phi, 2, x);
  EXPECT_GE(hermitian_eig(image, Tolerance{1e-9, 1e-9}).eigenvalues.minCoeff(), -1e-10);
}

TEST(Unital, TracialAndRandomUnital) {
  EXPECT_TRUE(is_unital(tracial_map(3, 2)));
  Rng rng(2);
  const OcpMap phi = random_cp_map(FdCStarAlgebra({2, 1}), 2, 2, rng, true);
  EXPECT_TRUE(is_unital(phi));
  EXPECT_TRUE(is_completely_positive(phi));
}

TEST(Unital, SingularRenormalizationRejected) {
  Rng rng(2);
  // one Kraus operator ℂ² → ℂ¹ has a kernel, so Σ K*K is singular
  EXPECT_THROW(random_cp_map(FdCStarAlgebra({1}), 2, 1, rng, true), Error);
}

TEST(Morphism, TracialMapsAcceptAnyT) {
  Rng rng(3);
  const CMatrix t = random_complex(3, 2, rng);
  EXPECT_TRUE(is_ocp_morphism(t, tracial_map(2, 2), tracial_map(2, 3)));
}

TEST(Morphism, TracialCounterexample) {
  const auto ex = counterexample_tracial();
  const MorphismVariants v = check_morphism_variants(ex.T, ex.phi, ex.psi);
  EXPECT_FALSE(v.diagram_23);
  EXPECT_TRUE(v.diagram_22);
  EXPECT_TRUE(v.diagram_24);
  // TT* − 1 has eigenvalues 0 and −1
  const CMatrix gap = ex.T * ex.T.adjoint() - identity(2);
  EXPECT_NEAR(hermitian_eig(gap).eigenvalues.cwiseAbs().maxCoeff(), 1.0, 1e-12);
}

TEST(Morphism, FlipCounterexample) {
  const auto ex = counterexample_flip();
  const MorphismVariants v = check_morphism_variants(ex.T, ex.phi, ex.psi);
  EXPECT_FALSE(v.diagram_23);
  EXPECT_FALSE(v.diagram_22);
  EXPECT_TRUE(v.diagram_24);
  EXPECT_NEAR(v.residual_22, 0.5, 1e-15);
  // on E_12: Tφ(E_12) = 0 while ψ(E_12)T = (0, 1/2)ᵀ
  const AlgebraElement e12 = AlgebraElement::matrix_unit(ex.phi.domain, 1);
  EXPECT_NEAR(max_abs(ex.T * apply(ex.phi, e12) - apply(ex.psi, e12) * ex.T), 0.5, 1e-15);
}

TEST(Morphism, DaggerOfCounterexampleIsValid) {
  const auto ex = counterexample_tracial();
  const OcpMorphism d = dagger_morphism({ex.phi, ex.psi, ex.T});
  EXPECT_TRUE(is_ocp_morphism(d.T, d.source, d.target));
}

TEST(Morphism, RandomInstancesIntertwine) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    Rng rng(s);
    const OcpMap phi = ensemble_map(rng, 3);
    const OcpMorphismInstance m = random_ocp_morphism(phi, rng);
    EXPECT_TRUE(is_ocp_morphism(m.T, phi, m.psi)) << "seed " << s;
    EXPECT_TRUE(is_completely_positive(m.psi)) << "seed " << s;
  }
}

TEST(OpState, IsometricMorphismSplitsTarget) {
  Rng rng(4);
  const OcpMap phi = random_cp_map(FdCStarAlgebra({2}), 2, 2, rng, true);
  const OcpMap aux = random_cp_map(FdCStarAlgebra({2}), 1, 1, rng, true);
  const CMatrix x = random_unitary(3, rng);
  std::vector<CMatrix> images;
  for (int a = 0; a < 4; ++a) images.push_back(x * direct_sum(phi.image(a), aux.image(a)) * x.adjoint());
  const OcpMap psi(phi.domain, 3, images);
  const CMatrix t = x.leftCols(2);
  const OpStateDecomposition d = decompose_opstate_morphism(t, phi, psi);
  EXPECT_LE(d.conjugation_residual, 1e-12);
  EXPECT_LE(d.off_diagonal_residual, 1e-12);
  EXPECT_LE(isometry_residual(d.U), 1e-12);
  EXPECT_LE(coisometry_residual(d.U), 1e-12);
  ASSERT_TRUE(d.psi2.has_value());
  EXPECT_EQ(d.psi2->k, 1);
  EXPECT_TRUE(is_unital(*d.psi2, Tolerance{1e-9, 1e-10}));
}

TEST(Pullback, AlongUnitHomIsValue) {
  const OcpMap phi = tracial_map(2, 2);
  const OcpMap pulled = pullback(phi, unit_hom(phi.domain));
  EXPECT_LE(max_abs(pulled.image(0) - identity(2)), 1e-15);
}

TEST(Compose, IdentityChannel) {
  Rng rng(6);
  const OcpMap phi = random_cp_map(FdCStarAlgebra({2}), 2, 2, rng);
  EXPECT_LE(max_abs_diff(compose(identity_channel(2), phi), phi), 1e-15);
}
