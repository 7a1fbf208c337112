#include "dilatory/random.hpp"

#include <gtest/gtest.h>

using namespace dilatory;

TEST(HermitianEig, DiagonalSpectrumIsDescending) {
  CMatrix m = CMatrix::Zero(3, 3);
  m.diagonal() << 1.0, 3.0, 2.0;
  const EigenDecomposition e = hermitian_eig(m);
  EXPECT_DOUBLE_EQ(e.eigenvalues(0), 3.0);
  EXPECT_DOUBLE_EQ(e.eigenvalues(1), 2.0);
  EXPECT_DOUBLE_EQ(e.eigenvalues(2), 1.0);
  // phase fixing makes the eigenvectors standard basis vectors, not −e_i
  EXPECT_NEAR(e.eigenvectors(1, 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(e.eigenvectors(2, 1).real(), 1.0, 1e-15);
}

TEST(HermitianEig, ReconstructsRandomHermitian) {
  Rng rng(3);
  for (int n = 1; n <= 5; ++n) {
    const CMatrix h = random_hermitian(n, rng);
    const EigenDecomposition e = hermitian_eig(h);
    const CMatrix back = e.eigenvectors * e.eigenvalues.cast<Complex>().asDiagonal() * e.eigenvectors.adjoint();
    EXPECT_LE(max_abs(back - h), 1e-12);
    EXPECT_LE(isometry_residual(e.eigenvectors), 1e-12);
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index arg = 0;
      e.eigenvectors.col(i).cwiseAbs().maxCoeff(&arg);
      EXPECT_EQ(e.eigenvectors(arg, i).imag(), 0.0);
      EXPECT_GT(e.eigenvectors(arg, i).real(), 0.0);
    }
  }
}

TEST(HermitianEig, RejectsNonHermitian) {
  CMatrix m(2, 2);
  m << 0, 1, 0, 0;
  try {
    hermitian_eig(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotHermitian);
  }
}

TEST(HermitianEig, Deterministic) {
  Rng a(11), b(11);
  const CMatrix h1 = random_hermitian(4, a);
  const CMatrix h2 = random_hermitian(4, b);
  const auto e1 = hermitian_eig(h1);
  const auto e2 = hermitian_eig(h2);
  EXPECT_EQ(e1.eigenvectors, e2.eigenvectors);
  EXPECT_EQ(e1.eigenvalues, e2.eigenvalues);
}

TEST(RankPsd, ProjectorAndNegative) {
  CMatrix p = CMatrix::Zero(3, 3);
  p(0, 0) = 1.0;
  p(1, 1) = 1.0;
  const RankReport r = rank_psd(p);
  EXPECT_EQ(r.rank, 2);
  EXPECT_TRUE(r.is_psd);

  CMatrix q = p;
  q(2, 2) = -0.5;
  EXPECT_FALSE(rank_psd(q).is_psd);
  EXPECT_DOUBLE_EQ(rank_psd(q).min_eigenvalue, -0.5);
}

TEST(RankPsd, RelativeCutoff) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = 1e6;
  m(1, 1) = 1e-4;  // below 1e-9 · 1e6
  EXPECT_EQ(rank_psd(m).rank, 1);
  m(1, 1) = 1e-2;
  EXPECT_EQ(rank_psd(m).rank, 2);
  EXPECT_EQ(rank_psd(CMatrix::Zero(3, 3)).rank, 0);
}

TEST(Kron, LeftFactorMajor) {
  CMatrix a(2, 1), b(1, 2);
  a << 1.0, 2.0;
  b << 3.0, Complex(0, 1);
  const CMatrix k = kron(a, b);
  ASSERT_EQ(k.rows(), 2);
  ASSERT_EQ(k.cols(), 2);
  EXPECT_EQ(k(0, 0), Complex(3.0));
  EXPECT_EQ(k(0, 1), Complex(0, 1));
  EXPECT_EQ(k(1, 0), Complex(6.0));
  EXPECT_EQ(k(1, 1), Complex(0, 2));
}

TEST(Kron, MixedProduct) {
  Rng rng(5);
  const CMatrix a = random_complex(2, 3, rng), b = random_complex(2, 2, rng);
  const CMatrix c = random_complex(3, 2, rng), d = random_complex(2, 1, rng);
  EXPECT_LE(max_abs(kron(a, b) * kron(c, d) - kron(a * c, b * d)), 1e-12);
}

TEST(Svd, ReconstructsRectangular) {
  Rng rng(9);
  for (auto [r, c] : std::vector<std::pair<int, int>>{{2, 4}, {4, 2}, {3, 3}, {1, 5}}) {
    const CMatrix m = random_complex(r, c, rng);
    const SvdResult s = svd(m);
    CMatrix sigma = CMatrix::Zero(r, c);
    for (Eigen::Index i = 0; i < s.singular_values.size(); ++i) sigma(i, i) = s.singular_values(i);
    EXPECT_LE(max_abs(s.U * sigma * s.V.adjoint() - m), 1e-12);
    EXPECT_LE(isometry_residual(s.U), 1e-12);
    EXPECT_LE(isometry_residual(s.V), 1e-12);
  }
}

TEST(NullSpace, RankDeficient) {
  Rng rng(13);
  const CMatrix x = random_complex(5, 2, rng);
  const CMatrix y = random_complex(2, 4, rng);
  const CMatrix m = x * y;  // rank 2
  const CMatrix n = null_space(m);
  EXPECT_EQ(n.cols(), 2);
  EXPECT_LE(max_abs(m * n), 1e-12);
  EXPECT_LE(isometry_residual(n), 1e-12);
  EXPECT_EQ(matrix_rank(m), 2);
  EXPECT_EQ(range_basis(m).cols(), 2);
}

TEST(NullSpace, TallInputUsesReduction) {
  Rng rng(17);
  const CMatrix m = random_complex(40, 3, rng) * random_complex(3, 6, rng);
  const CMatrix n = null_space(m);
  EXPECT_EQ(n.cols(), 3);
  EXPECT_LE(max_abs(m * n), 1e-10);
}

TEST(OrthonormalComplement, CanonicalOrder) {
  CMatrix b(3, 1);
  b << 1.0, 0.0, 0.0;
  const CMatrix c = orthonormal_complement(b, 3);
  ASSERT_EQ(c.cols(), 2);
  EXPECT_LE(max_abs(c - identity(3).rightCols(2)), 1e-15);

  Rng rng(1);
  const CMatrix q = random_isometry(4, 2, rng);
  const CMatrix full = orthonormal_complement(q, 4);
  CMatrix u(4, 4);
  u << q, full;
  EXPECT_LE(isometry_residual(u), 1e-12);
}

TEST(RowMajorVec, RoundTrip) {
  CMatrix m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  const CVector v = vec_row_major(m);
  EXPECT_EQ(v(1), Complex(2.0));
  EXPECT_EQ(v(3), Complex(4.0));
  EXPECT_EQ(unvec_row_major(v, 2, 3), m);
}

TEST(Tolerance, FromClampsRankCutoffToMachineEpsilon) {
  const Tolerance t = Tolerance::from(1e-30);
  EXPECT_EQ(t.eps_eq, 1e-30);
  EXPECT_EQ(t.eps_rank, std::numeric_limits<double>::epsilon());
  EXPECT_THROW(Tolerance::from(0.0), Error);
  EXPECT_THROW(Tolerance::from(-1.0), Error);
}

TEST(Rng, StreamsAreReproducibleAndDistinct) {
  Rng a = Rng::stream(42, 3), b = Rng::stream(42, 3), c = Rng::stream(42, 4);
  const double x = a.normal();
  EXPECT_EQ(x, b.normal());
  EXPECT_NE(x, c.normal());
}

TEST(Rng, RandomUnitaryIsUnitary) {
  Rng rng(2);
  for (int n = 1; n <= 5; ++n) {
    const CMatrix u = random_unitary(n, rng);
    EXPECT_LE(isometry_residual(u), 1e-12);
    EXPECT_LE(coisometry_residual(u), 1e-12);
  }
}
