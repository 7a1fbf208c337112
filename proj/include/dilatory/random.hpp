#pragma once

// Seeded random instances. The generator is std::mt19937_64; instance i of
// a run with seed s draws from the stream seeded by splitmix64(s ⊕ golden·(i+1)),
// so instances can be generated in any order or in parallel. Normal deviates
// use Box–Muller on 53-bit uniforms rather than std::normal_distribution,
// whose algorithm differs between standard libraries.

#include "dilatory/dilation.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace dilatory {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  static Rng stream(std::uint64_t seed, std::uint64_t index) {
    return Rng(seed ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
  }

  // uniform on [0, 1) with 53 random bits
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    double u = uniform();
    while (u <= 0.0) u = uniform();
    const double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
  }

  // uniform integer in [lo, hi]
  int integer(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(engine_() % span);
  }

  Complex complex_normal() { return Complex(normal(), normal()) / std::sqrt(2.0); }

 private:
  std::mt19937_64 engine_;
};

inline CMatrix random_complex(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.complex_normal();
  return m;
}

inline CMatrix random_hermitian(Eigen::Index n, Rng& rng) {
  const CMatrix g = random_complex(n, n, rng);
  return (g + g.adjoint()) / 2.0;
}

// Haar unitary: QR of a Ginibre matrix with the phases of R's diagonal removed.
inline CMatrix random_unitary(Eigen::Index n, Rng& rng) {
  const CMatrix g = random_complex(n, n, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * identity(n);
  const CMatrix r = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double a = std::abs(r(j, j));
    if (a > 0.0) q.col(j) *= r(j, j) / a;
  }
  return q;
}

// Columns of a random isometry ℂ^cols → ℂ^rows.
inline CMatrix random_isometry(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  return random_unitary(rows, rng).leftCols(cols);
}

inline AlgebraElement random_element(const FdCStarAlgebra& a, Rng& rng) {
  std::vector<CMatrix> blocks;
  for (int n : a.blocks()) blocks.push_back(random_complex(n, n, rng));
  return AlgebraElement(a, std::move(blocks));
}

inline FdCStarAlgebra random_algebra(int max_blocks, int max_block_size, Rng& rng) {
  const int count = rng.integer(1, max_blocks);
  std::vector<int> blocks;
  for (int i = 0; i < count; ++i) blocks.push_back(rng.integer(1, max_block_size));
  return FdCStarAlgebra(blocks);
}

// φ(a) = Σ_i K_i* a K_i with K_i: ℂ^k → ℂ^N, N the ambient size of A.
// With `unital`, K_i ← K_i X^{-1/2} for X = Σ K_i*K_i; throws InvalidArgument
// when X is singular.
inline OcpMap random_cp_map(const FdCStarAlgebra& a, int k, int kraus_rank, Rng& rng, bool unital = false) {
  if (k < 1 || kraus_rank < 1) throw Error(ErrorKind::InvalidArgument, "k and the Kraus rank must be positive");
  const int big = a.ambient_dim();
  std::vector<CMatrix> kraus;
  for (int i = 0; i < kraus_rank; ++i) kraus.push_back(random_complex(big, k, rng));
  if (unital) {
    CMatrix x = CMatrix::Zero(k, k);
    for (const CMatrix& kr : kraus) x += kr.adjoint() * kr;
    const EigenDecomposition eig = hermitian_eig((x + x.adjoint()) / 2.0);
    const double lmax = eig.eigenvalues(0);
    if (eig.eigenvalues(k - 1) <= 1e-10 * std::max(lmax, 1.0)) {
      throw Error(ErrorKind::InvalidArgument, "Σ K_i*K_i is singular; no unital renormalization exists");
    }
    const CMatrix inv_sqrt =
        eig.eigenvectors * eig.eigenvalues.cwiseSqrt().cwiseInverse().asDiagonal() * eig.eigenvectors.adjoint();
    for (CMatrix& kr : kraus) kr = kr * inv_sqrt;
  }
  std::vector<CMatrix> images;
  for (const AlgebraElement& e : matrix_units(a)) {
    const CMatrix emb = embed_element(e);
    CMatrix img = CMatrix::Zero(k, k);
    for (const CMatrix& kr : kraus) img += kr.adjoint() * emb * kr;
    images.push_back(img);
  }
  return OcpMap(a, k, std::move(images));
}

// Unital rep of A with multiplicities c on ℂ^{Σ n_j c_j}, conjugated by a
// random unitary. Returns the h×h images.
inline std::vector<CMatrix> random_multiplicity_rep(const FdCStarAlgebra& a, const std::vector<int>& c, Rng& rng) {
  std::vector<CMatrix> images = amplified_images(a, c);
  if (images.empty() || images.front().rows() == 0) return images;
  const CMatrix x = random_unitary(images.front().rows(), rng);
  for (CMatrix& m : images) m = x * m * x.adjoint();
  return images;
}

// A random unital *-hom A → B built from a random multiplicity matrix
// (rows: target blocks) that fits B's block sizes; nullopt when none was
// found in a few tries.
inline std::optional<StarHom> random_hom(const FdCStarAlgebra& source, const FdCStarAlgebra& target, Rng& rng) {
  for (int attempt = 0; attempt < 32; ++attempt) {
    std::vector<std::vector<int>> mult;
    bool ok = true;
    for (int t = 0; t < target.num_blocks() && ok; ++t) {
      int remaining = target.block_size(t);
      std::vector<int> row(static_cast<std::size_t>(source.num_blocks()), 0);
      for (int guard = 0; remaining > 0 && guard < 64; ++guard) {
        const int s = rng.integer(0, source.num_blocks() - 1);
        if (source.block_size(s) <= remaining) {
          ++row[static_cast<std::size_t>(s)];
          remaining -= source.block_size(s);
        }
      }
      ok = remaining == 0;
      mult.push_back(row);
    }
    if (!ok) continue;
    std::vector<CMatrix> unitaries;
    for (int t = 0; t < target.num_blocks(); ++t) unitaries.push_back(random_unitary(target.block_size(t), rng));
    return block_embedding_hom(source, mult, unitaries);
  }
  return std::nullopt;
}

}  // namespace dilatory
