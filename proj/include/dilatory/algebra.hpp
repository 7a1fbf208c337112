#pragma once

// Finite-dimensional C*-algebras presented as ⊕_j M_{n_j}(ℂ), their
// elements, unital *-homomorphisms and commutants.

#include "dilatory/numerics.hpp"

#include <span>
#include <string>
#include <vector>

namespace dilatory {

class FdCStarAlgebra {
 public:
  FdCStarAlgebra() : FdCStarAlgebra(std::vector<int>{1}) {}

  explicit FdCStarAlgebra(std::vector<int> blocks) : blocks_(std::move(blocks)) {
    if (blocks_.empty()) throw Error(ErrorKind::InvalidArgument, "algebra needs at least one block");
    int offset = 0, ambient = 0;
    for (int n : blocks_) {
      if (n < 1) throw Error(ErrorKind::InvalidArgument, "block sizes must be positive");
      basis_offsets_.push_back(offset);
      ambient_offsets_.push_back(ambient);
      offset += n * n;
      ambient += n;
    }
    dim_ = offset;
    ambient_ = ambient;
  }

  const std::vector<int>& blocks() const { return blocks_; }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  int block_size(int j) const { return blocks_.at(static_cast<std::size_t>(j)); }
  int dim() const { return dim_; }
  int ambient_dim() const { return ambient_; }
  int basis_offset(int j) const { return basis_offsets_.at(static_cast<std::size_t>(j)); }
  int ambient_offset(int j) const { return ambient_offsets_.at(static_cast<std::size_t>(j)); }

  struct Unit {
    int block;
    int row;
    int col;
  };

  Unit unit(int alpha) const {
    if (alpha < 0 || alpha >= dim_) throw Error(ErrorKind::InvalidArgument, "basis index out of range");
    int j = num_blocks() - 1;
    while (basis_offsets_[static_cast<std::size_t>(j)] > alpha) --j;
    const int local = alpha - basis_offsets_[static_cast<std::size_t>(j)];
    const int n = blocks_[static_cast<std::size_t>(j)];
    return Unit{j, local / n, local % n};
  }

  int index(int block, int row, int col) const {
    return basis_offset(block) + row * block_size(block) + col;
  }

  friend bool operator==(const FdCStarAlgebra& a, const FdCStarAlgebra& b) { return a.blocks_ == b.blocks_; }

  std::string describe() const {
    std::string s;
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      if (i) s += "⊕";
      s += "M" + std::to_string(blocks_[i]);
    }
    return s;
  }

 private:
  std::vector<int> blocks_;
  std::vector<int> basis_offsets_;
  std::vector<int> ambient_offsets_;
  int dim_ = 0;
  int ambient_ = 0;
};

struct AlgebraElement {
  FdCStarAlgebra algebra;
  std::vector<CMatrix> blocks;

  AlgebraElement() = default;

  AlgebraElement(FdCStarAlgebra a, std::vector<CMatrix> b) : algebra(std::move(a)), blocks(std::move(b)) {
    if (static_cast<int>(blocks.size()) != algebra.num_blocks()) {
      throw Error(ErrorKind::ShapeMismatch, "element has wrong number of blocks");
    }
    for (int j = 0; j < algebra.num_blocks(); ++j) {
      const CMatrix& m = blocks[static_cast<std::size_t>(j)];
      if (m.rows() != algebra.block_size(j) || m.cols() != algebra.block_size(j)) {
        throw Error(ErrorKind::ShapeMismatch, "element block has wrong shape");
      }
    }
  }

  static AlgebraElement zero(const FdCStarAlgebra& a) {
    std::vector<CMatrix> b;
    for (int n : a.blocks()) b.push_back(CMatrix::Zero(n, n));
    return {a, std::move(b)};
  }

  static AlgebraElement unit(const FdCStarAlgebra& a) {
    std::vector<CMatrix> b;
    for (int n : a.blocks()) b.push_back(identity(n));
    return {a, std::move(b)};
  }

  static AlgebraElement matrix_unit(const FdCStarAlgebra& a, int alpha) {
    AlgebraElement e = zero(a);
    const auto u = a.unit(alpha);
    e.blocks[static_cast<std::size_t>(u.block)](u.row, u.col) = 1.0;
    return e;
  }

  // Coefficients on the matrix-unit basis (block-major, row-major).
  static AlgebraElement from_coords(const FdCStarAlgebra& a, const CVector& coords) {
    if (coords.size() != a.dim()) throw Error(ErrorKind::ShapeMismatch, "coordinate vector has wrong length");
    AlgebraElement e = zero(a);
    for (int j = 0; j < a.num_blocks(); ++j) {
      const int n = a.block_size(j);
      e.blocks[static_cast<std::size_t>(j)] =
          unvec_row_major(coords.segment(a.basis_offset(j), n * n), n, n);
    }
    return e;
  }

  CVector coords() const {
    CVector v(algebra.dim());
    for (int j = 0; j < algebra.num_blocks(); ++j) {
      const int n = algebra.block_size(j);
      v.segment(algebra.basis_offset(j), n * n) = vec_row_major(blocks[static_cast<std::size_t>(j)]);
    }
    return v;
  }

  AlgebraElement adjoint() const {
    AlgebraElement out = *this;
    for (CMatrix& b : out.blocks) b = b.adjoint().eval();
    return out;
  }

  friend AlgebraElement operator*(const AlgebraElement& x, const AlgebraElement& y) {
    require_same(x, y);
    AlgebraElement out = x;
    for (std::size_t j = 0; j < out.blocks.size(); ++j) out.blocks[j] = x.blocks[j] * y.blocks[j];
    return out;
  }

  friend AlgebraElement operator+(const AlgebraElement& x, const AlgebraElement& y) {
    require_same(x, y);
    AlgebraElement out = x;
    for (std::size_t j = 0; j < out.blocks.size(); ++j) out.blocks[j] += y.blocks[j];
    return out;
  }

  friend AlgebraElement operator-(const AlgebraElement& x, const AlgebraElement& y) {
    require_same(x, y);
    AlgebraElement out = x;
    for (std::size_t j = 0; j < out.blocks.size(); ++j) out.blocks[j] -= y.blocks[j];
    return out;
  }

  friend AlgebraElement operator*(Complex s, const AlgebraElement& x) {
    AlgebraElement out = x;
    for (CMatrix& b : out.blocks) b *= s;
    return out;
  }

  double max_abs() const {
    double m = 0.0;
    for (const CMatrix& b : blocks) m = std::max(m, dilatory::max_abs(b));
    return m;
  }

 private:
  static void require_same(const AlgebraElement& x, const AlgebraElement& y) {
    if (!(x.algebra == y.algebra)) throw Error(ErrorKind::ShapeMismatch, "elements of different algebras");
  }
};

inline double max_abs_diff(const AlgebraElement& a, const AlgebraElement& b) { return (a - b).max_abs(); }

inline std::vector<AlgebraElement> matrix_units(const FdCStarAlgebra& a) {
  std::vector<AlgebraElement> units;
  units.reserve(static_cast<std::size_t>(a.dim()));
  for (int alpha = 0; alpha < a.dim(); ++alpha) units.push_back(AlgebraElement::matrix_unit(a, alpha));
  return units;
}

// Block-diagonal embedding into M_N, N = Σ n_j.
inline CMatrix embed_element(const AlgebraElement& a) { return direct_sum(a.blocks); }

// Matrix of left multiplication by `a` on basis coordinates (dim × dim).
inline CMatrix left_multiplication(const AlgebraElement& a) {
  const FdCStarAlgebra& alg = a.algebra;
  CMatrix out = CMatrix::Zero(alg.dim(), alg.dim());
  for (int j = 0; j < alg.num_blocks(); ++j) {
    const int n = alg.block_size(j);
    const CMatrix& x = a.blocks[static_cast<std::size_t>(j)];
    // x·E_cd = Σ_p x[p,c] E_pd
    for (int c = 0; c < n; ++c) {
      for (int d = 0; d < n; ++d) {
        for (int p = 0; p < n; ++p) {
          out(alg.index(j, p, d), alg.index(j, c, d)) = x(p, c);
        }
      }
    }
  }
  return out;
}

struct StarHom {
  FdCStarAlgebra source;
  FdCStarAlgebra target;
  std::vector<AlgebraElement> basis_images;

  StarHom() = default;

  StarHom(FdCStarAlgebra src, FdCStarAlgebra tgt, std::vector<AlgebraElement> images)
      : source(std::move(src)), target(std::move(tgt)), basis_images(std::move(images)) {
    if (static_cast<int>(basis_images.size()) != source.dim()) {
      throw Error(ErrorKind::ShapeMismatch, "one image per matrix unit of the source is required");
    }
    for (const AlgebraElement& e : basis_images) {
      if (!(e.algebra == target)) throw Error(ErrorKind::ShapeMismatch, "image outside the target algebra");
    }
  }

  AlgebraElement operator()(const AlgebraElement& a) const {
    if (!(a.algebra == source)) throw Error(ErrorKind::ShapeMismatch, "element outside the source algebra");
    const CVector c = a.coords();
    return AlgebraElement::from_coords(target, coefficient_matrix() * c);
  }

  // Column α holds the coordinates of f(E_α); dim(target) × dim(source).
  CMatrix coefficient_matrix() const {
    CMatrix f(target.dim(), source.dim());
    for (int alpha = 0; alpha < source.dim(); ++alpha) f.col(alpha) = basis_images[static_cast<std::size_t>(alpha)].coords();
    return f;
  }
};

inline StarHom identity_hom(const FdCStarAlgebra& a) { return StarHom(a, a, matrix_units(a)); }

// The unique unital *-homomorphism ℂ → A.
inline StarHom unit_hom(const FdCStarAlgebra& a) {
  return StarHom(FdCStarAlgebra({1}), a, {AlgebraElement::unit(a)});
}

// g ∘ f
inline StarHom compose(const StarHom& g, const StarHom& f) {
  if (!(f.target == g.source)) throw Error(ErrorKind::ShapeMismatch, "homomorphisms are not composable");
  std::vector<AlgebraElement> images;
  for (const AlgebraElement& e : f.basis_images) images.push_back(g(e));
  return StarHom(f.source, g.target, std::move(images));
}

// Unital *-homomorphism A → B where target block j receives
// U_j (⊞_i M_{n_i} ⊗ 1_{mult[j][i]}) U_j*. Target block sizes are
// Σ_i n_i·mult[j][i]; an empty `unitaries` list means no conjugation.
inline StarHom block_embedding_hom(const FdCStarAlgebra& source, const std::vector<std::vector<int>>& mult,
                                   const std::vector<CMatrix>& unitaries = {}) {
  std::vector<int> target_blocks;
  for (const auto& row : mult) {
    if (static_cast<int>(row.size()) != source.num_blocks()) {
      throw Error(ErrorKind::ShapeMismatch, "multiplicity row length must equal the number of source blocks");
    }
    int n = 0;
    for (int i = 0; i < source.num_blocks(); ++i) {
      if (row[static_cast<std::size_t>(i)] < 0) throw Error(ErrorKind::InvalidArgument, "negative multiplicity");
      n += source.block_size(i) * row[static_cast<std::size_t>(i)];
    }
    target_blocks.push_back(n);
  }
  const FdCStarAlgebra target(target_blocks);
  if (!unitaries.empty() && static_cast<int>(unitaries.size()) != target.num_blocks()) {
    throw Error(ErrorKind::ShapeMismatch, "one unitary per target block is required");
  }
  std::vector<AlgebraElement> images;
  for (int alpha = 0; alpha < source.dim(); ++alpha) {
    const auto u = source.unit(alpha);
    AlgebraElement img = AlgebraElement::zero(target);
    for (int j = 0; j < target.num_blocks(); ++j) {
      CMatrix& blk = img.blocks[static_cast<std::size_t>(j)];
      int offset = 0;
      for (int i = 0; i < source.num_blocks(); ++i) {
        const int n = source.block_size(i);
        const int c = mult[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
        if (i == u.block) {
          for (int s = 0; s < c; ++s) blk(offset + u.row * c + s, offset + u.col * c + s) = 1.0;
        }
        offset += n * c;
      }
      if (!unitaries.empty()) {
        const CMatrix& x = unitaries[static_cast<std::size_t>(j)];
        blk = (x * blk * x.adjoint()).eval();
      }
    }
    images.push_back(std::move(img));
  }
  return StarHom(source, target, std::move(images));
}

struct HomReport {
  bool unital = false;
  bool multiplicative = false;
  bool star_preserving = false;
  double unital_residual = 0.0;
  double multiplicative_residual = 0.0;
  double star_residual = 0.0;

  bool ok() const { return unital && multiplicative && star_preserving; }
  double max_residual() const { return std::max({unital_residual, multiplicative_residual, star_residual}); }
};

inline HomReport check_star_hom(const StarHom& f, const Tolerance& tol = {}) {
  if (static_cast<int>(f.basis_images.size()) != f.source.dim()) {
    throw Error(ErrorKind::ShapeMismatch, "basis image count does not match the source");
  }
  HomReport r;
  const auto units = matrix_units(f.source);
  r.unital_residual = max_abs_diff(f(AlgebraElement::unit(f.source)), AlgebraElement::unit(f.target));
  for (std::size_t a = 0; a < units.size(); ++a) {
    const AlgebraElement& fa = f.basis_images[a];
    for (std::size_t b = 0; b < units.size(); ++b) {
      const AlgebraElement lhs = f(units[a] * units[b]);
      r.multiplicative_residual = std::max(r.multiplicative_residual, max_abs_diff(lhs, fa * f.basis_images[b]));
    }
    r.star_residual = std::max(r.star_residual, max_abs_diff(f(units[a].adjoint()), fa.adjoint()));
  }
  r.unital = r.unital_residual <= tol.eps_eq;
  r.multiplicative = r.multiplicative_residual <= tol.eps_eq;
  r.star_preserving = r.star_residual <= tol.eps_eq;
  return r;
}

// Images of the matrix units under a ↦ ⊞_j (a_j ⊗ 1_{c_j}) on ℂ^{Σ n_j c_j}.
inline std::vector<CMatrix> amplified_images(const FdCStarAlgebra& a, const std::vector<int>& c) {
  if (static_cast<int>(c.size()) != a.num_blocks()) throw Error(ErrorKind::ShapeMismatch, "one multiplicity per block");
  const StarHom h = block_embedding_hom(a, {c});
  std::vector<CMatrix> out;
  for (const AlgebraElement& e : h.basis_images) out.push_back(e.blocks[0]);
  return out;
}

// Orthonormal (Hilbert–Schmidt) basis of {X : XS = SX, XS* = S*X for all S}.
inline std::vector<CMatrix> commutant(std::span<const CMatrix> generators, Eigen::Index ambient_dim,
                                      const Tolerance& tol = {}) {
  const Eigen::Index n = ambient_dim;
  for (const CMatrix& s : generators) {
    if (s.rows() != n || s.cols() != n) throw Error(ErrorKind::ShapeMismatch, "generator has wrong size");
  }
  const CMatrix id = identity(n);
  // Row-major vec: vec(XS − SX) = (I ⊗ Sᵀ − S ⊗ I)·vec(X).
  CMatrix stacked(static_cast<Eigen::Index>(2 * generators.size()) * n * n, n * n);
  Eigen::Index row = 0;
  for (const CMatrix& s : generators) {
    for (const CMatrix& g : {s, CMatrix(s.adjoint())}) {
      stacked.middleRows(row, n * n) = kron(id, g.transpose()) - kron(g, id);
      row += n * n;
    }
  }
  const CMatrix null = null_space(stacked, tol);
  std::vector<CMatrix> basis;
  for (Eigen::Index i = 0; i < null.cols(); ++i) basis.push_back(unvec_row_major(null.col(i), n, n));
  return basis;
}

}  // namespace dilatory
