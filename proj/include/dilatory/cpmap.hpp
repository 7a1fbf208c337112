#pragma once

// Operator-valued completely positive maps φ: A → B(ℂ^k), stored on the
// matrix-unit basis of A, and their morphisms.

#include "dilatory/algebra.hpp"

#include <optional>
#include <vector>

namespace dilatory {

struct OcpMap {
  FdCStarAlgebra domain;
  int k = 1;
  std::vector<CMatrix> basis_images;

  OcpMap() = default;

  OcpMap(FdCStarAlgebra a, int k_, std::vector<CMatrix> images)
      : domain(std::move(a)), k(k_), basis_images(std::move(images)) {
    if (k < 1) throw Error(ErrorKind::InvalidArgument, "output dimension k must be positive");
    if (static_cast<int>(basis_images.size()) != domain.dim()) {
      throw Error(ErrorKind::ShapeMismatch, "one image per matrix unit is required");
    }
    for (const CMatrix& m : basis_images) {
      if (m.rows() != k || m.cols() != k) throw Error(ErrorKind::ShapeMismatch, "basis image must be k×k");
      if (!all_finite(m)) throw Error(ErrorKind::InvalidArgument, "basis image has non-finite entries");
    }
  }

  const CMatrix& image(int alpha) const { return basis_images.at(static_cast<std::size_t>(alpha)); }
};

inline CMatrix apply(const OcpMap& phi, const AlgebraElement& a) {
  if (!(a.algebra == phi.domain)) throw Error(ErrorKind::ShapeMismatch, "element outside the domain of the map");
  const CVector c = a.coords();
  CMatrix out = CMatrix::Zero(phi.k, phi.k);
  for (int alpha = 0; alpha < phi.domain.dim(); ++alpha) {
    if (c(alpha) != Complex(0.0, 0.0)) out += c(alpha) * phi.image(alpha);
  }
  return out;
}

inline double max_abs_diff(const OcpMap& a, const OcpMap& b) {
  if (!(a.domain == b.domain) || a.k != b.k) throw Error(ErrorKind::ShapeMismatch, "maps differ in shape");
  double r = 0.0;
  for (int alpha = 0; alpha < a.domain.dim(); ++alpha) r = std::max(r, max_abs_diff(a.image(alpha), b.image(alpha)));
  return r;
}

inline OcpMap scaled(const OcpMap& phi, double s) {
  OcpMap out = phi;
  for (CMatrix& m : out.basis_images) m *= s;
  return out;
}

inline OcpMap sum(const OcpMap& a, const OcpMap& b) {
  if (!(a.domain == b.domain) || a.k != b.k) throw Error(ErrorKind::ShapeMismatch, "maps differ in shape");
  OcpMap out = a;
  for (std::size_t i = 0; i < out.basis_images.size(); ++i) out.basis_images[i] += b.basis_images[i];
  return out;
}

// outer ∘ inner, where outer is defined on M_{inner.k}.
inline OcpMap compose(const OcpMap& outer, const OcpMap& inner) {
  if (!(outer.domain == FdCStarAlgebra({inner.k}))) {
    throw Error(ErrorKind::ShapeMismatch, "outer map must be defined on M_k of the inner map");
  }
  std::vector<CMatrix> images;
  for (const CMatrix& m : inner.basis_images) {
    images.push_back(apply(outer, AlgebraElement(outer.domain, {m})));
  }
  return OcpMap(inner.domain, outer.k, std::move(images));
}

// Output block (i,j) is φ(a_ij); the result is nk × nk.
inline CMatrix ampliation_apply(const OcpMap& phi, int n, const std::vector<std::vector<AlgebraElement>>& grid) {
  if (n < 1 || static_cast<int>(grid.size()) != n) throw Error(ErrorKind::ShapeMismatch, "grid must be n×n");
  CMatrix out(n * phi.k, n * phi.k);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(grid[static_cast<std::size_t>(i)].size()) != n) {
      throw Error(ErrorKind::ShapeMismatch, "grid must be n×n");
    }
    for (int j = 0; j < n; ++j) {
      out.block(i * phi.k, j * phi.k, phi.k, phi.k) =
          apply(phi, grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

// C_j = Σ_{b,d} E_bd ⊗ φ(E^{(j)}_bd), of size n_j·k; index (b,s) with b major.
inline std::vector<CMatrix> choi_blocks(const OcpMap& phi) {
  std::vector<CMatrix> out;
  for (int j = 0; j < phi.domain.num_blocks(); ++j) {
    const int n = phi.domain.block_size(j);
    CMatrix c(n * phi.k, n * phi.k);
    for (int b = 0; b < n; ++b) {
      for (int d = 0; d < n; ++d) c.block(b * phi.k, d * phi.k, phi.k, phi.k) = phi.image(phi.domain.index(j, b, d));
    }
    out.push_back(std::move(c));
  }
  return out;
}

inline double self_adjoint_residual(const OcpMap& phi) {
  double r = 0.0;
  for (int alpha = 0; alpha < phi.domain.dim(); ++alpha) {
    const auto u = phi.domain.unit(alpha);
    const int star = phi.domain.index(u.block, u.col, u.row);
    r = std::max(r, max_abs_diff(phi.image(star), phi.image(alpha).adjoint()));
  }
  return r;
}

struct CpReport {
  bool completely_positive = false;
  bool self_adjoint = false;
  double self_adjoint_residual = 0.0;
  std::vector<double> min_eigenvalues;  // one per Choi block

  explicit operator bool() const { return completely_positive; }
  double min_eigenvalue() const {
    double m = std::numeric_limits<double>::infinity();
    for (double v : min_eigenvalues) m = std::min(m, v);
    return m;
  }
};

inline CpReport is_completely_positive(const OcpMap& phi, const Tolerance& tol = {}) {
  CpReport r;
  r.self_adjoint_residual = self_adjoint_residual(phi);
  double scale = 1.0;
  for (const CMatrix& m : phi.basis_images) scale = std::max(scale, max_abs(m));
  r.self_adjoint = r.self_adjoint_residual <= tol.eps_eq * scale;
  bool psd = true;
  for (const CMatrix& c : choi_blocks(phi)) {
    const CMatrix sym = (c + c.adjoint()) * 0.5;
    const RankReport rr = rank_from_spectrum(hermitian_eig(sym, tol).eigenvalues, tol);
    r.min_eigenvalues.push_back(rr.min_eigenvalue);
    psd = psd && rr.is_psd;
  }
  r.completely_positive = r.self_adjoint && psd;
  return r;
}

inline double unital_residual(const OcpMap& phi) {
  return max_abs_diff(apply(phi, AlgebraElement::unit(phi.domain)), identity(phi.k));
}

inline bool is_unital(const OcpMap& phi, const Tolerance& tol = {}) { return unital_residual(phi) <= tol.eps_eq; }

// A ↦ tr(A)·1_p / m on M_m.
inline OcpMap tracial_map(int m, int p) {
  if (m < 1 || p < 1) throw Error(ErrorKind::InvalidArgument, "tracial map needs m, p ≥ 1");
  const FdCStarAlgebra a({m});
  std::vector<CMatrix> images;
  for (int alpha = 0; alpha < a.dim(); ++alpha) {
    const auto u = a.unit(alpha);
    images.push_back(u.row == u.col ? CMatrix(identity(p) / static_cast<double>(m)) : CMatrix(CMatrix::Zero(p, p)));
  }
  return OcpMap(a, p, std::move(images));
}

// Ad_T: M_n → B(ℂ^rows(T)), A ↦ T A T*.
inline OcpMap ad_map(const CMatrix& t, int n) {
  if (t.cols() != n) throw Error(ErrorKind::ShapeMismatch, "Ad_T needs cols(T) = n");
  const FdCStarAlgebra a({n});
  std::vector<CMatrix> images;
  for (int alpha = 0; alpha < a.dim(); ++alpha) {
    const auto u = a.unit(alpha);
    images.push_back(t.col(u.row) * t.col(u.col).adjoint());
  }
  return OcpMap(a, static_cast<int>(t.rows()), std::move(images));
}

// φ ∘ f for a *-homomorphism f into the domain of φ.
inline OcpMap pullback(const OcpMap& phi, const StarHom& f, const Tolerance& tol = {}) {
  if (!(f.target == phi.domain)) throw Error(ErrorKind::ShapeMismatch, "hom target must equal the map's domain");
  const HomReport h = check_star_hom(f, tol);
  if (!h.ok()) throw Error(ErrorKind::InvalidHom, "not a unital *-homomorphism (residual " + std::to_string(h.max_residual()) + ")");
  std::vector<CMatrix> images;
  for (const AlgebraElement& e : f.basis_images) images.push_back(apply(phi, e));
  return OcpMap(f.source, phi.k, std::move(images));
}

struct MorphismCheck {
  bool ok = false;
  double residual = 0.0;
  explicit operator bool() const { return ok; }
};

namespace detail {

inline void require_morphism_shapes(const CMatrix& t, const OcpMap& phi, const OcpMap& psi) {
  if (!(phi.domain == psi.domain)) throw Error(ErrorKind::ShapeMismatch, "maps live on different algebras");
  if (t.rows() != psi.k || t.cols() != phi.k) throw Error(ErrorKind::ShapeMismatch, "T must be ψ.k × φ.k");
}

}  // namespace detail

// Tφ(a) = ψ(a)T on every matrix unit.
inline MorphismCheck is_ocp_morphism(const CMatrix& t, const OcpMap& phi, const OcpMap& psi, const Tolerance& tol = {}) {
  detail::require_morphism_shapes(t, phi, psi);
  MorphismCheck c;
  for (int alpha = 0; alpha < phi.domain.dim(); ++alpha) {
    c.residual = std::max(c.residual, max_abs(t * phi.image(alpha) - psi.image(alpha) * t));
  }
  c.ok = c.residual <= tol.eps_eq;
  return c;
}

struct MorphismVariants {
  bool diagram_23 = false;  // Ad_T ∘ φ = ψ
  bool diagram_22 = false;  // Tφ = ψT
  bool diagram_24 = false;  // Ad_{T*} ∘ ψ = φ
  double residual_23 = 0.0;
  double residual_22 = 0.0;
  double residual_24 = 0.0;
};

inline MorphismVariants check_morphism_variants(const CMatrix& t, const OcpMap& phi, const OcpMap& psi,
                                                const Tolerance& tol = {}) {
  detail::require_morphism_shapes(t, phi, psi);
  MorphismVariants v;
  for (int alpha = 0; alpha < phi.domain.dim(); ++alpha) {
    const CMatrix& p = phi.image(alpha);
    const CMatrix& q = psi.image(alpha);
    v.residual_23 = std::max(v.residual_23, max_abs(t * p * t.adjoint() - q));
    v.residual_22 = std::max(v.residual_22, max_abs(t * p - q * t));
    v.residual_24 = std::max(v.residual_24, max_abs(t.adjoint() * q * t - p));
  }
  v.diagram_23 = v.residual_23 <= tol.eps_eq;
  v.diagram_22 = v.residual_22 <= tol.eps_eq;
  v.diagram_24 = v.residual_24 <= tol.eps_eq;
  return v;
}

struct OpStateDecomposition {
  CMatrix U;                    // unitary K → L_1 in the basis basis_l1
  OcpMap psi1;                  // ψ compressed to L_1
  std::optional<OcpMap> psi2;   // ψ compressed to L_1^⊥ (absent when T is unitary)
  CMatrix basis_l1;             // L.k × K.k, orthonormal columns spanning T(K)
  CMatrix basis_l2;             // orthonormal complement
  double conjugation_residual = 0.0;   // max ‖Uφ(a)U* − ψ1(a)‖
  double off_diagonal_residual = 0.0;  // max ‖B2* ψ(a) B1‖, ‖B1* ψ(a) B2‖
};

// Splits ψ = ψ1 ⊕ ψ2 along T(K) ⊕ T(K)^⊥ for an isometric morphism T: φ → ψ
// of operator states.
inline OpStateDecomposition decompose_opstate_morphism(const CMatrix& t, const OcpMap& phi, const OcpMap& psi,
                                                       const Tolerance& tol = {}) {
  detail::require_morphism_shapes(t, phi, psi);
  if (isometry_residual(t) > tol.eps_eq) throw Error(ErrorKind::NotIsometry, "T is not an isometry");
  const MorphismCheck m = is_ocp_morphism(t, phi, psi, tol);
  if (!m) throw Error(ErrorKind::NotMorphism, "T is not a morphism (residual " + std::to_string(m.residual) + ")");

  OpStateDecomposition d;
  d.basis_l1 = svd(t).U.leftCols(phi.k);
  d.basis_l2 = orthonormal_complement(d.basis_l1, psi.k);
  d.U = d.basis_l1.adjoint() * t;
  std::vector<CMatrix> first, second;
  for (int alpha = 0; alpha < phi.domain.dim(); ++alpha) {
    const CMatrix& q = psi.image(alpha);
    first.push_back(d.basis_l1.adjoint() * q * d.basis_l1);
    if (d.basis_l2.cols() > 0) {
      second.push_back(d.basis_l2.adjoint() * q * d.basis_l2);
      d.off_diagonal_residual = std::max({d.off_diagonal_residual, max_abs(d.basis_l2.adjoint() * q * d.basis_l1),
                                          max_abs(d.basis_l1.adjoint() * q * d.basis_l2)});
    }
    d.conjugation_residual =
        std::max(d.conjugation_residual, max_abs(d.U * phi.image(alpha) * d.U.adjoint() - first.back()));
  }
  d.psi1 = OcpMap(phi.domain, phi.k, std::move(first));
  if (d.basis_l2.cols() > 0) d.psi2 = OcpMap(phi.domain, static_cast<int>(d.basis_l2.cols()), std::move(second));
  return d;
}

struct OcpMorphism {
  OcpMap source;
  OcpMap target;
  CMatrix T;
};

inline OcpMorphism identity_morphism(const OcpMap& phi) { return {phi, phi, identity(phi.k)}; }

// g ∘ f
inline OcpMorphism compose(const OcpMorphism& g, const OcpMorphism& f) {
  if (g.T.cols() != f.T.rows()) throw Error(ErrorKind::ShapeMismatch, "morphisms are not composable");
  return {f.source, g.target, g.T * f.T};
}

inline OcpMorphism dagger_morphism(const OcpMorphism& m, const Tolerance& tol = {}) {
  const MorphismCheck c = is_ocp_morphism(m.T, m.source, m.target, tol);
  if (!c) throw Error(ErrorKind::NotMorphism, "input is not a morphism (residual " + std::to_string(c.residual) + ")");
  return {m.target, m.source, m.T.adjoint()};
}

}  // namespace dilatory
