#pragma once

// Anchored representations (K, H, π, V), their morphisms (T, L), and the
// minimal Stinespring construction on the algebraic tensor product A ⊗ K.
//
// Coordinates on A ⊗ K use the basis b_α ⊗ e_s with α (matrix-unit index)
// major and s minor, so D = dim(A)·k. The Gram matrix of the form
// ⟨⟨b_α⊗e_s, b_β⊗e_t⟩⟩ = ⟨e_s, φ(b_α* b_β) e_t⟩ factors as G = Q*Q with
// Q = Λ₊^{1/2}U₊*; Q maps a coefficient vector ξ to the class [ξ] ∈ H_φ and
// Q⁺ = U₊Λ₊^{-1/2} is a right inverse.

#include "dilatory/cpmap.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dilatory {

struct AnchoredRep {
  FdCStarAlgebra algebra;
  int k = 1;
  int h = 1;
  std::vector<CMatrix> pi_images;  // h×h per matrix unit
  CMatrix V;                       // h × k

  AnchoredRep() = default;

  AnchoredRep(FdCStarAlgebra a, std::vector<CMatrix> images, CMatrix v)
      : algebra(std::move(a)), pi_images(std::move(images)), V(std::move(v)) {
    k = static_cast<int>(V.cols());
    h = static_cast<int>(V.rows());
    if (k < 1 || h < 1) throw Error(ErrorKind::InvalidArgument, "anchored representation needs k, h ≥ 1");
    if (static_cast<int>(pi_images.size()) != algebra.dim()) {
      throw Error(ErrorKind::ShapeMismatch, "one representation image per matrix unit is required");
    }
    for (const CMatrix& m : pi_images) {
      if (m.rows() != h || m.cols() != h) throw Error(ErrorKind::ShapeMismatch, "representation image must be h×h");
    }
  }

  const CMatrix& pi(int alpha) const { return pi_images.at(static_cast<std::size_t>(alpha)); }

  CMatrix pi(const AlgebraElement& a) const {
    if (!(a.algebra == algebra)) throw Error(ErrorKind::ShapeMismatch, "element outside the represented algebra");
    const CVector c = a.coords();
    CMatrix out = CMatrix::Zero(h, h);
    for (int alpha = 0; alpha < algebra.dim(); ++alpha) {
      if (c(alpha) != Complex(0.0, 0.0)) out += c(alpha) * pi(alpha);
    }
    return out;
  }
};

// π viewed as a *-homomorphism A → M_h.
inline StarHom rep_hom(const AnchoredRep& rep) {
  const FdCStarAlgebra target({rep.h});
  std::vector<AlgebraElement> images;
  for (const CMatrix& m : rep.pi_images) images.emplace_back(target, std::vector<CMatrix>{m});
  return StarHom(rep.algebra, target, std::move(images));
}

inline HomReport check_rep(const AnchoredRep& rep, const Tolerance& tol = {}) { return check_star_hom(rep_hom(rep), tol); }

inline void require_valid_rep(const AnchoredRep& rep, const Tolerance& tol) {
  const HomReport r = check_rep(rep, tol);
  if (!r.ok()) {
    throw Error(ErrorKind::NotRepresentation,
                "π is not a unital *-representation (residual " + std::to_string(r.max_residual()) + ")");
  }
}

inline bool is_preserving(const AnchoredRep& rep, const Tolerance& tol = {}) {
  return isometry_residual(rep.V) <= tol.eps_eq;
}

// (K, Ad_{V*} ∘ π)
inline OcpMap restrict(const AnchoredRep& rep) {
  std::vector<CMatrix> images;
  for (const CMatrix& p : rep.pi_images) images.push_back(rep.V.adjoint() * p * rep.V);
  return OcpMap(rep.algebra, rep.k, std::move(images));
}

// (K, H, π ∘ f, V)
inline AnchoredRep pullback_rep(const AnchoredRep& rep, const StarHom& f, const Tolerance& tol = {}) {
  if (!(f.target == rep.algebra)) throw Error(ErrorKind::ShapeMismatch, "hom target must equal the represented algebra");
  const HomReport hr = check_star_hom(f, tol);
  if (!hr.ok()) throw Error(ErrorKind::InvalidHom, "not a unital *-homomorphism");
  std::vector<CMatrix> images;
  for (const AlgebraElement& e : f.basis_images) images.push_back(rep.pi(e));
  return AnchoredRep(f.source, std::move(images), rep.V);
}

// (K, XπX*, XV) for a unitary (or any square) X.
inline AnchoredRep conjugate(const AnchoredRep& rep, const CMatrix& x) {
  std::vector<CMatrix> images;
  for (const CMatrix& p : rep.pi_images) images.push_back(x * p * x.adjoint());
  return AnchoredRep(rep.algebra, std::move(images), x * rep.V);
}

// (K, H ⊕ H', π ⊕ π', V ⊕ 0); when `junk_first` the junk summand comes first.
inline AnchoredRep inflate(const AnchoredRep& rep, const std::vector<CMatrix>& junk_images, bool junk_first = false) {
  if (junk_images.size() != rep.pi_images.size()) throw Error(ErrorKind::ShapeMismatch, "junk rep has wrong size");
  const Eigen::Index extra = junk_images.empty() ? 0 : junk_images.front().rows();
  std::vector<CMatrix> images;
  for (std::size_t i = 0; i < junk_images.size(); ++i) {
    images.push_back(junk_first ? direct_sum(junk_images[i], rep.pi_images[i]) : direct_sum(rep.pi_images[i], junk_images[i]));
  }
  CMatrix v = CMatrix::Zero(rep.h + extra, rep.k);
  v.block(junk_first ? extra : 0, 0, rep.h, rep.k) = rep.V;
  return AnchoredRep(rep.algebra, std::move(images), v);
}

struct RepMorphism {
  CMatrix T;  // k' × k
  CMatrix L;  // h' × h
};

inline RepMorphism identity_morphism(const AnchoredRep& rep) { return {identity(rep.k), identity(rep.h)}; }

inline RepMorphism compose(const RepMorphism& g, const RepMorphism& f) { return {g.T * f.T, g.L * f.L}; }

inline RepMorphism adjoint(const RepMorphism& m) { return {m.T.adjoint(), m.L.adjoint()}; }

struct RepMorphismCheck {
  bool ok = false;
  bool intertwines = false;
  bool square_v = false;
  bool square_vstar = false;
  double intertwine_residual = 0.0;    // max ‖Lπ(a) − ρ(a)L‖
  double square_v_residual = 0.0;      // ‖LV − WT‖
  double square_vstar_residual = 0.0;  // ‖TV* − W*L‖

  explicit operator bool() const { return ok; }
  double max_residual() const { return std::max({intertwine_residual, square_v_residual, square_vstar_residual}); }
};

inline RepMorphismCheck is_rep_morphism(const RepMorphism& m, const AnchoredRep& src, const AnchoredRep& dst,
                                        const Tolerance& tol = {}) {
  if (!(src.algebra == dst.algebra)) throw Error(ErrorKind::ShapeMismatch, "representations of different algebras");
  if (m.T.rows() != dst.k || m.T.cols() != src.k || m.L.rows() != dst.h || m.L.cols() != src.h) {
    throw Error(ErrorKind::ShapeMismatch, "morphism matrices have the wrong shape");
  }
  RepMorphismCheck c;
  for (int alpha = 0; alpha < src.algebra.dim(); ++alpha) {
    c.intertwine_residual = std::max(c.intertwine_residual, max_abs(m.L * src.pi(alpha) - dst.pi(alpha) * m.L));
  }
  c.square_v_residual = max_abs(m.L * src.V - dst.V * m.T);
  c.square_vstar_residual = max_abs(m.T * src.V.adjoint() - dst.V.adjoint() * m.L);
  c.intertwines = c.intertwine_residual <= tol.eps_eq;
  c.square_v = c.square_v_residual <= tol.eps_eq;
  c.square_vstar = c.square_vstar_residual <= tol.eps_eq;
  c.ok = c.intertwines && c.square_v && c.square_vstar;
  return c;
}

struct DilationResiduals {
  double factorization = 0.0;      // ‖Ad_{V*}∘π − φ‖ on the basis
  double well_definedness = 0.0;   // max_α ‖Q M_α (I − Q⁺Q)‖
  double multiplicativity = 0.0;   // check_rep residual of π_φ
  std::optional<double> isometry;  // ‖V*V − I‖ when φ is unital
};

struct DilationCertificate {
  OcpMap map;               // the dilated map φ
  AnchoredRep rep;          // (K, H_φ, π_φ, V_φ)
  CMatrix Q;                // d × D
  CMatrix Q_pinv;           // D × d
  RVector gram_eigenvalues; // all D eigenvalues, descending
  Tolerance tol;
  bool rank_instability = false;
  DilationResiduals residuals;

  int dim() const { return static_cast<int>(Q.rows()); }
};

// Coordinates of 1_A ⊗ e_s, as columns (D × k).
inline CMatrix unit_tensor_coords(const FdCStarAlgebra& a, int k) {
  return kron(AlgebraElement::unit(a).coords(), identity(k));
}

// Gram matrix of φ on A ⊗ ℂ^k without the CP gate.
inline CMatrix gram_matrix_unchecked(const OcpMap& phi) {
  const FdCStarAlgebra& a = phi.domain;
  const int k = phi.k;
  const int big = a.dim() * k;
  CMatrix g = CMatrix::Zero(big, big);
  // (E^{(j)}_{ab})* E^{(j)}_{cd} = δ_ac E^{(j)}_{bd}; distinct blocks multiply to zero.
  for (int alpha = 0; alpha < a.dim(); ++alpha) {
    const auto x = a.unit(alpha);
    for (int beta = 0; beta < a.dim(); ++beta) {
      const auto y = a.unit(beta);
      if (x.block != y.block || x.row != y.row) continue;
      g.block(alpha * k, beta * k, k, k) = phi.image(a.index(x.block, x.col, y.col));
    }
  }
  return g;
}

inline void require_cp(const OcpMap& phi, const Tolerance& tol) {
  const CpReport cp = is_completely_positive(phi, tol);
  if (!cp) {
    throw Error(ErrorKind::NotCompletelyPositive,
                "Choi min eigenvalue " + std::to_string(cp.min_eigenvalue()) + ", self-adjoint residual " +
                    std::to_string(cp.self_adjoint_residual));
  }
}

inline CMatrix gram_matrix(const OcpMap& phi, const Tolerance& tol = {}) {
  require_cp(phi, tol);
  return gram_matrix_unchecked(phi);
}

// Minimal Stinespring dilation. With `skip_cp_gate` the Gram is factored on
// its positive spectrum even when φ fails the CP test.
inline DilationCertificate stinespring_dilate(const OcpMap& phi, const Tolerance& tol = {}, bool skip_cp_gate = false) {
  if (!skip_cp_gate) require_cp(phi, tol);
  const FdCStarAlgebra& a = phi.domain;
  const int k = phi.k;
  const CMatrix g = gram_matrix_unchecked(phi);
  const EigenDecomposition eig = hermitian_eig(g, Tolerance{tol.eps_rank, std::max(tol.eps_eq, 1e-9)});
  const RankReport rr = rank_from_spectrum(eig.eigenvalues, tol);
  const Eigen::Index d = rr.rank;
  if (d == 0) throw Error(ErrorKind::InvalidArgument, "the zero map has a zero-dimensional dilation");

  DilationCertificate cert;
  cert.map = phi;
  cert.tol = tol;
  cert.gram_eigenvalues = eig.eigenvalues;
  const double lmax = eig.eigenvalues(0);
  const double cutoff = tol.eps_rank * lmax;
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
    const double lam = std::abs(eig.eigenvalues(i));
    if (lam > cutoff / 10.0 && lam < cutoff * 10.0) cert.rank_instability = true;
  }

  const CMatrix u_plus = eig.eigenvectors.leftCols(d);
  const RVector lam_plus = eig.eigenvalues.head(d);
  cert.Q = lam_plus.cwiseSqrt().asDiagonal() * u_plus.adjoint();
  cert.Q_pinv = u_plus * lam_plus.cwiseSqrt().cwiseInverse().asDiagonal();

  const CMatrix id_k = identity(k);
  const CMatrix leak = identity(a.dim() * k) - cert.Q_pinv * cert.Q;
  std::vector<CMatrix> pi_images;
  for (int alpha = 0; alpha < a.dim(); ++alpha) {
    const CMatrix m_a = kron(left_multiplication(AlgebraElement::matrix_unit(a, alpha)), id_k);
    const CMatrix qm = cert.Q * m_a;
    cert.residuals.well_definedness = std::max(cert.residuals.well_definedness, max_abs(qm * leak));
    pi_images.push_back(qm * cert.Q_pinv);
  }
  cert.rep = AnchoredRep(a, std::move(pi_images), cert.Q * unit_tensor_coords(a, k));
  cert.residuals.factorization = max_abs_diff(restrict(cert.rep), phi);
  cert.residuals.multiplicativity = check_rep(cert.rep, tol).max_residual();
  if (is_unital(phi, tol)) cert.residuals.isometry = isometry_residual(cert.rep.V);
  return cert;
}

// GNS construction of a positive functional ω (k = 1).
struct GnsResult {
  DilationCertificate certificate;
  CVector omega;  // Ω = V(1)
};

inline GnsResult gns(const OcpMap& omega, const Tolerance& tol = {}) {
  if (omega.k != 1) throw Error(ErrorKind::InvalidArgument, "GNS needs a functional (k = 1)");
  GnsResult r{stinespring_dilate(omega, tol), CVector()};
  r.omega = r.certificate.rep.V.col(0);
  return r;
}

// L_T: H_φ → H_ψ, [a ⊗ v] ↦ [a ⊗ Tv].
inline RepMorphism stine_on_morphism(const CMatrix& t, const DilationCertificate& phi_cert,
                                     const DilationCertificate& psi_cert, const Tolerance& tol = {}) {
  const MorphismCheck c = is_ocp_morphism(t, phi_cert.map, psi_cert.map, tol);
  if (!c) throw Error(ErrorKind::NotMorphism, "T is not a morphism of OCP maps (residual " + std::to_string(c.residual) + ")");
  const CMatrix lift = kron(identity(phi_cert.map.domain.dim()), t);
  return {t, psi_cert.Q * lift * phi_cert.Q_pinv};
}

inline RepMorphism stine_on_morphism(const CMatrix& t, const OcpMap& phi, const OcpMap& psi, const Tolerance& tol = {}) {
  const MorphismCheck c = is_ocp_morphism(t, phi, psi, tol);
  if (!c) throw Error(ErrorKind::NotMorphism, "T is not a morphism of OCP maps (residual " + std::to_string(c.residual) + ")");
  return stine_on_morphism(t, stinespring_dilate(phi, tol), stinespring_dilate(psi, tol), tol);
}

// L_f: H_{φ∘f} → H_φ, [a' ⊗ v] ↦ [f(a') ⊗ v]. `source_cert` must dilate φ∘f.
inline RepMorphism stine_f(const DilationCertificate& phi_cert, const StarHom& f, const DilationCertificate& source_cert,
                           const Tolerance& tol = {}) {
  if (!(f.target == phi_cert.map.domain) || !(f.source == source_cert.map.domain)) {
    throw Error(ErrorKind::ShapeMismatch, "hom does not connect the two certificates");
  }
  const HomReport hr = check_star_hom(f, tol);
  if (!hr.ok()) throw Error(ErrorKind::InvalidHom, "not a unital *-homomorphism");
  const int k = phi_cert.map.k;
  const CMatrix lift = kron(f.coefficient_matrix(), identity(k));
  return {identity(k), phi_cert.Q * lift * source_cert.Q_pinv};
}

inline RepMorphism stine_f(const OcpMap& phi, const StarHom& f, const Tolerance& tol = {}) {
  const OcpMap pulled = pullback(phi, f, tol);
  require_cp(phi, tol);
  return stine_f(stinespring_dilate(phi, tol), f, stinespring_dilate(pulled, tol), tol);
}

// m_{π,V}: H_φ → H, [a ⊗ v] ↦ π(a)Vv, where φ = restrict(rep) is dilated by `cert`.
inline RepMorphism mediating_morphism(const AnchoredRep& rep, const DilationCertificate& cert) {
  const FdCStarAlgebra& a = rep.algebra;
  if (!(a == cert.map.domain) || rep.k != cert.map.k) throw Error(ErrorKind::ShapeMismatch, "certificate does not match rep");
  const int k = rep.k;
  CMatrix generators(rep.h, a.dim() * k);
  for (int alpha = 0; alpha < a.dim(); ++alpha) generators.middleCols(alpha * k, k) = rep.pi(alpha) * rep.V;
  return {identity(k), generators * cert.Q_pinv};
}

inline RepMorphism mediating_morphism(const AnchoredRep& rep, const Tolerance& tol = {}) {
  require_valid_rep(rep, tol);
  return mediating_morphism(rep, stinespring_dilate(restrict(rep), tol));
}

// The unique morphism (T, m_{ρ,W}·L_T) out of the canonical dilation of φ
// whose restriction is T.
inline RepMorphism universal_factorization(const CMatrix& t, const DilationCertificate& phi_cert, const AnchoredRep& target,
                                           const DilationCertificate& target_cert, const Tolerance& tol = {}) {
  const RepMorphism lt = stine_on_morphism(t, phi_cert, target_cert, tol);
  const RepMorphism m = mediating_morphism(target, target_cert);
  return {t, m.L * lt.L};
}

inline RepMorphism universal_factorization(const CMatrix& t, const OcpMap& phi, const AnchoredRep& target,
                                           const Tolerance& tol = {}) {
  require_valid_rep(target, tol);
  const OcpMap psi = restrict(target);
  const MorphismCheck c = is_ocp_morphism(t, phi, psi, tol);
  if (!c) throw Error(ErrorKind::NotMorphism, "T is not a morphism into restrict(target)");
  return universal_factorization(t, stinespring_dilate(phi, tol), target, stinespring_dilate(psi, tol), tol);
}

// Column span of {π(b_α) V e_s}.
inline CMatrix generated_columns(const AnchoredRep& rep) {
  CMatrix cols(rep.h, rep.algebra.dim() * rep.k);
  for (int alpha = 0; alpha < rep.algebra.dim(); ++alpha) cols.middleCols(alpha * rep.k, rep.k) = rep.pi(alpha) * rep.V;
  return cols;
}

inline bool is_minimal(const AnchoredRep& rep, const Tolerance& tol = {}) {
  return matrix_rank(generated_columns(rep), tol) == rep.h;
}

inline RepMorphism minimal_unitary(const AnchoredRep& rep, const DilationCertificate& cert, const Tolerance& tol = {}) {
  if (!is_minimal(rep, tol)) throw Error(ErrorKind::NotMinimal, "π(A)V(K) does not span H");
  const OcpMap psi = restrict(rep);
  const double mismatch = max_abs_diff(psi, cert.map);
  if (mismatch > tol.eps_eq) throw Error(ErrorKind::RestrictionMismatch, "rep does not restrict to the certificate's map");
  RepMorphism m = mediating_morphism(rep, cert);
  if (m.L.rows() != m.L.cols() || isometry_residual(m.L) > tol.eps_eq || coisometry_residual(m.L) > tol.eps_eq) {
    throw Error(ErrorKind::NotMinimal, "mediating morphism is not unitary");
  }
  return m;
}

inline RepMorphism minimal_unitary(const AnchoredRep& rep, const Tolerance& tol = {}) {
  require_valid_rep(rep, tol);
  if (!is_minimal(rep, tol)) throw Error(ErrorKind::NotMinimal, "π(A)V(K) does not span H");
  return minimal_unitary(rep, stinespring_dilate(restrict(rep), tol), tol);
}

// Least-squares L with L·π_src(b_α)V_src e_s = π_dst(b_α) V_dst T e_s. A
// morphism out of a minimal rep is determined by these values on the
// generated subspace, so this is an independent route to that morphism.
inline CMatrix fit_morphism_on_generators(const AnchoredRep& src, const AnchoredRep& dst, const CMatrix& t,
                                          const Tolerance& tol = {}) {
  const CMatrix x = generated_columns(src);
  CMatrix y(dst.h, src.algebra.dim() * src.k);
  for (int alpha = 0; alpha < src.algebra.dim(); ++alpha) y.middleCols(alpha * src.k, src.k) = dst.pi(alpha) * dst.V * t;
  const SvdResult s = svd(x);
  const Eigen::Index r = numerical_rank(s.singular_values, tol);
  // x⁺ = V_r Σ_r^{-1} U_r*
  const CMatrix x_pinv = s.V.leftCols(r) * s.singular_values.head(r).cwiseInverse().asDiagonal() * s.U.leftCols(r).adjoint();
  return y * x_pinv;
}

}  // namespace dilatory
