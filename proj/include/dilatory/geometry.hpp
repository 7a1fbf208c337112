#pragma once

// Partial isometries and their extension orders, normal forms of
// representations of ⊕_j M_{n_j}, connecting morphisms between dilations of
// the same map, and the purification solver built from them.

#include "dilatory/dilation.hpp"

#include <string>
#include <vector>

namespace dilatory {

struct PartialIsometryReport {
  bool is_partial_isometry = false;
  bool restricted_isometry = false;  // σ within eps_eq of 1 on the initial space
  CMatrix initial_space_basis;       // cols(L) × r
  CMatrix final_space_basis;         // rows(L) × r
  double residual = 0.0;             // ‖LL*L − L‖_max
  double singular_value_defect = 0.0;
};

inline PartialIsometryReport partial_isometry_report(const CMatrix& l, const Tolerance& tol = {}) {
  PartialIsometryReport r;
  r.residual = max_abs(l * l.adjoint() * l - l);
  r.is_partial_isometry = r.residual <= tol.eps_eq;
  const SvdResult s = svd(l);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.singular_values.size(); ++i) {
    if (s.singular_values(i) > tol.eps_rank) {
      ++rank;
      r.singular_value_defect = std::max(r.singular_value_defect, std::abs(s.singular_values(i) - 1.0));
    }
  }
  r.initial_space_basis = s.V.leftCols(rank);
  r.final_space_basis = s.U.leftCols(rank);
  r.restricted_isometry = r.singular_value_defect <= tol.eps_eq;
  return r;
}

inline void require_partial_isometry(const CMatrix& l, const Tolerance& tol, const char* what) {
  const auto r = partial_isometry_report(l, tol);
  if (!r.is_partial_isometry) {
    throw Error(ErrorKind::NotPartialIsometry, std::string(what) + " is not a partial isometry (residual " +
                                                   std::to_string(r.residual) + ")");
  }
}

// L ≦ M: M agrees with L on L's initial space.
inline bool is_extension(const CMatrix& l, const CMatrix& m, const Tolerance& tol = {}) {
  if (l.rows() != m.rows() || l.cols() != m.cols()) throw Error(ErrorKind::ShapeMismatch, "operators differ in shape");
  require_partial_isometry(l, tol, "L");
  require_partial_isometry(m, tol, "M");
  const CMatrix init = partial_isometry_report(l, tol).initial_space_basis;
  return max_abs((m - l) * init) <= tol.eps_eq;
}

inline double intertwining_residual(const CMatrix& m, const std::vector<CMatrix>& pi, const std::vector<CMatrix>& rho) {
  if (pi.size() != rho.size()) throw Error(ErrorKind::ShapeMismatch, "representations of different algebras");
  double r = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) r = std::max(r, max_abs(m * pi[i] - rho[i] * m));
  return r;
}

// L ⊴ M: L ≦ M and M intertwines π and ρ.
inline bool is_intertwining_extension(const CMatrix& l, const CMatrix& m, const std::vector<CMatrix>& pi,
                                      const std::vector<CMatrix>& rho, const Tolerance& tol = {}) {
  if (!is_extension(l, m, tol)) throw Error(ErrorKind::NotExtension, "M does not extend L");
  return intertwining_residual(m, pi, rho) <= tol.eps_eq;
}

// Unitary (square), isometry (tall) or co-isometry (wide) agreeing with L on
// its initial space. Complements of the initial and final spaces are built in
// canonical order and paired column by column.
inline CMatrix extend_partial_isometry(const CMatrix& l, const Tolerance& tol = {}) {
  require_partial_isometry(l, tol, "L");
  const auto rep = partial_isometry_report(l, tol);
  const CMatrix dom_c = orthonormal_complement(rep.initial_space_basis, l.cols());
  const CMatrix cod_c = orthonormal_complement(rep.final_space_basis, l.rows());
  const Eigen::Index add = std::min(dom_c.cols(), cod_c.cols());
  CMatrix u = l;
  if (add > 0) u += cod_c.leftCols(add) * dom_c.leftCols(add).adjoint();
  return u;
}

// P = (1/n)·Σ_i O[(i,·),(i,·)] for O of size (n·r) × (n·c); checks O = 1_n ⊗ P.
inline CMatrix tensor_factor_extract(const CMatrix& o, int n, const Tolerance& tol = {}) {
  if (n < 1 || o.rows() % n != 0 || o.cols() % n != 0) throw Error(ErrorKind::ShapeMismatch, "O is not n-divisible");
  const Eigen::Index r = o.rows() / n;
  const Eigen::Index c = o.cols() / n;
  CMatrix p = CMatrix::Zero(r, c);
  for (int i = 0; i < n; ++i) p += o.block(i * r, i * c, r, c);
  p /= static_cast<double>(n);
  const double residual = max_abs(o - kron(identity(n), p));
  if (residual > 10.0 * tol.eps_eq) {
    throw Error(ErrorKind::NotTensorForm, "reconstruction residual " + std::to_string(residual));
  }
  return p;
}

struct MatrixNormalForm {
  int multiplicity = 0;  // p
  CMatrix R;             // (n·p) × h unitary with R π(E_ij) R* = E_ij ⊗ 1_p
  double residual = 0.0;
};

// Normal form of a unital representation of M_n given by its unit images.
inline MatrixNormalForm normal_form_matrix_rep(const std::vector<CMatrix>& pi, int n, const Tolerance& tol = {}) {
  if (n < 1 || static_cast<int>(pi.size()) != n * n) throw Error(ErrorKind::ShapeMismatch, "need n² unit images");
  const Eigen::Index h = pi.front().rows();
  const FdCStarAlgebra a({n});
  std::vector<AlgebraElement> images;
  for (const CMatrix& m : pi) {
    if (m.rows() != h || m.cols() != h) throw Error(ErrorKind::ShapeMismatch, "images must be square of equal size");
    images.emplace_back(FdCStarAlgebra({static_cast<int>(h)}), std::vector<CMatrix>{m});
  }
  const HomReport hr = check_star_hom(StarHom(a, FdCStarAlgebra({static_cast<int>(h)}), std::move(images)), tol);
  if (!hr.ok()) throw Error(ErrorKind::NotRepresentation, "not a unital *-representation of M_n");
  if (h % n != 0) throw Error(ErrorKind::NonIntegralMultiplicity, "dimension is not a multiple of n");

  MatrixNormalForm nf;
  nf.multiplicity = static_cast<int>(h / n);
  const int p = nf.multiplicity;
  // π(E_11) is a projection of rank p; its eigenvectors for eigenvalue 1 span its range.
  const EigenDecomposition e = hermitian_eig(pi[0], Tolerance{tol.eps_rank, std::max(tol.eps_eq, 1e-9)});
  const CMatrix w = e.eigenvectors.leftCols(p);
  CMatrix r_star(h, n * p);
  for (int i = 0; i < n; ++i) r_star.middleCols(i * p, p) = pi[static_cast<std::size_t>(a.index(0, i, 0))] * w;
  nf.R = r_star.adjoint();
  for (int alpha = 0; alpha < a.dim(); ++alpha) {
    const auto u = a.unit(alpha);
    CMatrix unit = CMatrix::Zero(n, n);
    unit(u.row, u.col) = 1.0;
    nf.residual = std::max(nf.residual, max_abs(nf.R * pi[static_cast<std::size_t>(alpha)] * r_star - kron(unit, identity(p))));
  }
  nf.residual = std::max(nf.residual, isometry_residual(r_star));
  return nf;
}

struct GeneralNormalForm {
  std::vector<int> multiplicities;  // c_j ≥ 0
  CMatrix R;                        // (Σ n_j c_j) × h unitary
  double residual = 0.0;
};

// R π(a) R* = ⊞_j (a_j ⊗ 1_{c_j}) for a unital representation of ⊕_j M_{n_j}.
inline GeneralNormalForm normal_form_general_rep(const std::vector<CMatrix>& pi, const FdCStarAlgebra& a,
                                                 const Tolerance& tol = {}) {
  if (static_cast<int>(pi.size()) != a.dim()) throw Error(ErrorKind::ShapeMismatch, "one image per matrix unit");
  const Eigen::Index h = pi.front().rows();
  std::vector<AlgebraElement> images;
  for (const CMatrix& m : pi) images.emplace_back(FdCStarAlgebra({static_cast<int>(h)}), std::vector<CMatrix>{m});
  const HomReport hr = check_star_hom(StarHom(a, FdCStarAlgebra({static_cast<int>(h)}), std::move(images)), tol);
  if (!hr.ok()) throw Error(ErrorKind::NotRepresentation, "not a unital *-representation");

  GeneralNormalForm nf;
  CMatrix r_star(h, 0);
  for (int j = 0; j < a.num_blocks(); ++j) {
    const int n = a.block_size(j);
    CMatrix central = CMatrix::Zero(h, h);
    for (int i = 0; i < n; ++i) central += pi[static_cast<std::size_t>(a.index(j, i, i))];
    const CMatrix basis = range_basis(central, Tolerance{0.5, tol.eps_eq});
    const Eigen::Index rank = basis.cols();
    if (rank % n != 0) throw Error(ErrorKind::NonIntegralMultiplicity, "central projection rank not a multiple of n_j");
    nf.multiplicities.push_back(static_cast<int>(rank / n));
    if (rank == 0) continue;
    std::vector<CMatrix> local;
    for (int alpha = a.basis_offset(j); alpha < a.basis_offset(j) + n * n; ++alpha) {
      local.push_back(basis.adjoint() * pi[static_cast<std::size_t>(alpha)] * basis);
    }
    const MatrixNormalForm block_nf = normal_form_matrix_rep(local, n, tol);
    CMatrix grown(h, r_star.cols() + rank);
    grown << r_star, basis * block_nf.R.adjoint();
    r_star = grown;
  }
  if (r_star.cols() != h) throw Error(ErrorKind::NotRepresentation, "central projections do not sum to the identity");
  nf.R = r_star.adjoint();
  const auto target = amplified_images(a, nf.multiplicities);
  for (int alpha = 0; alpha < a.dim(); ++alpha) {
    nf.residual = std::max(nf.residual, max_abs(nf.R * pi[static_cast<std::size_t>(alpha)] * r_star - target[static_cast<std::size_t>(alpha)]));
  }
  nf.residual = std::max(nf.residual, isometry_residual(r_star));
  return nf;
}

inline void require_same_restriction(const AnchoredRep& rep1, const AnchoredRep& rep2, const Tolerance& tol) {
  if (!(rep1.algebra == rep2.algebra) || rep1.k != rep2.k) {
    throw Error(ErrorKind::RestrictionMismatch, "representations have different algebras or anchors");
  }
  const double mismatch = max_abs_diff(restrict(rep1), restrict(rep2));
  if (mismatch > tol.eps_eq) {
    throw Error(ErrorKind::RestrictionMismatch, "restrictions differ by " + std::to_string(mismatch));
  }
}

struct ConnectingMorphism {
  RepMorphism morphism;  // (id_K, m_{ρ,W} m_{π,V}*)
  CMatrix m_source;      // m_{π,V}
  CMatrix m_target;      // m_{ρ,W}
  DilationCertificate certificate;
};

inline ConnectingMorphism connecting_morphism(const AnchoredRep& rep1, const AnchoredRep& rep2, const Tolerance& tol = {}) {
  require_valid_rep(rep1, tol);
  require_valid_rep(rep2, tol);
  require_same_restriction(rep1, rep2, tol);
  ConnectingMorphism c{{}, {}, {}, stinespring_dilate(restrict(rep1), tol)};
  c.m_source = mediating_morphism(rep1, c.certificate).L;
  c.m_target = mediating_morphism(rep2, c.certificate).L;
  c.morphism = {identity(rep1.k), c.m_target * c.m_source.adjoint()};
  return c;
}

struct PurificationResult {
  CMatrix U;
  std::vector<int> source_multiplicities;
  std::vector<int> target_multiplicities;
  CMatrix connecting;  // L from connecting_morphism
  double unitarity_residual = 0.0;     // max(‖U*U − I‖, ‖UU* − I‖)
  double isometry_residual = 0.0;      // ‖U*U − I‖
  double coisometry_residual = 0.0;    // ‖UU* − I‖
  double anchor_residual = 0.0;        // ‖UV − W‖
  double intertwining_residual = 0.0;  // max_a ‖Uπ(a) − ρ(a)U‖
  std::string label;                   // unitary, isometry, co-isometry, mixed
  bool verified = false;
};

namespace detail {

inline std::string classify(double iso, double coiso, double bound) {
  const bool i = iso <= bound;
  const bool c = coiso <= bound;
  if (i && c) return "unitary";
  if (i) return "isometry";
  if (c) return "co-isometry";
  return "mixed";
}

inline PurificationResult purify_impl(const AnchoredRep& rep1, const AnchoredRep& rep2, const Tolerance& tol,
                                      bool require_equivalent) {
  require_valid_rep(rep1, tol);
  require_valid_rep(rep2, tol);
  require_same_restriction(rep1, rep2, tol);
  const FdCStarAlgebra& a = rep1.algebra;
  const GeneralNormalForm r_nf = normal_form_general_rep(rep1.pi_images, a, tol);
  const GeneralNormalForm s_nf = normal_form_general_rep(rep2.pi_images, a, tol);
  if (require_equivalent && r_nf.multiplicities != s_nf.multiplicities) {
    throw Error(ErrorKind::NotEquivalent, "representations have different multiplicities");
  }
  const ConnectingMorphism conn = connecting_morphism(rep1, rep2, tol);
  const CMatrix o = s_nf.R * conn.morphism.L * r_nf.R.adjoint();

  std::vector<CMatrix> blocks;
  Eigen::Index row = 0, col = 0;
  for (int j = 0; j < a.num_blocks(); ++j) {
    const int n = a.block_size(j);
    const int c = r_nf.multiplicities[static_cast<std::size_t>(j)];
    const int d = s_nf.multiplicities[static_cast<std::size_t>(j)];
    CMatrix m_j = CMatrix::Zero(d, c);
    if (c > 0 && d > 0) {
      const CMatrix p_j = tensor_factor_extract(o.block(row, col, n * d, n * c), n, tol);
      m_j = extend_partial_isometry(p_j, Tolerance{tol.eps_rank, 10.0 * tol.eps_eq});
    }
    blocks.push_back(kron(identity(n), m_j));
    row += n * d;
    col += n * c;
  }
  // Off-diagonal blocks of O must vanish.
  const CMatrix structured = direct_sum(blocks);
  CMatrix p_part = CMatrix::Zero(o.rows(), o.cols());
  {
    Eigen::Index r0 = 0, c0 = 0;
    for (int j = 0; j < a.num_blocks(); ++j) {
      const int n = a.block_size(j);
      const Eigen::Index rr = n * s_nf.multiplicities[static_cast<std::size_t>(j)];
      const Eigen::Index cc = n * r_nf.multiplicities[static_cast<std::size_t>(j)];
      p_part.block(r0, c0, rr, cc) = o.block(r0, c0, rr, cc);
      r0 += rr;
      c0 += cc;
    }
  }
  if (max_abs(o - p_part) > 10.0 * tol.eps_eq) {
    throw Error(ErrorKind::NotTensorForm, "connecting morphism mixes central blocks");
  }

  PurificationResult res;
  res.source_multiplicities = r_nf.multiplicities;
  res.target_multiplicities = s_nf.multiplicities;
  res.connecting = conn.morphism.L;
  res.U = s_nf.R.adjoint() * structured * r_nf.R;
  res.isometry_residual = isometry_residual(res.U);
  res.coisometry_residual = coisometry_residual(res.U);
  res.unitarity_residual = std::max(res.isometry_residual, res.coisometry_residual);
  res.anchor_residual = max_abs(res.U * rep1.V - rep2.V);
  res.intertwining_residual = intertwining_residual(res.U, rep1.pi_images, rep2.pi_images);
  const double bound = 10.0 * tol.eps_eq;
  res.label = classify(res.isometry_residual, res.coisometry_residual, bound);
  res.verified = res.anchor_residual <= bound && res.intertwining_residual <= bound &&
                 (!require_equivalent || res.unitarity_residual <= bound);
  return res;
}

}  // namespace detail

// Unitary intertwiner U with UV = W between dilations of the same map whose
// representations are unitarily equivalent.
inline PurificationResult purify_unitary(const AnchoredRep& rep1, const AnchoredRep& rep2, const Tolerance& tol = {}) {
  return detail::purify_impl(rep1, rep2, tol, true);
}

// Blockwise isometric/co-isometric extension when the multiplicities differ.
inline PurificationResult purify_partial(const AnchoredRep& rep1, const AnchoredRep& rep2, const Tolerance& tol = {}) {
  return detail::purify_impl(rep1, rep2, tol, false);
}

// Rank an intertwiner between the two representations can reach at most.
inline Eigen::Index maximal_intertwiner_rank(const FdCStarAlgebra& a, const std::vector<int>& c, const std::vector<int>& d) {
  Eigen::Index r = 0;
  for (int j = 0; j < a.num_blocks(); ++j) {
    r += static_cast<Eigen::Index>(a.block_size(j)) * std::min(c[static_cast<std::size_t>(j)], d[static_cast<std::size_t>(j)]);
  }
  return r;
}

}  // namespace dilatory
