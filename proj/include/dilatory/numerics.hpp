#pragma once

// Dense complex linear-algebra kernel shared by every other header.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace dilatory {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

enum class ErrorKind {
  NotHermitian,
  ConvergenceFailure,
  ShapeMismatch,
  NotCompletelyPositive,
  NotIsometry,
  NotMorphism,
  InvalidHom,
  NotMinimal,
  NotPartialIsometry,
  NotExtension,
  NotTensorForm,
  NotRepresentation,
  NonIntegralMultiplicity,
  RestrictionMismatch,
  NotEquivalent,
  InvalidArgument,
  ParseError,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NotCompletelyPositive: return "NotCompletelyPositive";
    case ErrorKind::NotIsometry: return "NotIsometry";
    case ErrorKind::NotMorphism: return "NotMorphism";
    case ErrorKind::InvalidHom: return "InvalidHom";
    case ErrorKind::NotMinimal: return "NotMinimal";
    case ErrorKind::NotPartialIsometry: return "NotPartialIsometry";
    case ErrorKind::NotExtension: return "NotExtension";
    case ErrorKind::NotTensorForm: return "NotTensorForm";
    case ErrorKind::NotRepresentation: return "NotRepresentation";
    case ErrorKind::NonIntegralMultiplicity: return "NonIntegralMultiplicity";
    case ErrorKind::RestrictionMismatch: return "RestrictionMismatch";
    case ErrorKind::NotEquivalent: return "NotEquivalent";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// eps_rank is a relative spectral cutoff; eps_eq bounds equality residuals.
struct Tolerance {
  double eps_rank = 1e-9;
  double eps_eq = 1e-9;

  static Tolerance from(double tol) {
    if (!(tol > 0.0) || !std::isfinite(tol)) {
      throw Error(ErrorKind::InvalidArgument, "tolerance must be finite and positive");
    }
    return Tolerance{std::max(tol, std::numeric_limits<double>::epsilon()), tol};
  }

  // DILATORY_TOL overrides the built-in default of 1e-9.
  static Tolerance default_tolerance() {
    if (const char* env = std::getenv("DILATORY_TOL")) {
      char* end = nullptr;
      double value = std::strtod(env, &end);
      if (end != env && value > 0.0 && std::isfinite(value)) return from(value);
    }
    return Tolerance{};
  }
};

inline double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::ShapeMismatch, "matrices differ in shape");
  }
  return max_abs(a - b);
}

inline bool all_finite(const CMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

inline CMatrix identity(Eigen::Index n) { return CMatrix::Identity(n, n); }

namespace detail {

// Rotates a column so that its first largest-magnitude entry is real positive.
// Returns the conjugated phase that was applied.
inline Complex phase_fix_column(Eigen::Ref<CMatrix> column) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < column.rows(); ++i) {
    const double a = std::abs(column(i, 0));
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  if (best_abs <= 0.0) return Complex(1.0, 0.0);
  const Complex phase = std::conj(column(best, 0)) / best_abs;
  column *= phase;
  column(best, 0) = Complex(std::abs(column(best, 0)), 0.0);
  return phase;
}

}  // namespace detail

struct EigenDecomposition {
  RVector eigenvalues;   // descending
  CMatrix eigenvectors;  // orthonormal columns
};

inline double hermitian_residual(const CMatrix& m) { return max_abs(m - m.adjoint()); }

inline EigenDecomposition hermitian_eig(const CMatrix& m, const Tolerance& tol = {}) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::ShapeMismatch, "hermitian_eig needs a square matrix");
  const double residual = hermitian_residual(m);
  if (residual > tol.eps_eq * std::max(1.0, max_abs(m))) {
    throw Error(ErrorKind::NotHermitian, "symmetry residual " + std::to_string(residual));
  }
  const Eigen::Index n = m.rows();
  if (n == 0) return {RVector(0), CMatrix(0, 0)};

  const CMatrix sym = (m + m.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::ConvergenceFailure, "self-adjoint eigensolver did not converge");
  }
  const RVector& values = solver.eigenvalues();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values(a) > values(b); });

  EigenDecomposition out{RVector(n), CMatrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.eigenvalues(i) = values(order[static_cast<std::size_t>(i)]);
    out.eigenvectors.col(i) = solver.eigenvectors().col(order[static_cast<std::size_t>(i)]);
    detail::phase_fix_column(out.eigenvectors.col(i));
  }
  return out;
}

struct RankReport {
  Eigen::Index rank = 0;
  bool is_psd = true;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
};

inline RankReport rank_from_spectrum(const RVector& descending, const Tolerance& tol) {
  RankReport report;
  if (descending.size() == 0) return report;
  report.max_eigenvalue = descending(0);
  report.min_eigenvalue = descending(descending.size() - 1);
  if (report.max_eigenvalue > tol.eps_rank) {
    const double cutoff = tol.eps_rank * report.max_eigenvalue;
    for (Eigen::Index i = 0; i < descending.size(); ++i) {
      if (descending(i) > cutoff) ++report.rank;
    }
  }
  report.is_psd = report.min_eigenvalue >= -tol.eps_rank * std::max(report.max_eigenvalue, 1.0);
  return report;
}

inline RankReport rank_psd(const CMatrix& m, const Tolerance& tol = {}) {
  return rank_from_spectrum(hermitian_eig(m, tol).eigenvalues, tol);
}

// Left factor major: (a ⊗ b)[(i,α),(j,β)] = a[i,j]·b[α,β].
inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

struct SvdResult {
  CMatrix U;                 // rows × rows
  RVector singular_values;   // descending, length min(rows, cols)
  CMatrix V;                 // cols × cols
};

// Full SVD m = U·Σ·V*. Each right singular vector is phase fixed and the
// matching left vector rotated with it; unpaired columns are fixed alone.
inline SvdResult svd(const CMatrix& m) {
  SvdResult out;
  const Eigen::Index r = m.rows();
  const Eigen::Index c = m.cols();
  if (r == 0 || c == 0) {
    out.U = identity(r);
    out.V = identity(c);
    out.singular_values = RVector(0);
    return out;
  }
  Eigen::JacobiSVD<CMatrix> solver(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::ConvergenceFailure, "Jacobi SVD did not converge");
  }
  out.U = solver.matrixU();
  out.V = solver.matrixV();
  out.singular_values = solver.singularValues();
  const Eigen::Index p = std::min(r, c);
  for (Eigen::Index i = 0; i < p; ++i) {
    const Complex phase = detail::phase_fix_column(out.V.col(i));
    out.U.col(i) *= phase;
  }
  for (Eigen::Index i = p; i < r; ++i) detail::phase_fix_column(out.U.col(i));
  for (Eigen::Index i = p; i < c; ++i) detail::phase_fix_column(out.V.col(i));
  return out;
}

inline double op_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> solver(m);
  return solver.singularValues()(0);
}

// Number of singular values above eps_rank relative to the largest one
// (zero when the largest itself is below eps_rank).
inline Eigen::Index numerical_rank(const RVector& singular_values, const Tolerance& tol) {
  if (singular_values.size() == 0 || singular_values(0) <= tol.eps_rank) return 0;
  const double cutoff = tol.eps_rank * singular_values(0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < singular_values.size(); ++i) {
    if (singular_values(i) > cutoff) ++rank;
  }
  return rank;
}

inline Eigen::Index matrix_rank(const CMatrix& m, const Tolerance& tol = {}) {
  if (m.size() == 0) return 0;
  return numerical_rank(svd(m).singular_values, tol);
}

// Orthonormal basis of the column space, from phase-fixed left singular vectors.
inline CMatrix range_basis(const CMatrix& m, const Tolerance& tol = {}) {
  if (m.size() == 0) return CMatrix(m.rows(), 0);
  const SvdResult s = svd(m);
  return s.U.leftCols(numerical_rank(s.singular_values, tol));
}

// Completes orthonormal columns `basis` (dim × r) by Gram-Schmidt over the
// standard basis vectors e_0, e_1, ... in index order. Returns dim × (dim − r).
inline CMatrix orthonormal_complement(const CMatrix& basis, Eigen::Index dim) {
  std::vector<CVector> found;
  const Eigen::Index r = basis.cols();
  const Eigen::Index need = dim - r;
  CMatrix out(dim, std::max<Eigen::Index>(need, 0));
  if (need <= 0) return out;
  for (Eigen::Index i = 0; i < dim && static_cast<Eigen::Index>(found.size()) < need; ++i) {
    CVector v = CVector::Zero(dim);
    v(i) = 1.0;
    // Two passes of modified Gram-Schmidt keep the result orthonormal to
    // machine precision even for nearly dependent candidates.
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < r; ++j) v -= basis.col(j) * basis.col(j).dot(v);
      for (const CVector& f : found) v -= f * f.dot(v);
    }
    const double norm = v.norm();
    if (norm > 1e-6) found.push_back(v / norm);
  }
  if (static_cast<Eigen::Index>(found.size()) != need) {
    throw Error(ErrorKind::ConvergenceFailure, "orthonormal complement incomplete");
  }
  for (Eigen::Index j = 0; j < need; ++j) out.col(j) = found[static_cast<std::size_t>(j)];
  return out;
}

// Orthonormal basis of the (numerical) null space of m, as columns.
inline CMatrix null_space(const CMatrix& m, const Tolerance& tol = {}) {
  const Eigen::Index c = m.cols();
  if (m.rows() == 0) return identity(c);
  if (m.rows() > c) {
    // Tall inputs: the R factor has the same right singular vectors.
    Eigen::HouseholderQR<CMatrix> qr(m);
    const CMatrix r = qr.matrixQR().topRows(c).triangularView<Eigen::Upper>();
    return null_space(r, tol);
  }
  const SvdResult s = svd(m);
  const double scale = std::max(s.singular_values.size() ? s.singular_values(0) : 0.0, 1.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.singular_values.size(); ++i) {
    if (s.singular_values(i) > tol.eps_rank * scale) ++rank;
  }
  return s.V.rightCols(c - rank);
}

inline double isometry_residual(const CMatrix& m) {
  return max_abs(m.adjoint() * m - identity(m.cols()));
}

inline double coisometry_residual(const CMatrix& m) {
  return max_abs(m * m.adjoint() - identity(m.rows()));
}

// Row-major flattening of a matrix into a column vector.
inline CVector vec_row_major(const CMatrix& m) {
  CVector v(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
  }
  return v;
}

inline CMatrix unvec_row_major(const CVector& v, Eigen::Index rows, Eigen::Index cols) {
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = v(i * cols + j);
  }
  return m;
}

// Block-diagonal assembly; zero-sized blocks are allowed.
inline CMatrix direct_sum(const std::vector<CMatrix>& blocks) {
  Eigen::Index rows = 0, cols = 0;
  for (const CMatrix& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  CMatrix out = CMatrix::Zero(rows, cols);
  Eigen::Index r = 0, c = 0;
  for (const CMatrix& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

inline CMatrix direct_sum(const CMatrix& a, const CMatrix& b) { return direct_sum(std::vector<CMatrix>{a, b}); }

}  // namespace dilatory
