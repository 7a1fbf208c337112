#pragma once

// Seeded ensembles, the counterexample and partial-isometry suites, and the
// aggregated law suite with its negative controls.

#include "dilatory/laws.hpp"
#include "dilatory/random.hpp"

#include <algorithm>
#include <future>
#include <thread>

namespace dilatory {

// ---- instance builders -----------------------------------------------------

// Blocks in {1..max_block} with ambient size ≤ 4 (or max_block if larger).
inline FdCStarAlgebra ensemble_algebra(Rng& rng, int max_block) {
  const int cap = std::max(4, max_block);
  std::vector<int> blocks{rng.integer(1, max_block)};
  if (rng.integer(0, 1) == 1 && blocks[0] < cap) blocks.push_back(rng.integer(1, std::min(max_block, cap - blocks[0])));
  return FdCStarAlgebra(blocks);
}

inline OcpMap ensemble_map(Rng& rng, int max_block, int max_k = 3) {
  const FdCStarAlgebra a = ensemble_algebra(rng, max_block);
  const int k = rng.integer(1, std::min(max_k, std::max(1, max_block)));
  return random_cp_map(a, k, rng.integer(1, 2), rng);
}

// Images of a multiplicity representation with at least one nonzero entry.
inline std::vector<CMatrix> junk_images(const FdCStarAlgebra& a, Rng& rng, const std::vector<int>& mult = {}) {
  std::vector<int> c = mult;
  if (c.empty()) {
    for (int j = 0; j < a.num_blocks(); ++j) c.push_back(rng.integer(0, 1));
    if (std::all_of(c.begin(), c.end(), [](int x) { return x == 0; })) c[static_cast<std::size_t>(rng.integer(0, a.num_blocks() - 1))] = 1;
  }
  return random_multiplicity_rep(a, c, rng);
}

// A non-minimal dilation of φ: the canonical one conjugated by X and padded
// with a multiplicity representation.
struct DressedDilation {
  AnchoredRep rep;
  CMatrix X;
  std::vector<CMatrix> junk;
  bool junk_first = false;
};

inline DressedDilation dress(const DilationCertificate& cert, Rng& rng, std::vector<CMatrix> junk = {}, int junk_first = -1) {
  DressedDilation d;
  d.X = random_unitary(cert.dim(), rng);
  d.junk = junk.empty() ? junk_images(cert.map.domain, rng) : std::move(junk);
  d.junk_first = junk_first < 0 ? rng.integer(0, 1) == 1 : junk_first == 1;
  d.rep = inflate(conjugate(cert.rep, d.X), d.junk, d.junk_first);
  return d;
}

// ψ = X (1_p ⊗ φ ⊕ φ′) X* and T = X [w ⊗ 1_k ; 0]: then Tφ = ψT.
struct OcpMorphismInstance {
  OcpMap psi;
  CMatrix T;
};

inline OcpMorphismInstance random_ocp_morphism(const OcpMap& phi, Rng& rng, int max_target_k = 4) {
  const int k = phi.k;
  const int p = (2 * k <= max_target_k) ? rng.integer(1, 2) : 1;
  const int extra = std::min(rng.integer(0, 1), max_target_k - p * k);
  const int kk = p * k + std::max(extra, 0);
  std::optional<OcpMap> aux;
  if (extra > 0) aux = random_cp_map(phi.domain, extra, 1, rng);
  const CMatrix x = random_unitary(kk, rng);
  const CMatrix w = random_complex(p, 1, rng);
  std::vector<CMatrix> images;
  for (int alpha = 0; alpha < phi.domain.dim(); ++alpha) {
    CMatrix img = kron(identity(p), phi.image(alpha));
    if (aux) img = direct_sum(img, aux->image(alpha));
    images.push_back(x * img * x.adjoint());
  }
  CMatrix t = CMatrix::Zero(kk, k);
  t.topRows(p * k) = kron(w, identity(k));
  return {OcpMap(phi.domain, kk, std::move(images)), x * t};
}

// (T, L) between dressed dilations sharing the same junk summand:
// L = X₂ L_T X₁* on the minimal parts and the identity on the junk.
struct RepMorphismSample {
  RepMorphismInstance instance;
  OcpMap phi;
  OcpMap psi;
};

inline RepMorphismSample random_rep_morphism(const OcpMap& phi, Rng& rng, const Tolerance& tol) {
  const OcpMorphismInstance om = random_ocp_morphism(phi, rng);
  const DilationCertificate c1 = stinespring_dilate(phi, tol);
  const DilationCertificate c2 = stinespring_dilate(om.psi, tol);
  const std::vector<CMatrix> junk = junk_images(phi.domain, rng);
  const DressedDilation src = dress(c1, rng, junk, 0);
  const DressedDilation dst = dress(c2, rng, junk, 0);
  const CMatrix lt = stine_on_morphism(om.T, c1, c2, tol).L;
  const CMatrix l = direct_sum(dst.X * lt * src.X.adjoint(), identity(junk.front().rows()));
  return {{src.rep, dst.rep, {om.T, l}}, phi, om.psi};
}

// f: A′ → A with A′ small; falls back to ℂ → A.
inline StarHom ensemble_hom(const FdCStarAlgebra& a, Rng& rng) {
  int smallest = a.block_size(0);
  for (int n : a.blocks()) smallest = std::min(smallest, n);
  if (rng.integer(0, 2) > 0) {
    const FdCStarAlgebra src = random_algebra(2, smallest, rng);
    if (auto f = random_hom(src, a, rng)) return *f;
  }
  return unit_hom(a);
}

// Two dilations of the same map. With `equivalent` the junk multiplicities
// agree; otherwise they are drawn until they differ.
struct DilationPair {
  AnchoredRep rep1;
  AnchoredRep rep2;
  std::vector<int> junk1;
  std::vector<int> junk2;
};

inline DilationPair random_dilation_pair(const OcpMap& phi, bool equivalent, Rng& rng, const Tolerance& tol) {
  const DilationCertificate cert = stinespring_dilate(phi, tol);
  const FdCStarAlgebra& a = phi.domain;
  DilationPair p;
  auto draw = [&] {
    std::vector<int> c;
    for (int j = 0; j < a.num_blocks(); ++j) c.push_back(rng.integer(0, 2));
    if (std::all_of(c.begin(), c.end(), [](int x) { return x == 0; })) c[0] = 1;
    return c;
  };
  p.junk1 = draw();
  if (equivalent) {
    p.junk2 = p.junk1;
  } else {
    do p.junk2 = draw(); while (p.junk2 == p.junk1);
  }
  p.rep1 = dress(cert, rng, random_multiplicity_rep(a, p.junk1, rng)).rep;
  p.rep2 = dress(cert, rng, random_multiplicity_rep(a, p.junk2, rng)).rep;
  const CMatrix y = random_unitary(p.rep2.h, rng);
  p.rep2 = conjugate(p.rep2, y);
  return p;
}

// ℂ ⊕ ℂ, the state with weights ½, ½, dilated with source multiplicities
// (1, 2) and target multiplicities (2, 1).
inline DilationPair mixed_witness_pair(const Tolerance& tol = {}) {
  const FdCStarAlgebra a({1, 1});
  const OcpMap phi(a, 1, {CMatrix::Constant(1, 1, 0.5), CMatrix::Constant(1, 1, 0.5)});
  const DilationCertificate cert = stinespring_dilate(phi, tol);
  DilationPair p;
  p.junk1 = {0, 1};
  p.junk2 = {1, 0};
  p.rep1 = inflate(cert.rep, amplified_images(a, p.junk1));
  p.rep2 = inflate(cert.rep, amplified_images(a, p.junk2), true);
  return p;
}

// ---- counterexamples -------------------------------------------------------

struct CounterexampleData {
  OcpMap phi;
  OcpMap psi;
  CMatrix T;
};

// φ = tr/2 on M_2, ψ = tr/2 · 1_2, T = (1, 1)ᵀ/√2.
inline CounterexampleData counterexample_tracial() {
  CMatrix t(2, 1);
  t << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return {tracial_map(2, 1), tracial_map(2, 2), t};
}

// φ = tr/2 on M_2, ψ(A) = (A + σ_x A σ_x)/2, T = (1, 0)ᵀ.
inline CounterexampleData counterexample_flip() {
  const FdCStarAlgebra a({2});
  CMatrix sx(2, 2);
  sx << 0, 1, 1, 0;
  std::vector<CMatrix> images;
  for (const AlgebraElement& e : matrix_units(a)) {
    const CMatrix m = e.blocks[0];
    images.push_back((m + sx * m * sx) / 2.0);
  }
  CMatrix t(2, 1);
  t << 1.0, 0.0;
  return {tracial_map(2, 1), OcpMap(a, 2, std::move(images)), t};
}

// Deviation from the expected pattern; 0 when the flags match and the
// violation magnitudes are as expected.
inline LawReport check_counterexamples(const Tolerance& tol = {}) {
  std::vector<LawReport> parts;
  {
    const auto ex = counterexample_tracial();
    const MorphismVariants v = check_morphism_variants(ex.T, ex.phi, ex.psi, tol);
    const CMatrix gap = ex.T * apply(ex.phi, AlgebraElement::unit(ex.phi.domain)) * ex.T.adjoint() -
                        apply(ex.psi, AlgebraElement::unit(ex.psi.domain));
    const double violation = op_norm(gap);
    const bool flags = !v.diagram_23 && v.diagram_22 && v.diagram_24;
    const double dev = flags ? std::abs(violation - 1.0) : 1.0;
    parts.push_back(LawReport::make("counterexample_tracial", dev, tol,
                                    {format_residual("Ad_T∘φ = ψ violation ‖Ad_Tφ(1) − ψ(1)‖_op", violation)}));
  }
  {
    const auto ex = counterexample_flip();
    const MorphismVariants v = check_morphism_variants(ex.T, ex.phi, ex.psi, tol);
    const AlgebraElement e12 = AlgebraElement::matrix_unit(ex.phi.domain, ex.phi.domain.index(0, 0, 1));
    const double violation = max_abs(ex.T * apply(ex.phi, e12) - apply(ex.psi, e12) * ex.T);
    const bool flags = !v.diagram_23 && !v.diagram_22 && v.diagram_24;
    const double dev = (flags && violation >= 0.4) ? 0.0 : 1.0;
    parts.push_back(LawReport::make("counterexample_flip", dev, tol,
                                    {format_residual("Tφ = ψT violation on E_12", violation)}));
  }
  return merge("counterexamples", parts, tol);
}

// ---- partial isometries ----------------------------------------------------

enum class PartialIsometryKind { Exact, NearAccept, NearReject, Generic, Zero };

// U diag(σ) W* with r unit singular values, optionally perturbed.
inline CMatrix sample_partial_isometry(Eigen::Index rows, Eigen::Index cols, Eigen::Index r, double perturbation, Rng& rng) {
  const CMatrix u = random_isometry(rows, r, rng);
  const CMatrix w = random_isometry(cols, r, rng);
  RVector s = RVector::Ones(r);
  if (r > 0 && perturbation != 0.0) s(rng.integer(0, static_cast<int>(r) - 1)) += perturbation;
  return u * s.cast<Complex>().asDiagonal() * w.adjoint();
}

struct DualDefinitionOutcome {
  LawReport report;
  int accepted = 0;
  int rejected = 0;
};

// ‖LL*L − L‖ ≤ eps ⇔ singular values on the initial space are 1 ± eps.
inline DualDefinitionOutcome partial_isometry_dual_definition(std::uint64_t seed, int samples, const Tolerance& tol = {}) {
  DualDefinitionOutcome out;
  int disagreements = 0;
  std::vector<std::string> witnesses;
  for (int i = 0; i < samples; ++i) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
    const Eigen::Index rows = rng.integer(1, 4);
    const Eigen::Index cols = rng.integer(1, 4);
    const Eigen::Index r = rng.integer(0, static_cast<int>(std::min(rows, cols)));
    const auto kind = static_cast<PartialIsometryKind>(i % 5);
    CMatrix l;
    switch (kind) {
      case PartialIsometryKind::Exact: l = sample_partial_isometry(rows, cols, r, 0.0, rng); break;
      case PartialIsometryKind::NearAccept:
        l = sample_partial_isometry(rows, cols, std::max<Eigen::Index>(r, 1), (rng.integer(0, 1) ? 1 : -1) * 0.05 * tol.eps_eq, rng);
        break;
      case PartialIsometryKind::NearReject:
        l = sample_partial_isometry(rows, cols, std::max<Eigen::Index>(r, 1), (rng.integer(0, 1) ? 1 : -1) * 100.0 * tol.eps_eq, rng);
        break;
      case PartialIsometryKind::Generic: l = random_complex(rows, cols, rng); break;
      case PartialIsometryKind::Zero: l = CMatrix::Zero(rows, cols); break;
    }
    const PartialIsometryReport rep = partial_isometry_report(l, tol);
    if (rep.is_partial_isometry != rep.restricted_isometry) {
      ++disagreements;
      witnesses.push_back("sample " + std::to_string(i) + ": " + format_residual("LL*L − L", rep.residual));
    }
    (rep.is_partial_isometry ? out.accepted : out.rejected) += 1;
  }
  out.report = LawReport::make("partial_isometry_dual_definition", disagreements, tol, std::move(witnesses));
  return out;
}

// L partial isometry ⇔ 1_n ⊗ L partial isometry ⇔ L ⊗ 1_n partial isometry.
inline LawReport partial_isometry_tensor(std::uint64_t seed, int samples, const Tolerance& tol = {}) {
  int disagreements = 0;
  std::vector<std::string> witnesses;
  for (int i = 0; i < samples; ++i) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
    const Eigen::Index rows = rng.integer(1, 3);
    const Eigen::Index cols = rng.integer(1, 3);
    const int n = rng.integer(1, 3);
    const CMatrix l = (i % 2 == 0) ? sample_partial_isometry(rows, cols, rng.integer(0, static_cast<int>(std::min(rows, cols))), 0.0, rng)
                                   : random_complex(rows, cols, rng);
    const bool base = partial_isometry_report(l, tol).is_partial_isometry;
    const bool left = partial_isometry_report(kron(identity(n), l), tol).is_partial_isometry;
    const bool right = partial_isometry_report(kron(l, identity(n)), tol).is_partial_isometry;
    if (base != left || base != right) {
      ++disagreements;
      witnesses.push_back("sample " + std::to_string(i));
    }
  }
  return LawReport::make("partial_isometry_tensor", disagreements, tol, std::move(witnesses));
}

struct CompositeWitness {
  CMatrix first;   // E_11
  CMatrix second;  // projection onto (e_1 + e_2)/√2
  PartialIsometryReport first_report;
  PartialIsometryReport second_report;
  PartialIsometryReport product_report;
};

inline CompositeWitness composite_witness(const Tolerance& tol = {}) {
  CompositeWitness w;
  w.first = CMatrix::Zero(2, 2);
  w.first(0, 0) = 1.0;
  w.second = CMatrix::Constant(2, 2, 0.5);
  w.first_report = partial_isometry_report(w.first, tol);
  w.second_report = partial_isometry_report(w.second, tol);
  w.product_report = partial_isometry_report(w.first * w.second, tol);
  return w;
}

// Passes when both factors are partial isometries and the product is not.
inline LawReport check_composite_witness(const Tolerance& tol = {}) {
  const CompositeWitness w = composite_witness(tol);
  const bool ok = w.first_report.is_partial_isometry && w.second_report.is_partial_isometry &&
                  !w.product_report.is_partial_isometry;
  return LawReport::make("partial_isometry_composite_witness", ok ? 0.0 : 1.0, tol,
                         {format_residual("product LL*L − L", w.product_report.residual)});
}

// ---- law suite -------------------------------------------------------------

struct NegativeControl {
  std::string name;
  double residual = 0.0;  // smallest residual over the draws it ran on
  bool failed = false;    // the sabotaged check failed with residual ≥ 1e-3
};

struct SuiteOptions {
  std::uint64_t seed = 0;
  int draws = 100;
  int max_dim = 3;
  Tolerance tol{};
  unsigned threads = 0;  // 0: hardware concurrency
};

struct SuiteReport {
  std::vector<LawReport> laws;
  std::vector<NegativeControl> controls;
  std::vector<std::string> warnings;
  bool rank_instability = false;

  bool ok() const {
    return std::all_of(laws.begin(), laws.end(), [](const LawReport& r) { return r.pass; }) &&
           std::all_of(controls.begin(), controls.end(), [](const NegativeControl& c) { return c.failed; });
  }
};

inline constexpr double kNegativeControlFloor = 1e-3;

namespace detail {

struct ScaledMediator {
  double factor = 1.5;
  RepMorphism operator()(const AnchoredRep& rep, const DilationCertificate& cert) const {
    RepMorphism m = mediating_morphism(rep, cert);
    m.L *= factor;
    return m;
  }
};

// Replaces Q by SQ for the signed cyclic shift S (no eigenvalue 1) but keeps Q⁺.
struct ScrambledCertificate {
  mutable DilationCertificate held;
  const DilationCertificate& operator()(const DilationCertificate& c) const {
    held = c;
    const Eigen::Index d = c.dim();
    for (Eigen::Index i = 0; i + 1 < d; ++i) held.Q.row(i) = c.Q.row(i + 1);
    held.Q.row(d - 1) = -c.Q.row(0);
    return held;
  }
};

struct PerturbedCounit {
  RepMorphism operator()(const AnchoredRep& rep, const DilationCertificate& cert) const {
    RepMorphism m = mediating_morphism(rep, cert);
    m.L *= 1.25;
    return m;
  }
};

// A ↦ A ⊕ (tr A / 2)·1_3 on M_2: unital and *-preserving but not multiplicative.
inline StarHom padded_trace_map() {
  const FdCStarAlgebra src({2});
  const FdCStarAlgebra dst({2, 3});
  std::vector<AlgebraElement> images;
  for (const AlgebraElement& e : matrix_units(src)) {
    const CMatrix m = e.blocks[0];
    images.emplace_back(dst, std::vector<CMatrix>{m, CMatrix(identity(3) * (m.trace() / 2.0))});
  }
  return StarHom(src, dst, std::move(images));
}

struct DrawResult {
  std::vector<LawReport> laws;                    // zigzag, naturality, modification, oplax, dagger, dagger_anchored, adjunction
  std::vector<double> control_residuals;          // per control, same order as control_names()
  bool rank_instability = false;
};

inline const std::vector<std::string>& control_names() {
  static const std::vector<std::string> names{"zigzag_scaled_mediator", "naturality_random_L", "modification_padded_trace_gate",
                                              "oplax_scrambled_Q", "adjunction_perturbed_counit"};
  return names;
}

inline const std::vector<std::string>& law_names() {
  static const std::vector<std::string> names{"zigzag", "naturality_m", "modification", "oplax", "dagger", "dagger_anchored",
                                              "objectwise_adjunction"};
  return names;
}

inline LawReport exception_report(const std::string& law, const std::string& what) {
  return LawReport{law, std::numeric_limits<double>::infinity(), false, {"exception: " + what}};
}

template <class F>
LawReport guarded(const std::string& law, F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return exception_report(law, e.what());
  }
}

// Residual of a sabotaged check; +inf when it threw (a rejection).
template <class F>
double control_residual(F&& f) {
  try {
    return f();
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
}

inline DrawResult run_draw(const SuiteOptions& opt, int index) {
  const Tolerance& tol = opt.tol;
  Rng rng = Rng::stream(opt.seed, static_cast<std::uint64_t>(index));
  DrawResult out;
  const OcpMap phi = ensemble_map(rng, opt.max_dim);

  std::optional<DilationCertificate> cert;
  try {
    cert = stinespring_dilate(phi, tol);
    out.rank_instability = cert->rank_instability;
  } catch (const std::exception& e) {
    for (const std::string& name : law_names()) out.laws.push_back(exception_report(name, e.what()));
    out.control_residuals.assign(control_names().size(), std::numeric_limits<double>::infinity());
    return out;
  }

  const AnchoredRep dressed = dress(*cert, rng).rep;
  out.laws.push_back(guarded("zigzag", [&] { return check_zigzag(phi, dressed, tol); }));

  std::optional<RepMorphismSample> rms;
  try {
    rms = random_rep_morphism(phi, rng, tol);
  } catch (const std::exception&) {
  }
  out.laws.push_back(guarded("naturality_m", [&] {
    if (!rms) throw Error(ErrorKind::InvalidArgument, "could not build a morphism instance");
    return check_naturality_m(rms->instance.morphism, rms->instance.source, rms->instance.target, tol);
  }));

  const StarHom f = ensemble_hom(phi.domain, rng);
  out.laws.push_back(guarded("modification", [&] { return check_modification(f, dressed, tol); }));

  const StarHom f_prime = ensemble_hom(f.source, rng);
  out.laws.push_back(guarded("oplax", [&] { return check_oplax(f, f_prime, phi, tol); }));

  std::optional<OcpMorphismInstance> step1, step2;
  out.laws.push_back(guarded("dagger", [&] {
    step1 = random_ocp_morphism(phi, rng);
    OcpMorphism a{phi, step1->psi, step1->T};
    step2 = random_ocp_morphism(step1->psi, rng, std::max(4, step1->psi.k));
    OcpMorphism b{step1->psi, step2->psi, step2->T};
    const std::vector<OcpMorphism> chain{identity_morphism(phi), a, b};
    return check_dagger(std::span<const OcpMorphism>(chain), tol);
  }));
  out.laws.push_back(guarded("dagger_anchored", [&] {
    if (!rms) throw Error(ErrorKind::InvalidArgument, "could not build a morphism instance");
    const std::vector<RepMorphismInstance> inst{rms->instance,
                                                {dressed, dressed, identity_morphism(dressed)}};
    return check_dagger(std::span<const RepMorphismInstance>(inst), tol);
  }));

  std::optional<AdjunctionSample> sample;
  out.laws.push_back(guarded("objectwise_adjunction", [&] {
    const OcpMorphismInstance om = random_ocp_morphism(phi, rng);
    const DilationCertificate target_cert = stinespring_dilate(om.psi, tol);
    sample = AdjunctionSample{phi, dress(target_cert, rng).rep, om.T, ensemble_hom(phi.domain, rng)};
    const std::vector<AdjunctionSample> s{*sample};
    return objectwise_adjunction_suite(std::span<const AdjunctionSample>(s), tol);
  }));

  // negative controls
  out.control_residuals.push_back(control_residual([&] {
    return check_zigzag(phi, dressed, tol, ScaledMediator{}).max_residual;
  }));
  out.control_residuals.push_back(control_residual([&] {
    if (!rms) return std::numeric_limits<double>::infinity();
    RepMorphism bad = rms->instance.morphism;
    bad.L = random_complex(bad.L.rows(), bad.L.cols(), rng);
    return check_naturality_m(bad, rms->instance.source, rms->instance.target, tol).max_residual;
  }));
  out.control_residuals.push_back(check_star_hom(padded_trace_map(), tol).max_residual());
  out.control_residuals.push_back(control_residual([&] {
    return check_oplax(f, f_prime, phi, tol, ScrambledCertificate{}).max_residual;
  }));
  out.control_residuals.push_back(control_residual([&] {
    if (!sample) return std::numeric_limits<double>::infinity();
    const std::vector<AdjunctionSample> s{*sample};
    return objectwise_adjunction_suite(std::span<const AdjunctionSample>(s), tol, PerturbedCounit{}).max_residual;
  }));
  return out;
}

}  // namespace detail

inline SuiteReport run_law_suite(const SuiteOptions& opt) {
  SuiteReport report;
  if (opt.draws <= 0) {
    report.warnings.push_back("no draws requested; the law suite is empty");
    return report;
  }
  if (opt.max_dim < 1) throw Error(ErrorKind::InvalidArgument, "--dims must be at least 1");

  std::vector<detail::DrawResult> draws(static_cast<std::size_t>(opt.draws));
  unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(opt.draws));
  std::vector<std::future<void>> workers;
  for (unsigned w = 0; w < threads; ++w) {
    workers.push_back(std::async(std::launch::async, [&, w] {
      for (int i = static_cast<int>(w); i < opt.draws; i += static_cast<int>(threads)) {
        draws[static_cast<std::size_t>(i)] = detail::run_draw(opt, i);
      }
    }));
  }
  for (auto& w : workers) w.get();

  const auto& names = detail::law_names();
  for (std::size_t l = 0; l < names.size(); ++l) {
    std::vector<LawReport> parts;
    for (std::size_t i = 0; i < draws.size(); ++i) {
      LawReport r = draws[i].laws[l];
      for (std::string& w : r.witnesses) w = "draw " + std::to_string(i) + ": " + w;
      parts.push_back(std::move(r));
    }
    report.laws.push_back(merge(names[l], parts, opt.tol));
  }
  report.laws.push_back(check_counterexamples(opt.tol));
  report.laws.push_back(partial_isometry_dual_definition(opt.seed, std::max(opt.draws, 50), opt.tol).report);
  report.laws.push_back(partial_isometry_tensor(opt.seed, std::max(opt.draws / 2, 20), opt.tol));
  report.laws.push_back(check_composite_witness(opt.tol));

  const auto& cnames = detail::control_names();
  for (std::size_t c = 0; c < cnames.size(); ++c) {
    double lowest = std::numeric_limits<double>::infinity();
    for (const auto& d : draws) lowest = std::min(lowest, d.control_residuals[c]);
    report.controls.push_back({cnames[c], lowest, lowest >= kNegativeControlFloor});
  }
  for (const auto& d : draws) report.rank_instability = report.rank_instability || d.rank_instability;
  if (report.rank_instability) report.warnings.push_back("rank instability: Gram eigenvalues near the rank cutoff");
  return report;
}

}  // namespace dilatory
