// Acceptance run: one [PASS]/[FAIL] line per criterion, nonzero exit if any fails.

#include "dilatory/dilatory.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

using namespace dilatory;
namespace fs = std::filesystem;

namespace {

// Brute-force Gram: ⟨⟨b_α⊗e_s, b_β⊗e_t⟩⟩ = φ(b_α* b_β)[s,t], ranked by SVD.
int oracle_dim(const OcpMap& phi) {
  const auto units = matrix_units(phi.domain);
  const int k = phi.k;
  const auto n = static_cast<Eigen::Index>(units.size()) * k;
  CMatrix g(n, n);
  for (std::size_t a = 0; a < units.size(); ++a)
    for (std::size_t b = 0; b < units.size(); ++b) {
      const CMatrix v = apply(phi, units[a].adjoint() * units[b]);
      for (int s = 0; s < k; ++s)
        for (int t = 0; t < k; ++t) g(static_cast<Eigen::Index>(a) * k + s, static_cast<Eigen::Index>(b) * k + t) = v(s, t);
    }
  Eigen::JacobiSVD<CMatrix> svd(g);
  const auto& sv = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) r += sv(i) > 1e-8 * sv(0) ? 1 : 0;
  return r;
}

OcpMap identity_channel(int n) {
  const FdCStarAlgebra a({n});
  std::vector<CMatrix> images;
  for (const AlgebraElement& e : matrix_units(a)) images.push_back(e.blocks[0]);
  return OcpMap(a, n, images);
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// Shared criterion-1 instances.
struct Instance {
  OcpMap phi;
  DilationCertificate cert;
};

const std::vector<Instance>& crit1_instances() {
  static const std::vector<Instance> inst = [] {
    std::vector<Instance> v;
    for (int i = 0; i < 200; ++i) {
      Rng rng = Rng::stream(1000, static_cast<std::uint64_t>(i));
      const OcpMap phi = ensemble_map(rng, 3);
      v.push_back({phi, stinespring_dilate(phi)});
    }
    return v;
  }();
  return inst;
}

Outcome criterion1() {
  double worst = 0.0;
  int non_minimal = 0;
  for (const Instance& in : crit1_instances()) {
    worst = std::max(worst, max_abs_diff(restrict(in.cert.rep), in.phi));
    non_minimal += is_minimal(in.cert.rep) ? 0 : 1;
  }
  return {worst <= 1e-9 && non_minimal == 0,
          "200 maps, max restriction residual " + sci(worst) + ", non-minimal " + std::to_string(non_minimal)};
}

Outcome criterion2() {
  std::vector<std::string> parts;
  bool ok = true;
  for (int m : {2, 3}) {
    const OcpMap phi = tracial_map(m, 1);
    const int d = stinespring_dilate(phi).dim(), o = oracle_dim(phi);
    ok = ok && d == m * m && o == m * m;
    parts.push_back("tracial m=" + std::to_string(m) + ": " + std::to_string(d) + " (oracle " + std::to_string(o) + ")");
  }
  for (int n : {2, 3}) {
    const OcpMap phi = identity_channel(n);
    const int d = stinespring_dilate(phi).dim(), o = oracle_dim(phi);
    ok = ok && d == n && o == n;
    parts.push_back("identity n=" + std::to_string(n) + ": " + std::to_string(d) + " (oracle " + std::to_string(o) + ")");
  }
  std::string s;
  for (const std::string& p : parts) s += (s.empty() ? "" : "; ") + p;
  return {ok, s};
}

Outcome criterion3() {
  double zig = 0.0, med = 0.0;
  for (const Instance& in : crit1_instances()) {
    zig = std::max(zig, check_zigzag(in.phi, in.cert.rep).max_residual);
    med = std::max(med, max_abs(mediating_morphism(in.cert.rep, in.cert).L - identity(in.cert.dim())));
  }
  return {zig <= 1e-9 && med <= 1e-10, "zigzag " + sci(zig) + ", mediator vs I " + sci(med)};
}

Outcome criterion4() {
  double fit = 0.0, inter = 0.0;
  bool exact = true;
  for (int i = 0; i < 100; ++i) {
    Rng rng = Rng::stream(2000, static_cast<std::uint64_t>(i));
    const OcpMap phi = ensemble_map(rng, 3);
    const OcpMorphismInstance m = random_ocp_morphism(phi, rng);
    const DilationCertificate cphi = stinespring_dilate(phi), cpsi = stinespring_dilate(m.psi);
    const AnchoredRep target = dress(cpsi, rng).rep;
    const RepMorphism u = universal_factorization(m.T, cphi, target, cpsi);
    exact = exact && u.T.rows() == m.T.rows() && u.T.cols() == m.T.cols() && (u.T.array() == m.T.array()).all();
    inter = std::max(inter, max_abs(u.L * cphi.rep.V - target.V * m.T));
    fit = std::max(fit, max_abs(u.L - fit_morphism_on_generators(cphi.rep, target, m.T)));
  }
  return {exact && inter <= 1e-9 && fit <= 1e-9,
          std::string("T exact ") + (exact ? "yes" : "no") + ", LV - WT " + sci(inter) + ", vs fitted " + sci(fit)};
}

Outcome criterion5() {
  const auto t = counterexample_tracial();
  const MorphismVariants vt = check_morphism_variants(t.T, t.phi, t.psi);
  const double op = op_norm(t.T * apply(t.phi, AlgebraElement::unit(t.phi.domain)) * t.T.adjoint() -
                            apply(t.psi, AlgebraElement::unit(t.psi.domain)));
  const auto f = counterexample_flip();
  const MorphismVariants vf = check_morphism_variants(f.T, f.phi, f.psi);
  const AlgebraElement e12 = AlgebraElement::matrix_unit(f.phi.domain, f.phi.domain.index(0, 0, 1));
  const double v22 = max_abs(f.T * apply(f.phi, e12) - apply(f.psi, e12) * f.T);
  const bool ok = !vt.diagram_23 && vt.diagram_22 && vt.diagram_24 && std::abs(op - 1.0) <= 1e-9 && !vf.diagram_23 &&
                  !vf.diagram_22 && vf.diagram_24 && v22 >= 0.4;
  auto flags = [](const MorphismVariants& v) {
    return std::string("{") + (v.diagram_23 ? "T" : "F") + (v.diagram_22 ? "T" : "F") + (v.diagram_24 ? "T" : "F") + "}";
  };
  return {ok, "tracial " + flags(vt) + " op-norm violation " + sci(op) + "; flip " + flags(vf) + " E_12 violation " + sci(v22)};
}

Outcome criterion6() {
  double eq = 0.0;
  int eq_unverified = 0;
  for (int i = 0; i < 100; ++i) {
    Rng rng = Rng::stream(3000, static_cast<std::uint64_t>(i));
    // alternate single matrix blocks and direct sums
    const FdCStarAlgebra a = i % 2 == 0 ? FdCStarAlgebra({rng.integer(2, 3)})
                                        : FdCStarAlgebra(rng.integer(0, 1) ? std::vector<int>{2, 1} : std::vector<int>{1, 1, 1});
    const OcpMap phi = random_cp_map(a, rng.integer(1, 2), rng.integer(1, 2), rng);
    const DilationPair p = random_dilation_pair(phi, true, rng, Tolerance{});
    const PurificationResult r = purify_unitary(p.rep1, p.rep2);
    eq = std::max({eq, r.unitarity_residual, r.anchor_residual, r.intertwining_residual});
    eq_unverified += r.verified ? 0 : 1;
  }
  double part = 0.0;
  int not_maximal = 0;
  for (int i = 0; i < 50; ++i) {
    Rng rng = Rng::stream(4000, static_cast<std::uint64_t>(i));
    const FdCStarAlgebra a = i % 2 == 0 ? FdCStarAlgebra({2}) : FdCStarAlgebra({2, 1});
    const OcpMap phi = random_cp_map(a, rng.integer(1, 2), rng.integer(1, 2), rng);
    const DilationPair p = random_dilation_pair(phi, false, rng, Tolerance{});
    const PurificationResult r = purify_partial(p.rep1, p.rep2);
    part = std::max(part, r.anchor_residual);
    if (matrix_rank(r.U) != maximal_intertwiner_rank(a, r.source_multiplicities, r.target_multiplicities)) ++not_maximal;
  }
  const DilationPair w = mixed_witness_pair();
  const PurificationResult mixed = purify_partial(w.rep1, w.rep2);
  const bool mixed_ok = mixed.label == "mixed" && mixed.anchor_residual <= 1e-8 &&
                        matrix_rank(mixed.U) == maximal_intertwiner_rank(w.rep1.algebra, mixed.source_multiplicities,
                                                                         mixed.target_multiplicities);
  return {eq <= 1e-8 && eq_unverified == 0 && part <= 1e-8 && not_maximal == 0 && mixed_ok,
          "equivalent worst " + sci(eq) + " (unverified " + std::to_string(eq_unverified) + "), inequivalent UV-W " + sci(part) +
              " (non-maximal " + std::to_string(not_maximal) + "), mixed witness " + (mixed_ok ? "ok" : "bad")};
}

Outcome criterion7() {
  int bad = 0;
  for (int i = 0; i < 50; ++i) {
    Rng rng = Rng::stream(5000, static_cast<std::uint64_t>(i));
    const FdCStarAlgebra a = random_algebra(2, 2, rng);
    std::vector<int> c;
    int n = 0, expected = 0;
    for (int j = 0; j < a.num_blocks(); ++j) {
      c.push_back(rng.integer(0, 2));
      n += c.back() * a.blocks()[j];
      expected += c.back() * c.back();
    }
    if (n == 0) {
      c[0] = 1;
      n = a.blocks()[0];
      expected = 1;
    }
    const std::vector<CMatrix> pi = random_multiplicity_rep(a, c, rng);
    if (static_cast<int>(commutant(std::span<const CMatrix>(pi), n).size()) != expected) ++bad;
  }
  return {bad == 0, "50 instances, mismatches " + std::to_string(bad)};
}

Outcome criterion8() {
  const DualDefinitionOutcome dual = partial_isometry_dual_definition(6000, 500);
  const LawReport tensor = partial_isometry_tensor(6001, 100);
  const LawReport comp = check_composite_witness();
  return {dual.report.pass && tensor.pass && comp.pass,
          "dual definitions " + std::string(dual.report.pass ? "agree" : "disagree") + " (" + std::to_string(dual.accepted) +
              " accepted, " + std::to_string(dual.rejected) + " rejected), tensor " + sci(tensor.max_residual) +
              ", composite witness " + (comp.pass ? "ok" : "bad")};
}

Outcome criterion9() {
  const SuiteReport r = run_law_suite(SuiteOptions{});
  std::ostringstream s;
  double worst = 0.0, weakest = std::numeric_limits<double>::infinity();
  bool ok = r.ok();
  for (const LawReport& l : r.laws) {
    worst = std::max(worst, l.max_residual);
    if (!l.pass) s << l.law << " failed; ";
  }
  for (const NegativeControl& c : r.controls) {
    weakest = std::min(weakest, c.residual);
    if (!c.failed || c.residual < kNegativeControlFloor) {
      ok = false;
      s << "control " << c.name << " residual " << sci(c.residual) << "; ";
    }
  }
  s << r.laws.size() << " laws, worst residual " << sci(worst) << ", " << r.controls.size() << " controls, weakest " << sci(weakest);
  return {ok, s.str()};
}

std::string capture(const std::string& args) {
  const fs::path out = fs::temp_directory_path() / ("dilatory_acc_" + std::to_string(::getpid()) + ".txt");
  const std::string cmd = std::string("\"") + DILATORY_CLI + "\" " + args + " >\"" + out.string() + "\" 2>/dev/null";
  const int status = std::system(cmd.c_str());
  std::ifstream in(out, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  fs::remove(out);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return "\x01exit " + std::to_string(WEXITSTATUS(status));
  return s.str();
}

Outcome criterion10() {
  const std::string rnd = "random --seed 11 --blocks 2,1 --k 2 --kraus-rank 2";
  const std::string r1 = capture(rnd), r2 = capture(rnd);
  const fs::path map = fs::temp_directory_path() / ("dilatory_acc_map_" + std::to_string(::getpid()) + ".json");
  std::ofstream(map, std::ios::binary) << r1;
  const std::string d1 = capture("dilate " + map.string()), d2 = capture("dilate " + map.string());
  fs::remove(map);
  const bool ok = !r1.empty() && r1[0] != '\x01' && !d1.empty() && d1[0] != '\x01' && r1 == r2 && d1 == d2;
  return {ok, "random " + std::to_string(r1.size()) + " bytes " + (r1 == r2 ? "identical" : "differ") + ", dilate " +
                  std::to_string(d1.size()) + " bytes " + (d1 == d2 ? "identical" : "differ")};
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                       criterion6, criterion7, criterion8, criterion9, criterion10};
  int failures = 0;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "[PASS]" : "[FAIL]") << " criterion " << i + 1 << ": " << o.detail << std::endl;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria failed") << " in " << sci(secs) << " s"
            << std::endl;
  return failures == 0 ? 0 : 1;
}
