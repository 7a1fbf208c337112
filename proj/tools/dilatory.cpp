// dilatory: command-line front end.
//
//   dilatory dilate  MAP.json     [--tol T] [--out F] [--force]
//   dilatory purify  REP1 REP2    [--tol T] [--out F] [--allow-inequivalent]
//   dilatory laws                 [--seed S] [--draws N] [--dims D] [--tol T] [--out F]
//   dilatory random               [--seed S] [--blocks 2,3] [--k K] [--kraus-rank R] [--unital] [--out F]
//
// Exit codes: 0 ok, 1 law failure, 2 not CP, 3 parse error or impossible
// parameters, 4 restriction mismatch, 5 not equivalent.

#include "dilatory/dilatory.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using dilatory::Error;
using dilatory::ErrorKind;
using dilatory::io::json;

enum Exit : int { kOk = 0, kLawFailure = 1, kNotCp = 2, kParse = 3, kRestriction = 4, kNotEquivalent = 5 };

struct Common {
  double tol = 1e-9;
  std::string out = "-";
};

dilatory::Tolerance resolve_tolerance(const CLI::Option* opt, double value) {
  if (opt && opt->count() > 0) return dilatory::Tolerance::from(value);
  return dilatory::Tolerance::default_tolerance();
}

json read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream s;
    s << std::cin.rdbuf();
    return dilatory::io::parse_text(s.str());
  }
  return dilatory::io::read_file(path);
}

void write_output(const std::string& path, const json& j) {
  const std::string text = dilatory::io::dump(j);
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  out << text;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotCompletelyPositive: return kNotCp;
    case ErrorKind::RestrictionMismatch: return kRestriction;
    case ErrorKind::NotEquivalent: return kNotEquivalent;
    case ErrorKind::ParseError:
    case ErrorKind::InvalidArgument:
    case ErrorKind::ShapeMismatch: return kParse;
    default: return kLawFailure;
  }
}

int cmd_dilate(const std::string& input, const dilatory::Tolerance& tol, const std::string& out, bool force) {
  const dilatory::OcpMap phi = dilatory::io::load_ocp_map(read_input(input));
  if (!force) {
    const dilatory::CpReport cp = dilatory::is_completely_positive(phi, tol);
    if (!cp) {
      json j = {{"schema", dilatory::io::kSchema},
                {"type", "Error"},
                {"error", "NotCompletelyPositive"},
                {"choi_min_eigenvalue", cp.min_eigenvalue()},
                {"choi_min_eigenvalues", cp.min_eigenvalues},
                {"self_adjoint_residual", cp.self_adjoint_residual}};
      write_output(out, j);
      std::cerr << "error: NotCompletelyPositive: Choi min eigenvalue " << cp.min_eigenvalue() << "\n";
      return kNotCp;
    }
  }
  const dilatory::DilationCertificate cert = dilatory::stinespring_dilate(phi, tol, force);
  write_output(out, dilatory::io::to_json(cert));
  if (cert.rank_instability) std::cerr << "warning: Gram eigenvalues near the rank cutoff\n";
  return kOk;
}

int cmd_purify(const std::string& a, const std::string& b, const dilatory::Tolerance& tol, const std::string& out,
               bool allow_inequivalent) {
  const dilatory::AnchoredRep rep1 = dilatory::io::load_anchored_rep(read_input(a));
  const dilatory::AnchoredRep rep2 = dilatory::io::load_anchored_rep(read_input(b));
  const dilatory::PurificationResult r =
      allow_inequivalent ? dilatory::purify_partial(rep1, rep2, tol) : dilatory::purify_unitary(rep1, rep2, tol);
  write_output(out, dilatory::io::to_json(r));
  if (!r.verified) {
    std::cerr << "error: purification residuals exceed the tolerance\n";
    return kLawFailure;
  }
  return kOk;
}

int cmd_laws(const dilatory::SuiteOptions& opt, const std::string& out) {
  const dilatory::SuiteReport report = dilatory::run_law_suite(opt);
  write_output(out, dilatory::io::to_json(report));
  for (const std::string& w : report.warnings) std::cerr << "warning: " << w << "\n";
  if (report.ok()) return kOk;
  for (const dilatory::LawReport& r : report.laws) {
    if (!r.pass) {
      std::cerr << "law failed: " << r.law << " (max residual " << r.max_residual << ")\n";
      if (!r.witnesses.empty()) std::cerr << "  witness: " << r.witnesses.front() << "\n";
      return kLawFailure;
    }
  }
  for (const dilatory::NegativeControl& c : report.controls) {
    if (!c.failed) {
      std::cerr << "negative control passed unexpectedly: " << c.name << " (residual " << c.residual << ")\n";
      return kLawFailure;
    }
  }
  return kLawFailure;
}

std::vector<int> parse_blocks(const std::string& text) {
  std::vector<int> blocks;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) {
    std::size_t used = 0;
    int n = 0;
    try {
      n = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, "--blocks must be a comma-separated list of positive integers");
    }
    if (used != item.size() || n < 1) throw Error(ErrorKind::InvalidArgument, "--blocks entries must be positive integers");
    blocks.push_back(n);
  }
  if (blocks.empty()) throw Error(ErrorKind::InvalidArgument, "--blocks is empty");
  return blocks;
}

int cmd_random(std::uint64_t seed, const std::string& blocks, int k, int kraus_rank, bool unital, const std::string& out) {
  if (k < 1 || kraus_rank < 1) throw Error(ErrorKind::InvalidArgument, "--k and --kraus-rank must be positive");
  const dilatory::FdCStarAlgebra a(parse_blocks(blocks));
  dilatory::Rng rng = dilatory::Rng::stream(seed, 0);
  const dilatory::OcpMap phi = dilatory::random_cp_map(a, k, kraus_rank, rng, unital);
  write_output(out, dilatory::io::to_json(phi));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stinespring dilations of CP maps on finite-dimensional C*-algebras"};
  app.require_subcommand(1);

  Common dil;
  std::string dil_input;
  bool force = false;
  auto* dilate = app.add_subcommand("dilate", "minimal Stinespring dilation of an OCP map");
  dilate->add_option("input", dil_input, "OcpMap JSON file, or - for stdin")->required();
  auto* dil_tol = dilate->add_option("--tol", dil.tol, "tolerance (default 1e-9 or $DILATORY_TOL)");
  dilate->add_option("--out", dil.out, "output file (default stdout)");
  dilate->add_flag("--force", force, "skip the CP gate");

  Common pur;
  std::string rep1, rep2;
  bool allow_inequivalent = false;
  auto* purify = app.add_subcommand("purify", "intertwining unitary between two dilations of the same map");
  purify->add_option("rep1", rep1, "AnchoredRep JSON")->required();
  purify->add_option("rep2", rep2, "AnchoredRep JSON")->required();
  auto* pur_tol = purify->add_option("--tol", pur.tol, "tolerance");
  purify->add_option("--out", pur.out, "output file (default stdout)");
  purify->add_flag("--allow-inequivalent", allow_inequivalent, "emit the maximal blockwise extension when multiplicities differ");

  Common lw;
  dilatory::SuiteOptions suite;
  auto* laws = app.add_subcommand("laws", "run the categorical law suite");
  laws->add_option("--seed", suite.seed, "seed (default 0)");
  laws->add_option("--draws", suite.draws, "random draws (default 100)");
  laws->add_option("--dims", suite.max_dim, "largest block size (default 3)");
  auto* lw_tol = laws->add_option("--tol", lw.tol, "tolerance");
  laws->add_option("--threads", suite.threads, "worker threads (default: all cores)");
  laws->add_option("--out", lw.out, "output file (default stdout)");

  Common rnd;
  std::uint64_t seed = 0;
  std::string blocks = "2";
  int k = 2;
  int kraus_rank = 1;
  bool unital = false;
  auto* random = app.add_subcommand("random", "seeded random CP map from Kraus operators");
  random->add_option("--seed", seed, "seed (default 0)");
  random->add_option("--blocks", blocks, "block sizes, e.g. 2,3 (default 2)");
  random->add_option("--k", k, "output dimension (default 2)");
  random->add_option("--kraus-rank", kraus_rank, "number of Kraus operators (default 1)");
  random->add_flag("--unital", unital, "renormalize to an operator state");
  random->add_option("--out", rnd.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kParse;
  }

  try {
    if (*dilate) return cmd_dilate(dil_input, resolve_tolerance(dil_tol, dil.tol), dil.out, force);
    if (*purify) return cmd_purify(rep1, rep2, resolve_tolerance(pur_tol, pur.tol), pur.out, allow_inequivalent);
    if (*laws) {
      suite.tol = resolve_tolerance(lw_tol, lw.tol);
      return cmd_laws(suite, lw.out);
    }
    if (*random) return cmd_random(seed, blocks, k, kraus_rank, unital, rnd.out);
  } catch (const Error& e) {
    std::cerr << "error: " << dilatory::to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kLawFailure;
  }
  return kParse;
}
