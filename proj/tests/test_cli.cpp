#include "dilatory/dilatory.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dilatory;
namespace dio = dilatory::io;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("dilatory_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

CliRun run(const std::string& args) {
  static int counter = 0;
  const fs::path out = scratch() / ("out" + std::to_string(counter) + ".txt");
  const fs::path err = scratch() / ("err" + std::to_string(counter++) + ".txt");
  const std::string cmd = std::string("\"") + DILATORY_CLI + "\" " + args + " >\"" + out.string() + "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string fixture(const char* name) { return (fs::path(DILATORY_FIXTURES) / name).string(); }

std::string write_json(const std::string& name, const dio::json& j) {
  const fs::path p = scratch() / name;
  std::ofstream(p, std::ios::binary) << dio::dump(j);
  return p.string();
}

}  // namespace

TEST(CliDilate, TracialStateHasDimFour) {
  const CliRun r = run("dilate " + fixture("tracial_m2.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  const dio::json j = dio::parse_text(r.out);
  EXPECT_EQ(j["type"], "DilationCertificate");
  EXPECT_EQ(j["d"], 4);
  const DilationCertificate c = dio::certificate_from_json(j);
  EXPECT_LE(max_abs_diff(restrict(c.rep), c.map), 1e-9);
}

TEST(CliDilate, ScalarIntoTwoByTwo) {
  const CliRun r = run("dilate " + fixture("scalar_to_c2.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(dio::parse_text(r.out)["d"], 2);
}

TEST(CliDilate, StdinAndOutFile) {
  const fs::path out = scratch() / "cert.json";
  const CliRun r = run("dilate - --out \"" + out.string() + "\" < " + fixture("tracial_m2.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(dio::read_file(out.string())["d"], 4);
}

TEST(CliDilate, TransposeIsNotCp) {
  const CliRun r = run("dilate " + fixture("transpose_m2.json"));
  EXPECT_EQ(r.code, 2);
  const dio::json j = dio::parse_text(r.out);
  EXPECT_EQ(j["error"], "NotCompletelyPositive");
  EXPECT_NEAR(j["choi_min_eigenvalue"].get<double>(), -1.0, 1e-9);
  EXPECT_NE(r.err.find("-1"), std::string::npos);
}

TEST(CliDilate, MalformedAndWrongSchema) {
  EXPECT_EQ(run("dilate " + fixture("malformed.json")).code, 3);
  EXPECT_EQ(run("dilate " + fixture("wrong_schema.json")).code, 3);
  EXPECT_EQ(run("dilate " + (scratch() / "missing.json").string()).code, 3);
}

TEST(CliArgs, UsageErrors) {
  EXPECT_EQ(run("").code, 3);
  EXPECT_EQ(run("frobnicate").code, 3);
  EXPECT_EQ(run("laws --draws many").code, 3);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(CliPurify, ConjugatedDilation) {
  Rng rng(1);
  const DilationCertificate c = stinespring_dilate(random_cp_map(FdCStarAlgebra({2, 1}), 2, 2, rng));
  const std::string a = write_json("conj_a.json", dio::to_json(c.rep));
  const std::string b = write_json("conj_b.json", dio::to_json(conjugate(c.rep, random_unitary(c.dim(), rng))));
  const CliRun r = run("purify " + a + " " + b);
  ASSERT_EQ(r.code, 0) << r.err;
  const PurificationResult p = dio::purification_from_json(dio::parse_text(r.out));
  EXPECT_LE(p.unitarity_residual, 1e-9);
  EXPECT_LE(p.anchor_residual, 1e-9);
  EXPECT_LE(p.intertwining_residual, 1e-9);
  EXPECT_EQ(run("purify " + a + " " + a).code, 0);
}

TEST(CliPurify, MixedWitness) {
  const DilationPair p = mixed_witness_pair();
  const std::string a = write_json("mixed_a.json", dio::to_json(p.rep1));
  const std::string b = write_json("mixed_b.json", dio::to_json(p.rep2));
  EXPECT_EQ(run("purify " + a + " " + b).code, 5);
  const CliRun r = run("purify " + a + " " + b + " --allow-inequivalent");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(dio::parse_text(r.out)["label"], "mixed");
}

TEST(CliPurify, RestrictionMismatch) {
  Rng rng(2);
  const auto c1 = stinespring_dilate(random_cp_map(FdCStarAlgebra({2}), 1, 1, rng));
  const auto c2 = stinespring_dilate(random_cp_map(FdCStarAlgebra({2}), 1, 1, rng));
  const std::string a = write_json("mm_a.json", dio::to_json(c1.rep));
  const std::string b = write_json("mm_b.json", dio::to_json(c2.rep));
  EXPECT_EQ(run("purify " + a + " " + b).code, 4);
}

TEST(CliLaws, DefaultPasses) {
  const CliRun r = run("laws");
  ASSERT_EQ(r.code, 0) << r.err;
  const dio::json j = dio::parse_text(r.out);
  EXPECT_EQ(j["type"], "LawReport");
  EXPECT_TRUE(j["pass"].get<bool>());
  for (const auto& c : j["negative_controls"]) EXPECT_TRUE(c["failed_as_expected"].get<bool>()) << c["name"];
}

TEST(CliLaws, ExtremeToleranceFails) {
  const CliRun r = run("laws --draws 10 --tol 1e-30");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("law failed"), std::string::npos);
}

TEST(CliLaws, ZeroDraws) {
  const CliRun r = run("laws --draws 0");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
}

TEST(CliRandom, ByteIdentical) {
  const CliRun a = run("random --seed 42 --blocks 2,1 --k 3 --kraus-rank 2");
  const CliRun b = run("random --seed 42 --blocks 2,1 --k 3 --kraus-rank 2");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, run("random --seed 43 --blocks 2,1 --k 3 --kraus-rank 2").out);
}

TEST(CliRandom, UnitalFlag) {
  const CliRun r = run("random --seed 3 --blocks 2,2 --k 2 --kraus-rank 2 --unital");
  ASSERT_EQ(r.code, 0) << r.err;
  const OcpMap phi = dio::load_ocp_map(dio::parse_text(r.out));
  EXPECT_TRUE(is_unital(phi));
  EXPECT_TRUE(is_completely_positive(phi));
}

TEST(CliRandom, ImpossibleParameters) {
  EXPECT_EQ(run("random --blocks 1 --k 2 --kraus-rank 1 --unital").code, 3);
  EXPECT_EQ(run("random --blocks 0").code, 3);
  EXPECT_EQ(run("random --k 0").code, 3);
}
