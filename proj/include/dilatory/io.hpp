#pragma once

// JSON serialization, schema "dilatory/v1". Complex numbers are [re, im];
// matrices are {"rows", "cols", "data"} with data a row-major nested array.
// Every top-level document carries "schema", "type" and "basis_order".

#include "dilatory/suite.hpp"

#include "json.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace dilatory::io {

using json = nlohmann::json;

inline constexpr const char* kSchema = "dilatory/v1";
inline constexpr const char* kBasisOrder = "block-major,row-major";

[[noreturn]] inline void parse_fail(const std::string& what) { throw Error(ErrorKind::ParseError, what); }

inline const json& field(const json& j, const char* key) {
  if (!j.is_object()) parse_fail(std::string("expected an object holding \"") + key + "\"");
  const auto it = j.find(key);
  if (it == j.end()) parse_fail(std::string("missing field \"") + key + "\"");
  return *it;
}

inline double number(const json& j, const char* what) {
  if (!j.is_number()) parse_fail(std::string(what) + " must be a number");
  return j.get<double>();
}

inline int integer(const json& j, const char* what) {
  if (!j.is_number_integer()) parse_fail(std::string(what) + " must be an integer");
  return j.get<int>();
}

// ---- primitives ------------------------------------------------------------

inline json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) parse_fail("complex numbers are [re, im]");
  return {number(j[0], "real part"), number(j[1], "imaginary part")};
}

inline json to_json(const CMatrix& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(i, c)));
    data.push_back(std::move(row));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline CMatrix matrix_from_json(const json& j) {
  const int rows = integer(field(j, "rows"), "rows");
  const int cols = integer(field(j, "cols"), "cols");
  if (rows < 0 || cols < 0) parse_fail("negative matrix dimension");
  const json& data = field(j, "data");
  if (!data.is_array() || static_cast<int>(data.size()) != rows) parse_fail("matrix data must have \"rows\" rows");
  CMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (!data[i].is_array() || static_cast<int>(data[i].size()) != cols) parse_fail("matrix row has the wrong length");
    for (int c = 0; c < cols; ++c) m(i, c) = complex_from_json(data[i][c]);
  }
  return m;
}

inline json to_json(const RVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline RVector rvector_from_json(const json& j) {
  if (!j.is_array()) parse_fail("expected an array of reals");
  RVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], "spectrum entry");
  return v;
}

inline json matrices_to_json(const std::vector<CMatrix>& ms) {
  json a = json::array();
  for (const CMatrix& m : ms) a.push_back(to_json(m));
  return a;
}

inline std::vector<CMatrix> matrices_from_json(const json& j) {
  if (!j.is_array()) parse_fail("expected an array of matrices");
  std::vector<CMatrix> out;
  for (const json& m : j) out.push_back(matrix_from_json(m));
  return out;
}

inline json header(const char* type) { return {{"schema", kSchema}, {"type", type}, {"basis_order", kBasisOrder}}; }

// Top-level documents must declare the schema; "type" is checked when present.
inline void check_header(const json& j, const char* type) {
  if (!j.is_object()) parse_fail("document must be a JSON object");
  const auto s = j.find("schema");
  if (s == j.end() || !s->is_string() || *s != kSchema) parse_fail(std::string("expected \"schema\": \"") + kSchema + "\"");
  const auto t = j.find("type");
  if (t != j.end() && (!t->is_string() || *t != type)) parse_fail(std::string("expected \"type\": \"") + type + "\"");
  const auto b = j.find("basis_order");
  if (b != j.end() && (!b->is_string() || *b != kBasisOrder)) parse_fail("unsupported basis_order");
}

// Builds an object, turning shape failures into parse errors.
template <class F>
auto construct(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ShapeMismatch || e.kind() == ErrorKind::InvalidArgument) parse_fail(e.what());
    throw;
  } catch (const json::exception& e) {
    parse_fail(e.what());
  }
}

// ---- objects ---------------------------------------------------------------

inline json to_json(const FdCStarAlgebra& a) { return {{"blocks", a.blocks()}}; }

inline FdCStarAlgebra algebra_from_json(const json& j) {
  const json& b = field(j, "blocks");
  if (!b.is_array() || b.empty()) parse_fail("\"blocks\" must be a nonempty array");
  std::vector<int> blocks;
  for (const json& n : b) blocks.push_back(integer(n, "block size"));
  return construct([&] { return FdCStarAlgebra(blocks); });
}

inline json to_json(const AlgebraElement& e) { return matrices_to_json(e.blocks); }

inline AlgebraElement element_from_json(const FdCStarAlgebra& a, const json& j) {
  std::vector<CMatrix> blocks = matrices_from_json(j);
  return construct([&] { return AlgebraElement(a, blocks); });
}

inline json to_json(const OcpMap& phi) {
  json j = header("OcpMap");
  j["domain"] = to_json(phi.domain);
  j["k"] = phi.k;
  j["basis_images"] = matrices_to_json(phi.basis_images);
  return j;
}

inline OcpMap ocp_map_from_json(const json& j, const FdCStarAlgebra* domain = nullptr) {
  const FdCStarAlgebra a = domain ? *domain : algebra_from_json(field(j, "domain"));
  const int k = integer(field(j, "k"), "k");
  std::vector<CMatrix> images = matrices_from_json(field(j, "basis_images"));
  return construct([&] { return OcpMap(a, k, images); });
}

inline json to_json(const StarHom& f) {
  json j = header("StarHom");
  j["source"] = to_json(f.source);
  j["target"] = to_json(f.target);
  json images = json::array();
  for (const AlgebraElement& e : f.basis_images) images.push_back(to_json(e));
  j["basis_images"] = std::move(images);
  return j;
}

inline StarHom star_hom_from_json(const json& j) {
  const FdCStarAlgebra src = algebra_from_json(field(j, "source"));
  const FdCStarAlgebra dst = algebra_from_json(field(j, "target"));
  const json& imgs = field(j, "basis_images");
  if (!imgs.is_array()) parse_fail("\"basis_images\" must be an array");
  std::vector<AlgebraElement> images;
  for (const json& e : imgs) images.push_back(element_from_json(dst, e));
  return construct([&] { return StarHom(src, dst, images); });
}

inline json to_json(const AnchoredRep& rep) {
  json j = header("AnchoredRep");
  j["domain"] = to_json(rep.algebra);
  j["k"] = rep.k;
  j["h"] = rep.h;
  j["pi_images"] = matrices_to_json(rep.pi_images);
  j["V"] = to_json(rep.V);
  return j;
}

inline AnchoredRep anchored_rep_from_json(const json& j) {
  const FdCStarAlgebra a = algebra_from_json(field(j, "domain"));
  std::vector<CMatrix> images = matrices_from_json(field(j, "pi_images"));
  const CMatrix v = matrix_from_json(field(j, "V"));
  AnchoredRep rep = construct([&] { return AnchoredRep(a, images, v); });
  if (j.contains("k") && integer(j["k"], "k") != rep.k) parse_fail("\"k\" disagrees with the columns of V");
  if (j.contains("h") && integer(j["h"], "h") != rep.h) parse_fail("\"h\" disagrees with the rows of V");
  return rep;
}

inline json to_json(const Tolerance& t) { return {{"eps_rank", t.eps_rank}, {"eps_eq", t.eps_eq}}; }

inline Tolerance tolerance_from_json(const json& j) {
  return Tolerance{number(field(j, "eps_rank"), "eps_rank"), number(field(j, "eps_eq"), "eps_eq")};
}

inline json to_json(const DilationCertificate& c) {
  json j = header("DilationCertificate");
  j["d"] = c.dim();
  j["map"] = to_json(c.map);
  j["rep"] = to_json(c.rep);
  j["Q"] = to_json(c.Q);
  j["Q_pinv"] = to_json(c.Q_pinv);
  j["gram_eigenvalues"] = to_json(c.gram_eigenvalues);
  j["tolerance"] = to_json(c.tol);
  j["rank_instability"] = c.rank_instability;
  json r = {{"factorization", c.residuals.factorization},
            {"well_definedness", c.residuals.well_definedness},
            {"multiplicativity", c.residuals.multiplicativity}};
  r["isometry"] = c.residuals.isometry ? json(*c.residuals.isometry) : json(nullptr);
  j["residuals"] = std::move(r);
  return j;
}

inline DilationCertificate certificate_from_json(const json& j) {
  check_header(j, "DilationCertificate");
  DilationCertificate c;
  c.map = ocp_map_from_json(field(j, "map"));
  c.rep = anchored_rep_from_json(field(j, "rep"));
  c.Q = matrix_from_json(field(j, "Q"));
  c.Q_pinv = matrix_from_json(field(j, "Q_pinv"));
  c.gram_eigenvalues = rvector_from_json(field(j, "gram_eigenvalues"));
  c.tol = tolerance_from_json(field(j, "tolerance"));
  const json& ri = field(j, "rank_instability");
  if (!ri.is_boolean()) parse_fail("\"rank_instability\" must be a boolean");
  c.rank_instability = ri.get<bool>();
  const json& r = field(j, "residuals");
  c.residuals.factorization = number(field(r, "factorization"), "factorization");
  c.residuals.well_definedness = number(field(r, "well_definedness"), "well_definedness");
  c.residuals.multiplicativity = number(field(r, "multiplicativity"), "multiplicativity");
  if (r.contains("isometry") && !r["isometry"].is_null()) c.residuals.isometry = number(r["isometry"], "isometry");
  if (c.Q.rows() != c.rep.h || c.Q.cols() != c.map.domain.dim() * c.map.k) parse_fail("Q has the wrong shape");
  if (c.Q_pinv.rows() != c.Q.cols() || c.Q_pinv.cols() != c.Q.rows()) parse_fail("Q_pinv has the wrong shape");
  if (j.contains("d") && integer(j["d"], "d") != c.dim()) parse_fail("\"d\" disagrees with Q");
  return c;
}

inline json to_json(const LawReport& r) {
  json j = {{"law", r.law}, {"pass", r.pass}, {"witnesses", r.witnesses}};
  j["max_residual"] = std::isfinite(r.max_residual) ? json(r.max_residual) : json("inf");
  return j;
}

inline LawReport law_report_from_json(const json& j) {
  LawReport r;
  r.law = field(j, "law").get<std::string>();
  const json& res = field(j, "max_residual");
  r.max_residual = res.is_string() ? std::numeric_limits<double>::infinity() : number(res, "max_residual");
  r.pass = field(j, "pass").get<bool>();
  r.witnesses = field(j, "witnesses").get<std::vector<std::string>>();
  return r;
}

inline json to_json(const SuiteReport& s) {
  json j = header("LawReport");
  j["pass"] = s.ok();
  j["rank_instability"] = s.rank_instability;
  json laws = json::array();
  double worst = 0.0;
  for (const LawReport& r : s.laws) {
    laws.push_back(to_json(r));
    worst = std::max(worst, r.max_residual);
  }
  j["max_residual"] = std::isfinite(worst) ? json(worst) : json("inf");
  j["laws"] = std::move(laws);
  json controls = json::array();
  for (const NegativeControl& c : s.controls) {
    controls.push_back({{"name", c.name},
                        {"residual", std::isfinite(c.residual) ? json(c.residual) : json("inf")},
                        {"failed_as_expected", c.failed}});
  }
  j["negative_controls"] = std::move(controls);
  j["warnings"] = s.warnings;
  return j;
}

inline json to_json(const PurificationResult& p) {
  json j = header("PurificationResult");
  j["U"] = to_json(p.U);
  j["label"] = p.label;
  j["verified"] = p.verified;
  j["source_multiplicities"] = p.source_multiplicities;
  j["target_multiplicities"] = p.target_multiplicities;
  j["connecting"] = to_json(p.connecting);
  j["residuals"] = {{"unitarity", p.unitarity_residual},         {"isometry", p.isometry_residual},
                    {"coisometry", p.coisometry_residual},       {"anchor", p.anchor_residual},
                    {"intertwining", p.intertwining_residual}};
  return j;
}

inline PurificationResult purification_from_json(const json& j) {
  check_header(j, "PurificationResult");
  PurificationResult p;
  p.U = matrix_from_json(field(j, "U"));
  p.label = field(j, "label").get<std::string>();
  p.verified = field(j, "verified").get<bool>();
  p.source_multiplicities = field(j, "source_multiplicities").get<std::vector<int>>();
  p.target_multiplicities = field(j, "target_multiplicities").get<std::vector<int>>();
  p.connecting = matrix_from_json(field(j, "connecting"));
  const json& r = field(j, "residuals");
  p.unitarity_residual = number(field(r, "unitarity"), "unitarity");
  p.isometry_residual = number(field(r, "isometry"), "isometry");
  p.coisometry_residual = number(field(r, "coisometry"), "coisometry");
  p.anchor_residual = number(field(r, "anchor"), "anchor");
  p.intertwining_residual = number(field(r, "intertwining"), "intertwining");
  return p;
}

// ---- top-level loaders -----------------------------------------------------

inline json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    parse_fail(std::string("malformed JSON: ") + e.what());
  }
}

inline json read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) parse_fail("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return parse_text(s.str());
}

inline OcpMap load_ocp_map(const json& j) {
  check_header(j, "OcpMap");
  return ocp_map_from_json(j);
}

inline AnchoredRep load_anchored_rep(const json& j) {
  check_header(j, "AnchoredRep");
  return anchored_rep_from_json(j);
}

// ---- instance bundles ------------------------------------------------------

// A self-contained scenario. Maps, homs and reps refer to algebras by name
// ("domain": "A") or inline; every object passes its validity gate on load.
struct InstanceBundle {
  std::map<std::string, FdCStarAlgebra> algebras;
  std::map<std::string, OcpMap> maps;
  std::map<std::string, StarHom> homs;
  std::map<std::string, AnchoredRep> reps;
  std::uint64_t seed = 0;
  Tolerance tol{};
};

inline json to_json(const InstanceBundle& b) {
  json j = header("InstanceBundle");
  j["seed"] = b.seed;
  j["tolerance"] = to_json(b.tol);
  json algebras = json::object(), maps = json::object(), homs = json::object(), reps = json::object();
  for (const auto& [name, a] : b.algebras) algebras[name] = to_json(a);
  for (const auto& [name, m] : b.maps) maps[name] = to_json(m);
  for (const auto& [name, h] : b.homs) homs[name] = to_json(h);
  for (const auto& [name, r] : b.reps) reps[name] = to_json(r);
  j["algebras"] = std::move(algebras);
  j["maps"] = std::move(maps);
  j["homs"] = std::move(homs);
  j["reps"] = std::move(reps);
  return j;
}

namespace detail {

inline json resolve(const json& obj, const std::map<std::string, FdCStarAlgebra>& algebras, std::initializer_list<const char*> keys) {
  json out = obj;
  for (const char* key : keys) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) continue;
    const auto a = algebras.find(it->get<std::string>());
    if (a == algebras.end()) parse_fail("unresolved algebra reference \"" + it->get<std::string>() + "\"");
    out[key] = to_json(a->second);
  }
  return out;
}

inline const json& section(const json& j, const char* key) {
  static const json empty = json::object();
  const auto it = j.find(key);
  if (it == j.end()) return empty;
  if (!it->is_object()) parse_fail(std::string("\"") + key + "\" must be an object keyed by name");
  return *it;
}

}  // namespace detail

inline InstanceBundle load_bundle(const json& j) {
  check_header(j, "InstanceBundle");
  InstanceBundle b;
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) parse_fail("\"seed\" must be a non-negative integer");
    b.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("tolerance")) b.tol = tolerance_from_json(j["tolerance"]);
  for (const auto& [name, a] : detail::section(j, "algebras").items()) b.algebras.emplace(name, algebra_from_json(a));
  for (const auto& [name, m] : detail::section(j, "maps").items()) {
    OcpMap phi = ocp_map_from_json(detail::resolve(m, b.algebras, {"domain"}));
    const CpReport cp = is_completely_positive(phi, b.tol);
    if (!cp) parse_fail("map \"" + name + "\" is not completely positive (Choi min eigenvalue " + std::to_string(cp.min_eigenvalue()) + ")");
    b.maps.emplace(name, std::move(phi));
  }
  for (const auto& [name, h] : detail::section(j, "homs").items()) {
    StarHom f = star_hom_from_json(detail::resolve(h, b.algebras, {"source", "target"}));
    const HomReport hr = check_star_hom(f, b.tol);
    if (!hr.ok()) parse_fail("hom \"" + name + "\" is not a unital *-homomorphism (residual " + std::to_string(hr.max_residual()) + ")");
    b.homs.emplace(name, std::move(f));
  }
  for (const auto& [name, r] : detail::section(j, "reps").items()) {
    AnchoredRep rep = anchored_rep_from_json(detail::resolve(r, b.algebras, {"domain"}));
    const HomReport hr = check_rep(rep, b.tol);
    if (!hr.ok()) parse_fail("rep \"" + name + "\" is not a unital *-representation (residual " + std::to_string(hr.max_residual()) + ")");
    b.reps.emplace(name, std::move(rep));
  }
  return b;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace dilatory::io
