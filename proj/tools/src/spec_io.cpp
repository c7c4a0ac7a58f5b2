#include "wflowcli/spec_io.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "wflow/algebra.hpp"

namespace wflow::cli {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw InputError("spec." + path + ": " + what);
}

const Json& require_field(const Json& doc, const std::string& key) {
  if (!doc.contains(key)) field_error(key, "missing required field");
  return doc.at(key);
}

int read_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) field_error(path, "expected an integer");
  return j.get<int>();
}

double read_number(const Json& j, const std::string& path) {
  if (!j.is_number()) field_error(path, "expected a number");
  return j.get<double>();
}

std::vector<int> read_int_list(const Json& j, const std::string& path) {
  if (!j.is_array()) field_error(path, "expected an array of integers");
  std::vector<int> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(read_int(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

CMatrix read_matrix(const Json& j, int d, const std::string& path) {
  if (!j.is_array() || static_cast<int>(j.size()) != d)
    field_error(path, "expected " + std::to_string(d) + " rows");
  CMatrix m(d, d);
  for (int r = 0; r < d; ++r) {
    const Json& row = j[r];
    const std::string rpath = path + "[" + std::to_string(r) + "]";
    if (!row.is_array() || static_cast<int>(row.size()) != d)
      field_error(rpath, "expected " + std::to_string(d) + " entries");
    for (int c = 0; c < d; ++c) {
      const Json& e = row[c];
      const std::string epath = rpath + "[" + std::to_string(c) + "]";
      if (!e.is_array() || e.size() != 2) field_error(epath, "expected an [re, im] pair");
      m(r, c) = Complex(read_number(e[0], epath + "[0]"), read_number(e[1], epath + "[1]"));
    }
  }
  return m;
}

Json matrix_to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<CMatrix> matrix_units(int d) {
  std::vector<CMatrix> units;
  units.reserve(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      CMatrix e = CMatrix::Zero(d, d);
      e(i, j) = 1.0;
      units.push_back(std::move(e));
    }
  return units;
}

}  // namespace

SystemSpec parse_spec(const Json& doc) {
  if (!doc.is_object()) throw InputError("spec: document must be a JSON object");
  SystemSpec s;
  if (doc.contains("version")) {
    s.version = read_int(doc.at("version"), "version");
    if (s.version != 1) field_error("version", "unsupported version " + std::to_string(s.version));
  }
  if (doc.contains("kind")) {
    s.kind = doc.at("kind").is_string() ? doc.at("kind").get<std::string>() : "";
    if (s.kind != "system" && s.kind != "algebra")
      field_error("kind", "expected \"system\" or \"algebra\"");
  }
  if (doc.contains("name") && doc.at("name").is_string()) s.name = doc.at("name").get<std::string>();

  s.dimension = read_int(require_field(doc, "dimension"), "dimension");
  if (s.dimension < 1) field_error("dimension", "must be at least 1");

  if (s.kind == "system") {
    s.weights = read_int_list(require_field(doc, "weights"), "weights");
    if (static_cast<int>(s.weights.size()) != s.dimension)
      field_error("weights", "expected " + std::to_string(s.dimension) + " entries, got " +
                                 std::to_string(s.weights.size()));
  } else if (doc.contains("weights")) {
    s.weights = read_int_list(doc.at("weights"), "weights");
    if (!s.weights.empty() && static_cast<int>(s.weights.size()) != s.dimension)
      field_error("weights", "expected " + std::to_string(s.dimension) + " entries");
  }

  const Json& gens = require_field(doc, "generators");
  if (!gens.is_array() || gens.empty()) field_error("generators", "expected a nonempty array");
  for (std::size_t i = 0; i < gens.size(); ++i)
    s.generators.push_back(read_matrix(gens[i], s.dimension, "generators[" + std::to_string(i) + "]"));

  if (doc.contains("include_adjoints")) {
    if (!doc.at("include_adjoints").is_boolean()) field_error("include_adjoints", "expected a boolean");
    s.include_adjoints = doc.at("include_adjoints").get<bool>();
  }
  if (doc.contains("include_unit")) {
    if (!doc.at("include_unit").is_boolean()) field_error("include_unit", "expected a boolean");
    s.include_unit = doc.at("include_unit").get<bool>();
  }
  if (doc.contains("state_density"))
    s.state_density = read_matrix(doc.at("state_density"), s.dimension, "state_density");
  if (doc.contains("tolerances")) {
    const Json& t = doc.at("tolerances");
    if (!t.is_object()) field_error("tolerances", "expected an object");
    if (t.contains("rank_tol")) s.tol.rank_tol = read_number(t.at("rank_tol"), "tolerances.rank_tol");
    if (t.contains("subspace_tol"))
      s.tol.subspace_tol = read_number(t.at("subspace_tol"), "tolerances.subspace_tol");
    if (t.contains("residual_tol"))
      s.tol.residual_tol = read_number(t.at("residual_tol"), "tolerances.residual_tol");
    s.tol.validate();
  }
  if (doc.contains("seed")) {
    const Json& j = doc.at("seed");
    if (!j.is_number_unsigned() && !j.is_number_integer()) field_error("seed", "expected an integer");
    if (j.is_number_integer() && j.get<std::int64_t>() < 0) field_error("seed", "must be nonnegative");
    s.seed = j.get<std::uint64_t>();
  }
  if (doc.contains("expected")) {
    if (!doc.at("expected").is_object()) field_error("expected", "expected an object");
    s.expected = doc.at("expected");
  }
  return s;
}

SystemSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("spec file not found or unreadable: " + path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError(std::string("spec parse error: ") + e.what());
  }
  SystemSpec s = parse_spec(doc);
  apply_env_tolerance(s);
  return s;
}

std::string save_spec(const SystemSpec& spec) {
  Json doc;
  doc["version"] = spec.version;
  doc["kind"] = spec.kind;
  doc["name"] = spec.name;
  doc["dimension"] = spec.dimension;
  if (!spec.weights.empty()) doc["weights"] = spec.weights;
  doc["generators"] = Json::array();
  for (const auto& g : spec.generators) doc["generators"].push_back(matrix_to_json(g));
  doc["include_adjoints"] = spec.include_adjoints;
  doc["include_unit"] = spec.include_unit;
  if (spec.state_density) doc["state_density"] = matrix_to_json(*spec.state_density);
  doc["tolerances"] = {{"rank_tol", spec.tol.rank_tol},
                       {"subspace_tol", spec.tol.subspace_tol},
                       {"residual_tol", spec.tol.residual_tol}};
  doc["seed"] = spec.seed;
  if (spec.expected.is_object() && !spec.expected.empty()) doc["expected"] = spec.expected;
  return doc.dump(2) + "\n";
}

void write_spec(const SystemSpec& spec, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open output file: " + path);
  out << save_spec(spec);
  if (!out) throw InputError("failed writing output file: " + path);
}

namespace {

SystemSpec make_full3() {
  SystemSpec s;
  s.kind = "system";
  s.name = "full3";
  s.dimension = 3;
  s.weights = {0, 1, 2};
  s.generators = matrix_units(3);
  s.expected = {{"mplus_dim", 6},
                {"verdict", "reflexive"},
                {"spectrum_dims", {1, 2, 3, 2, 1}}};
  return s;
}

SystemSpec make_nest(const ExampleParams& p) {
  NestExample ex = nest_example(p.blocks, p.block_weights, Tolerances{});
  SystemSpec s;
  s.kind = "system";
  s.name = "nest";
  s.dimension = ex.sys.matrix_dim();
  s.weights = ex.weight_vector;
  s.generators = matrix_units(s.dimension);
  s.expected = {{"mplus_dim", ex.expected_mplus_dim}, {"verdict", "reflexive"}};
  return s;
}

SystemSpec make_jordan4() {
  SystemSpec s;
  s.kind = "algebra";
  s.name = "jordan4";
  s.dimension = 4;
  CMatrix j = CMatrix::Zero(4, 4);
  for (int i = 0; i + 1 < 4; ++i) j(i, i + 1) = 1.0;
  s.generators = {j};
  s.include_adjoints = false;
  s.include_unit = true;
  s.expected = {{"input_dim", 4}, {"closure_dim", 10}, {"verdict", "non_reflexive"}};
  return s;
}

SystemSpec make_random(const ExampleParams& p) {
  if (p.dimension < 1 || p.dimension > 6)
    throw InputError("random example: dimension must be between 1 and 6");
  const int d = p.dimension;
  SystemSpec s;
  s.kind = "system";
  s.name = "random";
  s.dimension = d;
  s.seed = p.seed;

  Rng rng(mix_seed(p.seed, 0x5eedf10bULL));
  std::uniform_int_distribution<int> wdist(-2, 2);
  s.weights.resize(d);
  for (int i = 0; i < d; ++i) s.weights[i] = wdist(rng);
  // A constant weight vector makes the action trivial and every matrix
  // grade zero; nudge one entry so larger systems keep a real grading.
  if (d >= 2 && std::all_of(s.weights.begin(), s.weights.end(),
                            [&](int w) { return w == s.weights[0]; }))
    s.weights[d - 1] = s.weights[d - 1] == 2 ? 1 : s.weights[d - 1] + 1;

  // Generators: the largest homogeneous components of seeded dense
  // matrices. Homogeneous generators keep the generated algebra invariant
  // under the weight flow by construction.
  const int num_dense = 2;
  for (int t = 0; t < num_dense; ++t) {
    CMatrix x = random_matrix(rng, d, d);
    std::map<int, CMatrix> comps;
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) {
        const int n = s.weights[r] - s.weights[c];
        auto it = comps.find(n);
        if (it == comps.end()) it = comps.emplace(n, CMatrix::Zero(d, d)).first;
        it->second(r, c) = x(r, c);
      }
    std::vector<std::pair<double, CMatrix>> ranked;
    for (auto& [n, m] : comps) ranked.emplace_back(m.norm(), std::move(m));
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    const std::size_t keep = std::min<std::size_t>(3, ranked.size());
    for (std::size_t i = 0; i < keep; ++i)
      if (ranked[i].first > 1e-3) s.generators.push_back(ranked[i].second / ranked[i].first);
  }
  if (s.generators.empty()) {
    CMatrix e = CMatrix::Zero(d, d);
    e(0, 0) = 1.0;
    s.generators.push_back(std::move(e));
  }

  if (p.nontracial && d >= 2) {
    CMatrix x = random_matrix(rng, d, d);
    CMatrix rho = x * x.adjoint() + 0.3 * CMatrix::Identity(d, d);
    rho /= rho.trace().real();
    s.state_density = std::move(rho);
  }
  return s;
}

}  // namespace

SystemSpec make_example(const std::string& name, const ExampleParams& params) {
  SystemSpec s;
  if (name == "full3")
    s = make_full3();
  else if (name == "nest")
    s = make_nest(params);
  else if (name == "jordan4")
    s = make_jordan4();
  else if (name == "random")
    s = make_random(params);
  else
    throw InputError("unknown example \"" + name +
                     "\" (available: full3, nest, jordan4, random)");
  if (name != "random") s.seed = params.seed;
  apply_env_tolerance(s);
  return s;
}

WStarSystem build_system(const SystemSpec& spec) {
  if (spec.kind != "system")
    throw InputError("spec.kind: a dynamical-system input is required for this operation");
  StarAlgebra m = generate(spec.dimension, spec.generators, true, true, spec.tol);
  CircleAction action{spec.weights};
  return WStarSystem::build(m, action);
}

OperatorAlgebraCarrier build_carrier(const SystemSpec& spec) {
  StarAlgebra a = generate(spec.dimension, spec.generators, spec.include_adjoints,
                           spec.include_unit, spec.tol);
  if (!a.unital())
    throw InputError("spec.generators: the generated algebra does not contain the identity");
  return OperatorAlgebraCarrier::from_ops(spec.dimension, a.basis_matrices(), spec.tol);
}

void apply_env_tolerance(SystemSpec& spec) {
  const char* env = std::getenv("WFLOW_TOL");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  const double v = std::strtod(env, &end);
  if (end == env || *end != '\0' || !(v > 0.0) || !(v < 1.0))
    throw InputError("WFLOW_TOL: expected a number in (0, 1), got \"" + std::string(env) + "\"");
  spec.tol.residual_tol = v;
}

}  // namespace wflow::cli
