#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "wflow/flow.hpp"
#include "wflow/reflexivity.hpp"
#include "wflow/types.hpp"

namespace wflow::cli {

/// Serializable description of a verification input.
///
/// kind "system": weights + generators define a weighted-flow system; the
/// generated algebra is closed under adjoints and contains the identity.
/// kind "algebra": generators span a (possibly non-self-adjoint) unital
/// operator algebra with no flow attached; only the reflexivity suite
/// applies.
struct SystemSpec {
  int version = 1;
  std::string kind = "system";
  std::string name;
  int dimension = 0;
  std::vector<int> weights;
  std::vector<CMatrix> generators;
  bool include_adjoints = true;
  bool include_unit = true;
  std::optional<CMatrix> state_density;
  Tolerances tol;
  std::uint64_t seed = 0;
  /// Optional expected outcomes for control inputs (e.g. a known
  /// non-reflexive algebra); suites compare against these when present.
  nlohmann::ordered_json expected;
};

/// Parse and validate a spec document; errors carry the offending field path.
SystemSpec parse_spec(const nlohmann::ordered_json& doc);

/// Read a spec file. Applies the WFLOW_TOL environment override afterwards.
SystemSpec load_spec(const std::string& path);

/// Canonical serialization: stable field order and indentation, so
/// load -> save -> load -> save is byte-stable.
std::string save_spec(const SystemSpec& spec);
void write_spec(const SystemSpec& spec, const std::string& path);

struct ExampleParams {
  std::vector<int> blocks{2, 1, 1};
  std::vector<int> block_weights{3, 2, 1};
  int dimension = 4;
  std::uint64_t seed = 0;
  bool nontracial = false;
};

/// Built-in inputs: "full3", "nest", "jordan4", "random".
SystemSpec make_example(const std::string& name, const ExampleParams& params = {});

/// Instantiate a kind "system" spec.
WStarSystem build_system(const SystemSpec& spec);

/// Instantiate a kind "algebra" spec as a closure-engine carrier.
OperatorAlgebraCarrier build_carrier(const SystemSpec& spec);

/// Apply the WFLOW_TOL environment variable (if set) to residual_tol.
void apply_env_tolerance(SystemSpec& spec);

}  // namespace wflow::cli
