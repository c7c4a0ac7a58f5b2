#pragma once

#include <string>
#include <vector>

#include "wflow/types.hpp"

namespace wflow::cli {

enum class Status { pass, fail, vacuous, inconclusive };

const char* to_string(Status s);

/// One verification record, named by the statement anchor it tests.
struct CheckRecord {
  std::string paper_anchor;
  Status status = Status::fail;
  double residual = 0.0;
  std::string details;
};

struct Report {
  std::string suite;
  std::string input_name;
  std::uint64_t seed = 0;
  Tolerances tol;
  std::vector<CheckRecord> records;
  double wall_seconds = 0.0;  // text output only; never serialized to JSON

  void add(std::string anchor, Status status, double residual, std::string details);

  /// Stable sort by anchor; ties keep insertion order.
  void sort_records();

  [[nodiscard]] int count(Status s) const;
  [[nodiscard]] bool pass() const;  // no fail records

  /// Canonical machine form: stable field order, fixed indentation, no
  /// wall time, so identical runs serialize byte-identically.
  [[nodiscard]] std::string to_json() const;

  /// Human-readable table, wall time included.
  [[nodiscard]] std::string to_text() const;
};

}  // namespace wflow::cli
