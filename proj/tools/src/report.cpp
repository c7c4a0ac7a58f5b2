#include "wflowcli/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace wflow::cli {

const char* to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::vacuous: return "vacuous";
    case Status::inconclusive: return "inconclusive";
  }
  return "unknown";
}

void Report::add(std::string anchor, Status status, double residual, std::string details) {
  records.push_back({std::move(anchor), status, residual, std::move(details)});
}

void Report::sort_records() {
  std::stable_sort(records.begin(), records.end(),
                   [](const CheckRecord& a, const CheckRecord& b) { return a.paper_anchor < b.paper_anchor; });
}

int Report::count(Status s) const {
  int n = 0;
  for (const auto& r : records)
    if (r.status == s) ++n;
  return n;
}

bool Report::pass() const { return count(Status::fail) == 0; }

namespace {

/// Shortest round-trip decimal form; nlohmann would do the same for a
/// double value, but going through a string keeps the exponent style
/// under our control rather than the library's.
std::string format_residual(double r) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", r);
  // Trim to the shortest representation that still round-trips.
  for (int prec = 1; prec <= 17; ++prec) {
    char probe[64];
    std::snprintf(probe, sizeof(probe), "%.*g", prec, r);
    double back = 0.0;
    std::sscanf(probe, "%lf", &back);
    if (back == r) return probe;
  }
  return buf;
}

}  // namespace

std::string Report::to_json() const {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["suite"] = suite;
  j["input"] = input_name;
  j["seed"] = seed;
  j["tolerances"] = {{"rank_tol", tol.rank_tol},
                     {"subspace_tol", tol.subspace_tol},
                     {"residual_tol", tol.residual_tol}};
  j["records"] = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json rec;
    rec["paper_anchor"] = r.paper_anchor;
    rec["status"] = to_string(r.status);
    rec["residual"] = nlohmann::ordered_json::parse(format_residual(r.residual));
    rec["details"] = r.details;
    j["records"].push_back(std::move(rec));
  }
  j["verdicts"] = {{"pass", count(Status::pass)},
                   {"fail", count(Status::fail)},
                   {"vacuous", count(Status::vacuous)},
                   {"inconclusive", count(Status::inconclusive)},
                   {"overall", pass() ? "pass" : "fail"}};
  return j.dump(2) + "\n";
}

std::string Report::to_text() const {
  std::ostringstream out;
  out << "suite: " << suite << "   input: " << input_name << "   seed: " << seed << "\n";
  out << "tolerances: rank " << tol.rank_tol << ", subspace " << tol.subspace_tol << ", residual "
      << tol.residual_tol << "\n";
  std::size_t width = 12;
  for (const auto& r : records) width = std::max(width, r.paper_anchor.size());
  out << std::string(width + 38, '-') << "\n";
  for (const auto& r : records) {
    char line[256];
    std::snprintf(line, sizeof(line), "%-*s  %-12s  %10.3e  ", static_cast<int>(width),
                  r.paper_anchor.c_str(), to_string(r.status), r.residual);
    out << line << r.details << "\n";
  }
  out << std::string(width + 38, '-') << "\n";
  out << "pass " << count(Status::pass) << ", fail " << count(Status::fail) << ", vacuous "
      << count(Status::vacuous) << ", inconclusive " << count(Status::inconclusive) << " -> "
      << (pass() ? "PASS" : "FAIL") << "\n";
  char wt[64];
  std::snprintf(wt, sizeof(wt), "wall time: %.3f s\n", wall_seconds);
  out << wt;
  return out.str();
}

}  // namespace wflow::cli
