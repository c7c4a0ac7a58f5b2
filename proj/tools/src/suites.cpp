#include "wflowcli/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <optional>
#include <sstream>

#include "wflow/gns.hpp"
#include "wflow/hardy.hpp"
#include "wflow/reflexivity.hpp"

namespace wflow::cli {

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), pattern, v);
  return buf;
}

bool is_vacuous_note(const std::string& note) { return note.rfind("vacuous", 0) == 0; }

Status status_of(const CheckItem& item) {
  if (is_vacuous_note(item.note)) return Status::vacuous;
  return item.pass ? Status::pass : Status::fail;
}

void add_item(Report& report, const CheckItem& item) {
  report.add(item.anchor, status_of(item), item.residual, item.note);
}

// ---------------------------------------------------------------------------
// identities

void run_identities(const GnsRealization& g, Report& report) {
  const IdentityReport ir = verify_standard_identities(g);
  for (const auto& item : ir.items) add_item(report, item);
}

// ---------------------------------------------------------------------------
// hardy

void run_hardy(const WStarSystem& sys, const GnsRealization& g, const HardyStructure& h,
               std::uint64_t seed, Report& report) {
  const auto& tol = sys.tol();

  // Grading accounting on H+ and M+.
  int hplus_expected = 0;
  for (const auto& [grade, coords] : g.h_blocks())
    if (grade >= 0) hplus_expected += static_cast<int>(coords.size());
  int mplus_expected = 0;
  for (const auto& block : sys.blocks())
    if (block.n >= 0) mplus_expected += block.sub.dimension();
  {
    const int got = h.hplus.dimension();
    report.add("Sec 3 H+ grading", got == hplus_expected ? Status::pass : Status::fail,
               std::abs(got - hplus_expected),
               "dim H+ = " + std::to_string(got) + ", sum of nonnegative-grade blocks = " +
                   std::to_string(hplus_expected));
  }
  {
    const int got = h.mplus.size();
    report.add("Sec 3 M+ dimension", got == mplus_expected ? Status::pass : Status::fail,
               std::abs(got - mplus_expected),
               "dim M+ = " + std::to_string(got) + ", sum of nonnegative-grade components = " +
                   std::to_string(mplus_expected) + " (compression injective)");
  }

  // The compressed algebra is multiplicatively closed.
  {
    double worst = 0.0;
    for (const auto& a : h.mplus_ops)
      for (const auto& b : h.mplus_ops) {
        double r = 0.0;
        static_cast<void>(h.mplus.contains(a * b, &r));
        worst = std::max(worst, r);
      }
    report.add("Sec 3 M+ closure", worst <= 10 * tol.residual_tol ? Status::pass : Status::fail,
               worst, "max product-membership residual over the compressed basis");
  }

  const std::optional<int> n0 = min_positive_spectrum(sys);
  if (n0.has_value()) {
    report.add("Prop 7 n0", Status::pass, 0.0,
               "least positive spectral value n0 = " + std::to_string(*n0));
  } else {
    report.add("Prop 7 n0", Status::vacuous, 0.0, "vacuous (no positive spectral value)");
  }

  // Shift-type compression of a grade-n0 element: S* annihilates the
  // grades below n0, S raises grades by exactly n0.
  if (n0.has_value()) {
    const CMatrix v = sys.spectral_basis_matrices(*n0).front();
    const CompressionShift cs = compression_shift(h, v, *n0);
    double worst = cs.adjoint_residual;
    const int p = static_cast<int>(h.plus_coords.size());
    for (int col = 0; col < p; ++col) {
      if (h.plus_grades[col] < *n0) worst = std::max(worst, cs.s_adjoint.col(col).norm());
      for (int row = 0; row < p; ++row)
        if (h.plus_grades[row] != h.plus_grades[col] + *n0)
          worst = std::max(worst, std::abs(cs.s(row, col)));
    }
    report.add("Thm 8 shift", worst <= 10 * tol.residual_tol ? Status::pass : Status::fail, worst,
               "adjoint identity, low-grade annihilation, and grade raising for a grade-" +
                   std::to_string(*n0) + " shift");
  } else {
    report.add("Thm 8 shift", Status::vacuous, 0.0, "vacuous (no positive spectral value)");
  }

  // Adjoints of compressed left and right operators of positive grade
  // commute, because the uncompressed operators do and the cut paths pass
  // through negative grades only.
  {
    double worst = -1.0;
    for (const auto& block : sys.blocks()) {
      if (block.n <= 0) continue;
      const auto basis = sys.spectral_basis_matrices(block.n);
      const std::size_t cap = std::min<std::size_t>(2, basis.size());
      for (std::size_t i = 0; i < cap; ++i)
        for (std::size_t j = 0; j < cap; ++j) {
          const CMatrix a = h.compress(g.rep(basis[i]));
          const CMatrix b = h.compress(g.commutant_rep(basis[j]));
          const CMatrix lhs = a.adjoint() * b.adjoint();
          const CMatrix rhs = b.adjoint() * a.adjoint();
          worst = std::max(worst, (lhs - rhs).norm());
        }
    }
    if (worst < 0.0)
      report.add("Thm 8 adjoint commutation", Status::vacuous, 0.0,
                 "vacuous (no positive spectral value)");
    else
      report.add("Thm 8 adjoint commutation",
                 worst <= 10 * tol.residual_tol ? Status::pass : Status::fail, worst,
                 "compressed left/right adjoints of positive grade commute");
  }

  // Corner extraction: in finite dimension the normal-partial-isometry
  // hypothesis is always absent, so the terminal identity is not asserted.
  if (arveson_spectrum(sys).size() <= 1) {
    report.add("Thm 13 terminal identity", Status::vacuous, 0.0, "vacuous (trivial action)");
  } else {
    const CornerDecomposition cd = corner_decomposition(sys, h, seed);
    for (const auto& item : cd.certificates) {
      Status st = status_of(item);
      std::string note = item.note;
      if (!item.pass && cd.hypothesis_absent && item.anchor == "Thm 13 terminal identity") {
        st = Status::vacuous;
        note = "hypothesis absent (no normal partial isometries available); conclusion not asserted";
      }
      report.add(item.anchor, st, item.residual, note);
    }
  }
}

// ---------------------------------------------------------------------------
// reflexivity

void add_closure_records(const ReflexivityReport& rr, const SystemSpec& spec,
                         const std::string& anchor, Report& report) {
  Status st = Status::inconclusive;
  if (rr.verdict == Verdict::reflexive) st = Status::pass;
  if (rr.verdict == Verdict::non_reflexive) st = Status::fail;
  std::string details = std::string("verdict ") + to_string(rr.verdict) + ": algebra dim " +
                        std::to_string(rr.input_dim) + ", closure dim " +
                        std::to_string(rr.closure_dim) + ", " + std::to_string(rr.samples_used) +
                        " samples";

  if (spec.expected.is_object() && spec.expected.contains("verdict")) {
    // Control input with a known outcome: pass means "matched the
    // expectation", including expected non-reflexivity.
    const std::string want = spec.expected.at("verdict").get<std::string>();
    bool ok = want == to_string(rr.verdict);
    if (spec.expected.contains("closure_dim"))
      ok = ok && spec.expected.at("closure_dim").get<int>() == rr.closure_dim;
    if (spec.expected.contains("input_dim"))
      ok = ok && spec.expected.at("input_dim").get<int>() == rr.input_dim;
    if (spec.expected.contains("mplus_dim"))
      ok = ok && spec.expected.at("mplus_dim").get<int>() == rr.input_dim;
    report.add(anchor, ok ? Status::pass : Status::fail, rr.max_residual,
               details + "; expected " + want + " (control)");
  } else {
    report.add(anchor, st, rr.max_residual, details);
  }
}

void run_reflexivity_system(const HardyStructure& h, const SystemSpec& spec, Report& report) {
  SamplingPlan plan;
  plan.seed = spec.seed;
  const OperatorAlgebraCarrier carrier = mplus_carrier(h);
  const ReflexiveClosureResult res = reflexive_closure(carrier, plan);
  add_closure_records(res.report, spec, "Thm 5", report);

  const CommutantDualityReport dual = commutant_duality_check(h);
  add_item(report, dual.duality);
  report.add("Lemma 9 i", Status::vacuous, dual.diagnostic_distance,
             std::string("diagnostic only (finite-dimensional defect expected): relation ") +
                 to_string(dual.diagnostic_relation));

  const Lemma4Report l4 = lemma4_check(h, res.closure);
  const Status st = l4.vacuous ? Status::vacuous : (l4.pass ? Status::pass : Status::fail);
  std::string note = l4.vacuous ? "vacuous (no positive grade in the commutant spectrum)"
                                : std::to_string(l4.items.size()) +
                                      " polar parts checked against the closure basis";
  report.add("Lemma 4", st, l4.max_residual, note);
}

void run_reflexivity_algebra(const SystemSpec& spec, Report& report) {
  SamplingPlan plan;
  plan.seed = spec.seed;
  const OperatorAlgebraCarrier carrier = build_carrier(spec);
  const ReflexiveClosureResult res = reflexive_closure(carrier, plan);
  ReflexivityReport rr = res.report;
  add_closure_records(rr, spec, "Sec 1 algLat", report);
  if (!rr.witnesses.empty())
    report.add("Sec 1 witnesses", Status::pass, rr.max_residual,
               std::to_string(rr.witnesses.size()) +
                   " validated lattice-preserving directions outside the algebra");
}

// ---------------------------------------------------------------------------
// approximation

void run_approximation(std::uint64_t seed, Report& report) {
  // Closed-form anchor: two interpolation nodes at eps = 1/2 reproduce the
  // square of any unitary with error exactly 1/7 against the bound 1/3.
  {
    const CMatrix w = CMatrix::Identity(2, 2);
    const ApproxCertificate cert = power_approximation(w, 2, 0.5);
    const double r = std::abs(cert.achieved_error - 1.0 / 7.0);
    const double rb = std::abs(cert.bound - 1.0 / 3.0);
    report.add("Lemma 10", (r < 1e-9 && rb < 1e-9) ? Status::pass : Status::fail,
               std::max(r, rb),
               "anchor value: achieved_error = " + fmt("%.9f", cert.achieved_error) +
                   " (expected 1/7), bound = " + fmt("%.9f", cert.bound) + " (expected 1/3)");
  }

  // Coefficient grid: Vandermonde residuals and the Cramer bound.
  {
    double worst = 0.0;
    bool ok = true;
    int combos = 0;
    for (int n = 1; n <= 3; ++n)
      for (const double eps : {0.25, 0.5}) {
        const VandermondeCoefficients vc = vandermonde_coefficients(n, eps);
        worst = std::max(worst, vc.residual);
        ok = ok && vc.residual < 1e-9;
        for (const Complex& mu : vc.mus) ok = ok && std::abs(mu) <= vc.mu_bound + 1e-9;
        ++combos;
      }
    report.add("Lemma 10", ok ? Status::pass : Status::fail, worst,
               std::to_string(combos) +
                   " (n, eps) combinations: defining-system residual and coefficient bound");
  }

  // Certified unitary power approximation on seeded inputs.
  {
    Rng rng(mix_seed(seed, 0xa99c0deULL));
    double worst = 0.0;
    bool ok = true;
    int count = 0;
    for (int n = 1; n <= 3; ++n)
      for (const int size : {3, 5}) {
        const CMatrix w = random_unitary(rng, size);
        const ApproxCertificate cert = power_approximation(w, n, 0.5);
        ok = ok && cert.valid();
        worst = std::max(worst, std::max(0.0, cert.achieved_error - cert.bound));
        ++count;
      }
    report.add("Lemma 10", ok ? Status::pass : Status::fail, worst,
               std::to_string(count) + " seeded unitary certificates, error within bound");
  }

  // Joint-eigenvector span rank for distinct contractive eigenvalue lists.
  {
    Rng rng(mix_seed(seed, 0xc0211aULL));
    bool ok = true;
    double worst = 0.0;
    const int big_n = 5;
    std::vector<Complex> lambdas;
    while (static_cast<int>(lambdas.size()) < big_n + 1) {
      const Complex z = 0.9 * random_complex(rng) / std::sqrt(2.0);
      if (std::abs(z) >= 1.0 || std::abs(z) < 1e-3) continue;
      bool dup = false;
      for (const Complex& l : lambdas) dup = dup || std::abs(l - z) < 1e-6;
      if (!dup) lambdas.push_back(z);
    }
    const int full = eigenvector_span_rank(lambdas, big_n);
    ok = ok && full == big_n + 1;
    worst = std::max(worst, std::abs(double(full - (big_n + 1))));
    std::vector<Complex> repeated = lambdas;
    repeated[1] = repeated[0];  // one collision drops the rank by one
    const int collapsed = eigenvector_span_rank(repeated, big_n);
    ok = ok && collapsed == big_n;
    worst = std::max(worst, std::abs(double(collapsed - big_n)));
    report.add("Cor 11", ok ? Status::pass : Status::fail, worst,
               "profile rank " + std::to_string(full) + "/" + std::to_string(big_n + 1) +
                   " for distinct values, " + std::to_string(collapsed) + " after one collision");
  }
}

// ---------------------------------------------------------------------------
// nogo

void run_nogo(const WStarSystem& sys, Report& report) {
  const NogoReport nr = nogo_report(sys);
  for (const auto& item : nr.items) add_item(report, item);
}

}  // namespace

bool is_known_suite(const std::string& suite) {
  return suite == "identities" || suite == "hardy" || suite == "reflexivity" ||
         suite == "approximation" || suite == "nogo" || suite == "all";
}

Report run_suite(const SystemSpec& spec, const std::string& suite) {
  if (!is_known_suite(suite))
    throw InputError("unknown suite \"" + suite +
                     "\" (available: identities, hardy, reflexivity, approximation, nogo, all)");

  const auto t0 = std::chrono::steady_clock::now();
  Report report;
  report.suite = suite;
  report.input_name = spec.name.empty() ? std::string("spec") : spec.name;
  report.seed = spec.seed;
  report.tol = spec.tol;

  const bool all = suite == "all";
  if (spec.kind == "algebra") {
    if (!all && suite != "reflexivity")
      throw InputError("suite \"" + suite +
                       "\" requires a dynamical-system input; an algebra-kind spec supports only "
                       "the reflexivity suite");
    run_reflexivity_algebra(spec, report);
  } else {
    const WStarSystem sys = build_system(spec);
    std::optional<GnsRealization> g;
    std::optional<HardyStructure> h;
    const auto realize = [&] {
      if (!g) {
        const State phi = canonical_state(sys, spec.state_density);
        g = GnsRealization::build(sys, phi);
        h = build_hardy(*g);
      }
    };
    if (all || suite == "identities") {
      realize();
      run_identities(*g, report);
    }
    if (all || suite == "hardy") {
      realize();
      run_hardy(sys, *g, *h, spec.seed, report);
    }
    if (all || suite == "reflexivity") {
      realize();
      run_reflexivity_system(*h, spec, report);
    }
    if (all || suite == "approximation") run_approximation(spec.seed, report);
    if (all || suite == "nogo") run_nogo(sys, report);
  }

  report.sort_records();
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

int exit_code(const Report& report) { return report.pass() ? 0 : 1; }

}  // namespace wflow::cli
