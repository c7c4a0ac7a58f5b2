#include "wflow/hardy.hpp"

#include <algorithm>
#include <cmath>

namespace wflow {

namespace {

double operator_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

void require_unitary(const CMatrix& w, const Tolerances& tol, const char* where) {
  if (w.rows() != w.cols() || w.rows() == 0) {
    throw InputError(std::string(where) + ": square matrix required");
  }
  const CMatrix eye = CMatrix::Identity(w.rows(), w.cols());
  if ((w.adjoint() * w - eye).norm() > tol.residual_tol) {
    throw InputError(std::string(where) + ": matrix is not unitary");
  }
}

}  // namespace

CMatrix HardyStructure::compress(const CMatrix& op_on_h) const {
  const int hd = g.h_dim();
  if (op_on_h.rows() != hd || op_on_h.cols() != hd) {
    throw InputError("compress: operator shape does not match H");
  }
  const int p = plus_dim();
  CMatrix out(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) out(i, j) = op_on_h(plus_coords[i], plus_coords[j]);
  }
  return out;
}

CMatrix HardyStructure::expand(const CMatrix& op_on_hplus) const {
  const int p = plus_dim();
  if (op_on_hplus.rows() != p || op_on_hplus.cols() != p) {
    throw InputError("expand: operator shape does not match H+");
  }
  CMatrix out = CMatrix::Zero(g.h_dim(), g.h_dim());
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) out(plus_coords[i], plus_coords[j]) = op_on_hplus(i, j);
  }
  return out;
}

HardyStructure build_hardy(const GnsRealization& g) {
  HardyStructure h;
  h.g = g;
  const int hd = g.h_dim();
  const Tolerances& tol = g.tol();
  const WStarSystem& sys = g.system();

  for (int i = 0; i < hd; ++i) {
    if (g.u_weights()[i] >= 0) h.plus_coords.push_back(i);
  }
  const int p = h.plus_dim();
  CMatrix hplus_basis = CMatrix::Zero(hd, p);
  h.pplus = CMatrix::Zero(hd, hd);
  for (int i = 0; i < p; ++i) {
    hplus_basis(h.plus_coords[i], i) = 1.0;
    h.pplus(h.plus_coords[i], h.plus_coords[i]) = 1.0;
  }
  h.hplus = Subspace(hd, std::move(hplus_basis));

  const std::vector<CMatrix> basis = sys.algebra().basis_matrices();
  std::vector<CMatrix> full_reps;
  for (int i = 0; i < sys.size(); ++i) {
    if (sys.grade_of_basis(i) < 0) continue;
    h.mplus_preimage.push_back(basis[i]);
    h.plus_grades.push_back(sys.grade_of_basis(i));
  }
  const CMatrix qminus = CMatrix::Identity(hd, hd) - h.pplus;
  for (const CMatrix& b : h.mplus_preimage) {
    const CMatrix r = g.rep(b);
    const double leak = (qminus * r * h.pplus).norm();
    if (leak > tol.residual_tol * std::max(1.0, r.norm())) {
      throw InternalError("build_hardy: H+ is not invariant under a "
                          "nonnegative-grade element");
    }
    full_reps.push_back(r);
    h.mplus_ops.push_back(h.compress(r));
    h.mprime_plus_ops.push_back(h.compress(g.commutant_rep(b)));
  }

  h.mplus = StarAlgebra::from_span(p, h.mplus_ops, /*unital=*/true,
                                   /*star_closed=*/false, tol);
  h.mprime_plus = StarAlgebra::from_span(p, h.mprime_plus_ops, /*unital=*/true,
                                         /*star_closed=*/false, tol);
  const int expected = static_cast<int>(h.mplus_preimage.size());
  if (h.mplus.size() != expected || h.mprime_plus.size() != expected) {
    throw InternalError("build_hardy: compression failed to be injective");
  }

  // Multiplicativity of the compression, checked pairwise.
  for (std::size_t a = 0; a < full_reps.size(); ++a) {
    for (std::size_t b = 0; b < full_reps.size(); ++b) {
      const CMatrix lhs = h.mplus_ops[a] * h.mplus_ops[b];
      const CMatrix rhs = h.compress(full_reps[a] * full_reps[b]);
      if ((lhs - rhs).norm() > 10 * tol.residual_tol * std::max(1.0, rhs.norm())) {
        throw InternalError("build_hardy: compression is not multiplicative");
      }
    }
  }
  return h;
}

std::optional<int> min_positive_spectrum(const WStarSystem& sys) {
  for (int n : arveson_spectrum(sys)) {
    if (n > 0) return n;
  }
  return std::nullopt;
}

std::optional<CMatrix> find_unitary_in_subspace(const WStarSystem& sys, int n,
                                                std::uint64_t seed) {
  const Tolerances& tol = sys.tol();
  const std::vector<CMatrix> comp = sys.spectral_basis_matrices(n);
  if (comp.empty()) return std::nullopt;
  const Subspace sub = sys.spectral_subspace(n);
  const int d = sys.matrix_dim();
  const CMatrix eye = CMatrix::Identity(d, d);

  std::vector<CMatrix> candidates;
  if (n == 0) candidates.push_back(eye);
  for (const CMatrix& b : comp) candidates.push_back(b);
  Rng rng(mix_seed(seed, 0x9a7fu));
  for (int t = 0; t < 32; ++t) {
    CMatrix mix = CMatrix::Zero(d, d);
    for (const CMatrix& b : comp) mix += random_complex(rng) * b;
    candidates.push_back(std::move(mix));
  }

  for (const CMatrix& cand : candidates) {
    if (cand.norm() < 1e-12) continue;
    const PolarDecomposition pd = polar_partial_isometry(cand, tol);
    if (pd.rank == 0) continue;
    const CMatrix& w = pd.partial_isometry;
    if ((w.adjoint() * w - eye).norm() >= tol.residual_tol) continue;
    if (!sub.contains(vectorize(w), tol.residual_tol)) continue;
    return w;
  }
  return std::nullopt;
}

NogoReport nogo_report(const WStarSystem& sys) {
  NogoReport report;
  const std::vector<int> sp = arveson_spectrum(sys);

  {
    bool symmetric = true;
    for (int n : sp) {
      if (std::find(sp.begin(), sp.end(), -n) == sp.end()) symmetric = false;
    }
    report.items.push_back(CheckItem{"Prop 7 v", symmetric ? 0.0 : 1.0, symmetric,
                                     "spectrum finite and symmetric about 0"});
  }

  {
    bool any_positive = false;
    bool none_found = true;
    for (int n : sp) {
      if (n <= 0) continue;
      any_positive = true;
      if (find_unitary_in_subspace(sys, n).has_value()) none_found = false;
    }
    report.items.push_back(CheckItem{
        "Prop 7 hypothesis", none_found ? 0.0 : 1.0, none_found,
        any_positive ? "no unitary exists at any positive grade"
                     : "vacuous (no positive spectrum)"});
  }

  {
    const bool abelian = is_abelian(sys.algebra());
    if (abelian) {
      const bool trivial = sp.size() == 1 && sp[0] == 0;
      report.items.push_back(CheckItem{"Prop 7 i", trivial ? 0.0 : 1.0, trivial,
                                       "abelian algebra forces a trivial action"});
    } else {
      report.items.push_back(
          CheckItem{"Prop 7 i", 0.0, true, "vacuous (M not abelian)"});
    }
  }

  report.pass = true;
  for (const CheckItem& item : report.items) report.pass = report.pass && item.pass;
  return report;
}

CMatrix resolvent_series(const CMatrix& w, Complex lambda, const CMatrix& b,
                         const Tolerances& tol) {
  require_unitary(w, tol, "resolvent_series");
  if (std::abs(lambda) >= 1.0) {
    throw InputError("resolvent_series: |lambda| must be < 1");
  }
  if (b.rows() != w.rows()) {
    throw InputError("resolvent_series: shape mismatch");
  }
  const CMatrix lhs = CMatrix::Identity(w.rows(), w.cols()) - lambda * w;
  return lhs.partialPivLu().solve(b);
}

VandermondeCoefficients vandermonde_coefficients(int n, double eps) {
  if (n < 1) throw InputError("vandermonde_coefficients: n must be >= 1");
  if (!(eps > 0.0) || !(eps < 1.0)) {
    throw InputError("vandermonde_coefficients: eps must lie in (0, 1)");
  }
  VandermondeCoefficients out;
  const int count = n + 1;
  for (int i = 0; i < count; ++i) {
    out.lambdas.push_back(eps * std::polar(1.0, 2.0 * M_PI * i / count));
  }
  CMatrix a(count, count);
  for (int j = 0; j < count; ++j) {
    for (int i = 0; i < count; ++i) a(j, i) = std::pow(out.lambdas[i], j);
  }
  CVector rhs = CVector::Zero(count);
  rhs(n) = 1.0;
  const CVector mu = a.fullPivLu().solve(rhs);
  out.mus.assign(mu.data(), mu.data() + count);
  out.residual = (a * mu - rhs).norm();
  out.mu_bound = 1.0 / (std::pow(2.0 * eps * std::sin(M_PI / count), n));
  return out;
}

ApproxCertificate power_approximation(const CMatrix& w, int n, double eps,
                                      const Tolerances& tol) {
  const VandermondeCoefficients vc = vandermonde_coefficients(n, eps);
  require_unitary(w, tol, "power_approximation");
  const int d = static_cast<int>(w.rows());
  CMatrix approx = CMatrix::Zero(d, d);
  const CMatrix eye = CMatrix::Identity(d, d);
  for (int i = 0; i <= n; ++i) {
    approx += vc.mus[i] * resolvent_series(w, vc.lambdas[i], eye, tol);
  }
  CMatrix target = eye;
  for (int k = 0; k < n; ++k) target = target * w;

  ApproxCertificate cert;
  cert.n = n;
  cert.eps = eps;
  cert.lambdas = vc.lambdas;
  cert.mus = vc.mus;
  cert.achieved_error = operator_norm(approx - target);
  cert.bound = eps / (std::pow(2.0 * std::sin(M_PI / (n + 1)), n) * (1.0 - eps));
  return cert;
}

int eigenvector_span_rank(const std::vector<Complex>& lambdas, int big_n,
                          const Tolerances& tol) {
  if (big_n < 0) throw InputError("eigenvector_span_rank: N must be >= 0");
  for (const Complex& l : lambdas) {
    if (std::abs(l) >= 1.0) {
      throw InputError("eigenvector_span_rank: profiles require |lambda| < 1");
    }
  }
  if (lambdas.empty()) return 0;
  const int count = static_cast<int>(lambdas.size());
  CMatrix profiles(big_n + 1, count);
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j <= big_n; ++j) profiles(j, i) = std::pow(lambdas[i], j);
  }
  Eigen::JacobiSVD<CMatrix> svd(profiles);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) >= tol.rank_tol * sv(0)) ++rank;
  }
  return rank;
}

CompressionShift compression_shift(const HardyStructure& h, const CMatrix& v, int n) {
  if (n <= 0) throw InputError("compression_shift: grade must be positive");
  const WStarSystem& sys = h.g.system();
  const Tolerances& tol = sys.tol();
  const Subspace sub = sys.spectral_subspace(n);
  if (!sub.contains(vectorize(v), tol.residual_tol)) {
    throw InputError("compression_shift: element is not in the grade-n component");
  }
  CompressionShift out;
  out.s = h.compress(h.g.rep(v));
  out.s_adjoint = h.compress(h.g.rep(v.adjoint()));
  out.adjoint_residual = (out.s_adjoint - out.s.adjoint()).norm();
  if (out.adjoint_residual > tol.residual_tol * std::max(1.0, out.s.norm())) {
    throw InternalError("compression_shift: adjoint compression mismatch");
  }
  return out;
}

CornerDecomposition corner_decomposition(const WStarSystem& sys,
                                         const HardyStructure& h,
                                         std::uint64_t seed) {
  const std::vector<int> sp = arveson_spectrum(sys);
  const std::optional<int> n0 = min_positive_spectrum(sys);
  if (!n0.has_value()) {
    throw InputError("corner_decomposition: the action is trivial (spectrum {0})");
  }
  const Tolerances& tol = sys.tol();
  const int d = sys.matrix_dim();
  const CMatrix eye = CMatrix::Identity(d, d);
  const std::vector<CMatrix> comp = sys.spectral_basis_matrices(*n0);
  const Subspace sub = sys.spectral_subspace(*n0);

  CornerDecomposition out;
  out.f_total = CMatrix::Zero(d, d);

  int rounds = 0;
  for (std::size_t round = 0; round < sp.size(); ++round) {
    ++rounds;
    const CMatrix q = eye - out.f_total;

    std::vector<CMatrix> candidates;
    for (const CMatrix& b : comp) candidates.push_back(q * b * q);
    Rng rng(mix_seed(seed, 0xc0f3u + round));
    for (int t = 0; t < 16; ++t) {
      CMatrix mix = CMatrix::Zero(d, d);
      for (const CMatrix& b : comp) mix += random_complex(rng) * b;
      candidates.push_back(q * mix * q);
    }

    struct Accepted {
      CMatrix w;
      int rank;
      std::size_t order;
    };
    std::vector<Accepted> accepted;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const CMatrix& cand = candidates[c];
      if (cand.norm() < 1e-12) continue;
      const PolarDecomposition pd = polar_partial_isometry(cand, tol);
      if (pd.rank == 0) continue;
      const CMatrix& w = pd.partial_isometry;
      if ((w.adjoint() * w - w * w.adjoint()).norm() > tol.residual_tol) continue;
      if (!sub.contains(vectorize(w), tol.residual_tol)) continue;
      accepted.push_back(Accepted{w, pd.rank, c});
    }
    std::stable_sort(accepted.begin(), accepted.end(),
                     [](const Accepted& a, const Accepted& b) {
                       if (a.rank != b.rank) return a.rank > b.rank;
                       return a.order < b.order;
                     });

    CMatrix f_round = CMatrix::Zero(d, d);
    std::vector<CMatrix> supports;
    for (const Accepted& acc : accepted) {
      CMatrix e = acc.w.adjoint() * acc.w;
      e = 0.5 * (e + e.adjoint());
      bool orthogonal = true;
      for (const CMatrix& prev : supports) {
        if ((e * prev).norm() > tol.residual_tol) orthogonal = false;
      }
      if (!orthogonal) continue;
      supports.push_back(e);
      f_round += e;
    }
    if (supports.empty()) break;
    out.f_list.push_back(f_round);
    out.f_total += f_round;
  }
  out.residual_projection = eye - out.f_total;

  {
    std::string note = "ran " + std::to_string(rounds) + " round(s), extracted " +
                       std::to_string(out.f_list.size()) + " orthogonal family(ies)";
    out.certificates.push_back(CheckItem{"Thm 13 extraction", 0.0, true, note});
  }

  {
    if (out.f_list.empty()) {
      out.certificates.push_back(CheckItem{"Thm 13 corner annihilation", 0.0, true,
                                           "vacuous (no corners extracted)"});
    } else {
      double worst = 0.0;
      const CMatrix& q = out.residual_projection;
      for (int n : sp) {
        if (n <= 0) continue;
        for (const CMatrix& b : sys.spectral_basis_matrices(n)) {
          worst = std::max(worst, (q * b * q).norm());
        }
      }
      out.certificates.push_back(CheckItem{"Thm 13 corner annihilation", worst,
                                           worst < tol.residual_tol,
                                           "(1-f) M_n (1-f) = 0 for n > 0"});
    }
  }

  {
    const CMatrix& q = out.residual_projection;
    std::vector<CMatrix> plus_corner, zero_corner;
    for (const CMatrix& b : h.mplus_preimage) plus_corner.push_back(q * b * q);
    for (const CMatrix& b : sys.spectral_basis_matrices(0)) {
      zero_corner.push_back(q * b * q);
    }
    const Subspace lhs = span_of_matrices(plus_corner, d, d, tol);
    const Subspace rhs = span_of_matrices(zero_corner, d, d, tol);
    const SubspaceComparison cmp = subspace_compare(lhs, rhs, tol);
    const bool terminal = cmp.relation == SubspaceRelation::equal;
    out.certificates.push_back(CheckItem{"Thm 13 terminal identity", cmp.distance,
                                         terminal,
                                         "(1-f) M+ (1-f) = (1-f) M_0 (1-f)"});
    out.hypothesis_absent = out.f_list.empty() && !terminal;
    out.outcome = terminal ? "corners complete" : "hypothesis absent";
  }
  return out;
}

}  // namespace wflow
