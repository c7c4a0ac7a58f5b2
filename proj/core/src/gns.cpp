#include "wflow/gns.hpp"

#include <algorithm>
#include <cmath>

namespace wflow {

namespace {

constexpr double kTiny = 1e-14;

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

// Positive power p of a Hermitian positive matrix via eigendecomposition.
CMatrix hermitian_power(const CMatrix& m, double p, double floor_rel,
                        const char* what) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  const Eigen::VectorXd lam = es.eigenvalues();
  const double top = lam(lam.size() - 1);
  if (!(top > 0.0) || lam(0) <= floor_rel * top) {
    throw InputError(std::string(what) + ": matrix is numerically singular");
  }
  Eigen::VectorXd powered(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) powered(i) = std::pow(lam(i), p);
  return es.eigenvectors() * powered.cast<Complex>().asDiagonal() *
         es.eigenvectors().adjoint();
}

}  // namespace

Complex State::value(const CMatrix& m) const {
  if (m.rows() != density.rows() || m.cols() != density.cols()) {
    throw InputError("State::value: shape mismatch");
  }
  return (density * m).trace();
}

State canonical_state(const WStarSystem& sys, const std::optional<CMatrix>& phi0_density) {
  const int d = sys.matrix_dim();
  const Tolerances& tol = sys.tol();
  CMatrix rho;
  if (phi0_density.has_value()) {
    rho = *phi0_density;
    if (rho.rows() != d || rho.cols() != d) {
      throw InputError("canonical_state: density shape does not match the system");
    }
    if ((rho - rho.adjoint()).norm() > tol.residual_tol * std::max(1.0, rho.norm())) {
      throw InputError("canonical_state: density must be Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho);
    const double top = es.eigenvalues()(d - 1);
    if (!(top > 0.0) || es.eigenvalues()(0) <= tol.rank_tol * top) {
      throw InputError("canonical_state: density must be positive definite");
    }
  } else {
    rho = CMatrix::Identity(d, d) / static_cast<double>(d);
  }

  // Effective density: phi = phi0 o P0 evaluates against the zero-grade
  // compression of rho, which also makes alpha-invariance automatic.
  CMatrix rho0 = spectral_projection(sys.action(), 0, rho);
  rho0 = hermitian_part(rho0);
  const double tr = rho0.trace().real();
  if (!(tr > 0.0)) {
    throw InputError("canonical_state: zero-grade density has nonpositive trace");
  }
  rho0 /= tr;

  // Faithfulness on the fixed-point algebra: its Gram form must be regular.
  const std::vector<CMatrix> m0 = sys.spectral_basis_matrices(0);
  if (!m0.empty()) {
    const int k = static_cast<int>(m0.size());
    CMatrix gram0(k, k);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        gram0(i, j) = (rho0 * m0[i].adjoint() * m0[j]).trace();
      }
    }
    gram0 = hermitian_part(gram0);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(gram0);
    const double top = es.eigenvalues()(k - 1);
    if (!(top > 0.0) || es.eigenvalues()(0) <= tol.rank_tol * top) {
      throw InputError(
          "canonical_state: state is not faithful (singular Gram form on the "
          "fixed-point algebra)");
    }
  }
  return State{std::move(rho0)};
}

GnsRealization GnsRealization::build(const WStarSystem& sys, const State& state) {
  GnsRealization g;
  g.sys_ = sys;
  g.state_ = state;
  const int dim = sys.size();
  g.h_dim_ = dim;
  const std::vector<CMatrix> basis = sys.algebra().basis_matrices();
  const Tolerances& tol = sys.tol();

  CMatrix gram(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      gram(i, j) = state.value(basis[i].adjoint() * basis[j]);
    }
  }
  g.gram_ = hermitian_part(gram);
  g.gram_root_ = hermitian_power(g.gram_, 0.5, tol.rank_tol, "GNS Gram matrix");
  g.gram_root_inv_ = hermitian_power(g.gram_, -0.5, tol.rank_tol, "GNS Gram matrix");

  const int d = sys.matrix_dim();
  CVector unit_coeff(dim);
  const CMatrix eye = CMatrix::Identity(d, d);
  for (int i = 0; i < dim; ++i) unit_coeff(i) = hs_inner(eye, basis[i]);
  g.xi0_ = g.gram_root_ * unit_coeff;

  g.u_weights_ = sys.basis_grades();
  for (int i = 0; i < dim; ++i) {
    const int n = g.u_weights_[i];
    auto it = std::find_if(g.h_blocks_.begin(), g.h_blocks_.end(),
                           [n](const auto& p) { return p.first == n; });
    if (it == g.h_blocks_.end()) {
      g.h_blocks_.push_back({n, {i}});
    } else {
      it->second.push_back(i);
    }
  }
  std::sort(g.h_blocks_.begin(), g.h_blocks_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  // Star map in coefficients: c(a*) = T conj(c(a)).
  CMatrix star(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      star(i, j) = hs_inner(basis[j].adjoint(), basis[i]);
    }
  }
  g.s_ = ConjugateLinearOp{g.gram_root_ * star * g.gram_root_inv_.conjugate()};
  g.f_ = g.s_.adjoint();
  g.delta_ = hermitian_part(g.f_.compose(g.s_));
  const CMatrix delta_inv_root =
      hermitian_power(g.delta_, -0.5, kTiny, "modular operator");
  g.j_ = ConjugateLinearOp{g.s_.mat * delta_inv_root.conjugate()};

  std::vector<CMatrix> commutant_ops;
  commutant_ops.reserve(dim);
  for (const CMatrix& b : basis) commutant_ops.push_back(g.commutant_rep(b));
  g.commutant_span_ = span_of_matrices(commutant_ops, dim, dim, tol);
  return g;
}

CMatrix GnsRealization::rep(const CMatrix& m) const {
  double res = 0.0;
  if (!sys_.algebra().contains(m, &res)) {
    throw InputError("rep: element is outside the algebra (residual " +
                     std::to_string(res) + ")");
  }
  const std::vector<CMatrix> basis = sys_.algebra().basis_matrices();
  CMatrix mult(h_dim_, h_dim_);
  for (int j = 0; j < h_dim_; ++j) {
    const CMatrix prod = m * basis[j];
    for (int i = 0; i < h_dim_; ++i) mult(i, j) = hs_inner(prod, basis[i]);
  }
  return gram_root_ * mult * gram_root_inv_;
}

CMatrix GnsRealization::commutant_rep(const CMatrix& m) const {
  double res = 0.0;
  if (!sys_.algebra().contains(m, &res)) {
    throw InputError("commutant_rep: element is outside the algebra (residual " +
                     std::to_string(res) + ")");
  }
  const std::vector<CMatrix> basis = sys_.algebra().basis_matrices();
  CMatrix mult(h_dim_, h_dim_);
  for (int j = 0; j < h_dim_; ++j) {
    const CMatrix prod = basis[j] * m;
    for (int i = 0; i < h_dim_; ++i) mult(i, j) = hs_inner(prod, basis[i]);
  }
  return gram_root_ * mult * gram_root_inv_;
}

CVector GnsRealization::embed(const CMatrix& m) const {
  double res = 0.0;
  if (!sys_.algebra().contains(m, &res)) {
    throw InputError("embed: element is outside the algebra (residual " +
                     std::to_string(res) + ")");
  }
  const std::vector<CMatrix> basis = sys_.algebra().basis_matrices();
  CVector coeff(h_dim_);
  for (int i = 0; i < h_dim_; ++i) coeff(i) = hs_inner(m, basis[i]);
  return gram_root_ * coeff;
}

CMatrix GnsRealization::unembed(const CVector& xi) const {
  if (xi.size() != h_dim_) throw InputError("unembed: length mismatch");
  const CVector coeff = gram_root_inv_ * xi;
  const int d = sys_.matrix_dim();
  CMatrix m = CMatrix::Zero(d, d);
  const std::vector<CMatrix> basis = sys_.algebra().basis_matrices();
  for (int i = 0; i < h_dim_; ++i) m += coeff(i) * basis[i];
  return m;
}

CMatrix GnsRealization::j_conjugate(const CMatrix& x) const {
  return j_.mat * x.conjugate() * j_.mat.conjugate();
}

CMatrix GnsRealization::implementing_unitary(Complex z) const {
  require_unimodular(z, "implementing_unitary");
  CVector diag(h_dim_);
  for (int i = 0; i < h_dim_; ++i) diag(i) = unit_power(z, u_weights_[i]);
  return diag.asDiagonal();
}

Subspace GnsRealization::h_spectral_subspace(int n) const {
  for (const auto& [grade, idx] : h_blocks_) {
    if (grade != n) continue;
    CMatrix basis = CMatrix::Zero(h_dim_, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) basis(idx[k], k) = 1.0;
    return Subspace(h_dim_, std::move(basis));
  }
  return Subspace(h_dim_, CMatrix(h_dim_, 0));
}

std::vector<int> GnsRealization::h_spectrum() const {
  std::vector<int> out;
  out.reserve(h_blocks_.size());
  for (const auto& [grade, idx] : h_blocks_) out.push_back(grade);
  return out;
}

CMatrix GnsRealization::commutant_action(Complex z, const CMatrix& mprime) const {
  require_unimodular(z, "commutant_action");
  if (mprime.rows() != h_dim_ || mprime.cols() != h_dim_) {
    throw InputError("commutant_action: operator shape mismatch");
  }
  const double res = commutant_span_.residual(vectorize(mprime));
  if (res > tol().residual_tol * std::max(1.0, mprime.norm())) {
    throw InputError("commutant_action: operator is outside the commutant (residual " +
                     std::to_string(res) + ")");
  }
  const CMatrix u = implementing_unitary(z);
  return u * mprime * u.adjoint();
}

CMatrix GnsRealization::commutant_spectral_component(int n, const CMatrix& x) const {
  if (x.rows() != h_dim_ || x.cols() != h_dim_) {
    throw InputError("commutant_spectral_component: shape mismatch");
  }
  int lo = 0;
  int hi = 0;
  for (int w : u_weights_) {
    lo = std::min(lo, w);
    hi = std::max(hi, w);
  }
  const int big_n = 2 * (hi - lo) + std::abs(n) + 1;
  CMatrix acc = CMatrix::Zero(h_dim_, h_dim_);
  for (int k = 0; k < big_n; ++k) {
    const double angle = 2.0 * M_PI * k / big_n;
    const CMatrix u = implementing_unitary(std::polar(1.0, angle));
    acc += std::polar(1.0, -angle * n) * (u * x * u.adjoint());
  }
  return acc / static_cast<double>(big_n);
}

IdentityReport verify_standard_identities(const GnsRealization& g) {
  IdentityReport report;
  const Tolerances& tol = g.tol();
  const WStarSystem& sys = g.system();
  const int h = g.h_dim();
  const int h2 = h * h;
  const std::vector<CMatrix> basis = sys.algebra().basis_matrices();
  const CMatrix eye = CMatrix::Identity(h, h);

  std::vector<Complex> zs;
  for (int k = 1; k < 8; ++k) zs.push_back(std::polar(1.0, 2.0 * M_PI * k / 8.0));
  zs.push_back(std::polar(1.0, 2.0 * M_PI * 0.3819660112501051));

  auto add = [&](const std::string& anchor, double residual, std::string note,
                 double threshold) {
    report.items.push_back(CheckItem{anchor, residual, residual <= threshold,
                                     std::move(note)});
    report.max_residual = std::max(report.max_residual, residual);
  };

  std::vector<CMatrix> reps, creps;
  reps.reserve(basis.size());
  creps.reserve(basis.size());
  for (const CMatrix& b : basis) {
    reps.push_back(g.rep(b));
    creps.push_back(g.commutant_rep(b));
  }

  // Implementing unitaries carry the action: U_z rep(m) U_z^* = rep(alpha_z m).
  {
    double worst = 0.0;
    for (const Complex& z : zs) {
      const CMatrix u = g.implementing_unitary(z);
      for (std::size_t i = 0; i < basis.size(); ++i) {
        const CMatrix lhs = u * reps[i] * u.adjoint();
        const CMatrix rhs = g.rep(act(sys.action(), z, basis[i]));
        worst = std::max(worst, (lhs - rhs).norm());
      }
    }
    add("covariance U_z rep U_z* = rep(alpha_z)", worst, "sampled z", tol.residual_tol);
  }

  // State reproduction and invariance.
  {
    double worst = 0.0;
    double inv = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const Complex lhs = g.xi0().dot(reps[i] * g.xi0());
      const Complex rhs = g.state().value(basis[i]);
      worst = std::max(worst, std::abs(lhs - rhs));
      for (const Complex& z : zs) {
        inv = std::max(inv, std::abs(g.state().value(act(sys.action(), z, basis[i])) -
                                     rhs));
      }
    }
    add("state <rep(m) xi0, xi0> = phi(m)", worst, "", tol.residual_tol);
    add("state invariance phi o alpha_z = phi", inv, "sampled z", tol.residual_tol);
  }

  // Cyclic and separating.
  {
    std::vector<CVector> left, right;
    for (const CMatrix& b : basis) left.push_back(g.rep(b) * g.xi0());
    for (const CMatrix& b : basis) right.push_back(g.commutant_rep(b) * g.xi0());
    const int dl = orthonormalize(left, h, tol).dimension();
    const int dr = orthonormalize(right, h, tol).dimension();
    add("xi0 cyclic for M and M'", std::abs(dl - h) + std::abs(dr - h),
        "dimension defect", 0.5);
  }

  // rep is a *-homomorphism.
  {
    double worst = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      worst = std::max(worst, (reps[i].adjoint() - g.rep(basis[i].adjoint())).norm());
      for (std::size_t k = 0; k < basis.size(); ++k) {
        worst = std::max(worst,
                         (reps[i] * reps[k] - g.rep(basis[i] * basis[k])).norm());
      }
    }
    add("rep is a *-homomorphism", worst, "", 100 * tol.residual_tol);
  }

  // S(m xi0) = m* xi0 and F on the commutant side.
  {
    double worst = 0.0;
    for (const CMatrix& b : basis) {
      worst = std::max(worst,
                       (g.s_op().apply(g.embed(b)) - g.embed(b.adjoint())).norm());
    }
    add("S(m xi0) = m* xi0", worst, "", tol.residual_tol);

    // The adjoint here is the operator adjoint on H: right multiplication
    // by b* is NOT the adjoint of right multiplication by b unless the
    // state is tracial.
    double worstf = 0.0;
    for (const CMatrix& c : creps) {
      const CVector lhs = g.f_op().apply(c * g.xi0());
      const CVector rhs = c.adjoint() * g.xi0();
      worstf = std::max(worstf, (lhs - rhs).norm());
    }
    add("F(m' xi0) = m'* xi0", worstf, "", 100 * tol.residual_tol);
  }

  // Adjoint pairing of the conjugate-linear pair (S, F).
  {
    Rng rng(0xABCDEFULL);
    double worst = 0.0;
    for (int t = 0; t < 24; ++t) {
      const CVector xi = random_vector(rng, h);
      const CVector eta = random_vector(rng, h);
      const Complex lhs = eta.dot(g.s_op().apply(xi));
      const Complex rhs = xi.dot(g.f_op().apply(eta));
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    add("F = S^*", worst, "random vector pairs", tol.residual_tol);
  }

  // Modular relations.
  {
    const CMatrix ss = g.f_op().compose(g.s_op());
    add("Delta = S^* S", (g.delta() - ss).norm(), "", tol.residual_tol);
    const CMatrix ssr = g.s_op().compose(g.f_op());
    const CMatrix delta_inv = g.delta().inverse();
    add("Delta^{-1} = S S^*", (ssr - delta_inv).norm(), "",
        100 * tol.residual_tol * std::max(1.0, delta_inv.norm()));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(g.delta());
    Eigen::VectorXd lam = es.eigenvalues();
    Eigen::VectorXd root = lam.cwiseMax(0.0).cwiseSqrt();
    const CMatrix delta_half = es.eigenvectors() * root.cast<Complex>().asDiagonal() *
                               es.eigenvectors().adjoint();
    add("S = J Delta^{1/2}",
        (g.s_op().mat - g.j_op().compose_linear(delta_half).mat).norm(), "",
        100 * tol.residual_tol);
    add("J^2 = 1", (g.j_op().compose(g.j_op()) - eye).norm(), "", tol.residual_tol);
    add("J isometric", (g.j_op().mat.adjoint() * g.j_op().mat - eye).norm(), "",
        tol.residual_tol);
  }

  // J M J = M'.
  {
    std::vector<CMatrix> conj;
    conj.reserve(reps.size());
    for (const CMatrix& r : reps) conj.push_back(g.j_conjugate(r));
    const Subspace lhs = span_of_matrices(conj, h, h, tol);
    const SubspaceComparison cmp = subspace_compare(lhs, g.commutant_span(), tol);
    add("J M J = M'", cmp.distance, to_string(cmp.relation), tol.subspace_tol);
  }

  // Prop 1 i: alpha'_z maps the commutant to itself.
  {
    double worst = 0.0;
    for (const Complex& z : zs) {
      const CMatrix u = g.implementing_unitary(z);
      for (const CMatrix& c : creps) {
        const CMatrix moved = u * c * u.adjoint();
        worst = std::max(worst, g.commutant_span().residual(vectorize(moved)));
      }
    }
    add("Prop 1 i", worst, "alpha'_z preserves M'", tol.residual_tol);
  }

  // Prop 1 ii: the implementing unitaries commute with S, F and J.
  {
    double worst = 0.0;
    for (const Complex& z : zs) {
      const CMatrix u = g.implementing_unitary(z);
      worst = std::max(worst, (u * g.s_op().mat - g.s_op().mat * u.conjugate()).norm());
      worst = std::max(worst, (u * g.f_op().mat - g.f_op().mat * u.conjugate()).norm());
      worst = std::max(worst, (u * g.j_op().mat - g.j_op().mat * u.conjugate()).norm());
    }
    add("Prop 1 ii", worst, "U_z commutes with S, F, J", tol.residual_tol);
  }

  // Prop 1 iii: (M')_n = J M_{-n} J, with the left side produced by exact
  // averaging of the commutant under alpha'.
  {
    double worst = 0.0;
    const std::vector<int> sp = arveson_spectrum(sys);
    for (int n : sp) {
      std::vector<CMatrix> averaged;
      for (const CMatrix& c : creps) {
        CMatrix comp = g.commutant_spectral_component(n, c);
        if (comp.norm() > 1e-12) averaged.push_back(std::move(comp));
      }
      const Subspace lhs = span_of_matrices(averaged, h, h, tol);
      std::vector<CMatrix> conj;
      for (const CMatrix& b : sys.spectral_basis_matrices(-n)) {
        conj.push_back(g.j_conjugate(g.rep(b)));
      }
      const Subspace rhs = span_of_matrices(conj, h, h, tol);
      const SubspaceComparison cmp = subspace_compare(lhs, rhs, tol);
      worst = std::max(worst, cmp.distance);
      if (cmp.relation != SubspaceRelation::equal) worst = std::max(worst, 1.0);
    }
    add("Prop 1 iii", worst, "(M')_n = J M_{-n} J", tol.subspace_tol);
  }

  // Prop 1 iv: U_z(m' xi0) = alpha'_z(m') xi0.
  {
    double worst = 0.0;
    for (const Complex& z : zs) {
      const CMatrix u = g.implementing_unitary(z);
      for (const CMatrix& c : creps) {
        const CVector lhs = u * (c * g.xi0());
        const CVector rhs = (u * c * u.adjoint()) * g.xi0();
        worst = std::max(worst, (lhs - rhs).norm());
      }
    }
    add("Prop 1 iv", worst, "", tol.residual_tol);
  }

  // Prop 1 v: sp(alpha') = sp(alpha).
  {
    const std::vector<int> sp = arveson_spectrum(sys);
    std::vector<int> sp_prime;
    for (int n = -sys.action().spread(); n <= sys.action().spread(); ++n) {
      bool nonzero = false;
      for (const CMatrix& c : creps) {
        if (g.commutant_spectral_component(n, c).norm() > 1e-10) {
          nonzero = true;
          break;
        }
      }
      if (nonzero) sp_prime.push_back(n);
    }
    const bool same = sp == sp_prime;
    add("Prop 1 v", same ? 0.0 : 1.0, "sp(alpha) = sp(alpha')", 0.5);
  }

  // Prop 2 i: the graded pieces of H are mutually orthogonal, witnessed on
  // embedded spectral elements rather than on the coordinate blocks.
  {
    double worst = 0.0;
    for (const SpectralBlock& bn : sys.blocks()) {
      for (const SpectralBlock& bk : sys.blocks()) {
        if (bn.n == bk.n) continue;
        for (const CMatrix& x : sys.spectral_basis_matrices(bn.n)) {
          for (const CMatrix& y : sys.spectral_basis_matrices(bk.n)) {
            worst = std::max(worst, std::abs(g.embed(y).dot(g.embed(x))));
          }
        }
      }
    }
    add("Prop 2 i", worst, "H_n orthogonal to H_k", tol.residual_tol);
  }

  // Prop 2 ii: M_n xi0 spans H_n.
  {
    double worst = 0.0;
    for (const SpectralBlock& bn : sys.blocks()) {
      std::vector<CVector> vecs;
      for (const CMatrix& x : sys.spectral_basis_matrices(bn.n)) {
        vecs.push_back(g.embed(x));
      }
      const Subspace span = orthonormalize(vecs, h, tol);
      const SubspaceComparison cmp =
          subspace_compare(span, g.h_spectral_subspace(bn.n), tol);
      worst = std::max(worst, cmp.distance);
      if (cmp.relation != SubspaceRelation::equal) worst = std::max(worst, 1.0);
    }
    add("Prop 2 ii", worst, "M_n xi0 = H_n", tol.subspace_tol);
  }

  // Prop 2 iii: (M')_n xi0 spans H_n, with (M')_n from the averaging route.
  {
    double worst = 0.0;
    for (const SpectralBlock& bn : sys.blocks()) {
      std::vector<CVector> vecs;
      for (const CMatrix& c : creps) {
        const CMatrix comp = g.commutant_spectral_component(bn.n, c);
        if (comp.norm() > 1e-12) vecs.push_back(comp * g.xi0());
      }
      const Subspace span = orthonormalize(vecs, h, tol);
      const SubspaceComparison cmp =
          subspace_compare(span, g.h_spectral_subspace(bn.n), tol);
      worst = std::max(worst, cmp.distance);
      if (cmp.relation != SubspaceRelation::equal) worst = std::max(worst, 1.0);
    }
    add("Prop 2 iii", worst, "(M')_n xi0 = H_n", tol.subspace_tol);
  }

  // Prop 2 iv: the graded pieces exhaust H.
  {
    int total = 0;
    CMatrix sum = CMatrix::Zero(h, h);
    for (const auto& [n, idx] : g.h_blocks()) {
      total += static_cast<int>(idx.size());
      sum += g.h_spectral_subspace(n).projector();
    }
    const double defect = (sum - eye).norm() + std::abs(total - h);
    add("Prop 2 iv", defect, "sum of H_n is H", tol.residual_tol);
  }

  // Grade bookkeeping between M, M' and H.
  {
    double defect = 0.0;
    int total_m = 0;
    for (const SpectralBlock& b : sys.blocks()) total_m += b.sub.dimension();
    defect += std::abs(total_m - sys.size());
    add("grading: sum dim M_n = dim M", defect, "", 0.5);
  }

  report.pass = true;
  for (const CheckItem& item : report.items) report.pass = report.pass && item.pass;
  return report;
}

}  // namespace wflow
