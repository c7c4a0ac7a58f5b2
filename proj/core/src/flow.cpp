#include "wflow/flow.hpp"

#include <algorithm>
#include <cmath>

namespace wflow {

int CircleAction::spread() const {
  if (weights.empty()) return 0;
  const auto [lo, hi] = std::minmax_element(weights.begin(), weights.end());
  return *hi - *lo;
}

DiagonalizedAction action_from_generator(const CMatrix& k, const Tolerances& tol) {
  tol.validate();
  if (k.rows() != k.cols() || k.rows() == 0) {
    throw InputError("action_from_generator: generator must be square");
  }
  if ((k - k.adjoint()).norm() > tol.residual_tol * std::max(1.0, k.norm())) {
    throw InputError("action_from_generator: generator must be Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(k);
  DiagonalizedAction out;
  out.basis = es.eigenvectors();
  out.action.weights.reserve(k.rows());
  for (Eigen::Index i = 0; i < k.rows(); ++i) {
    const double lam = es.eigenvalues()(i);
    const double rounded = std::round(lam);
    if (std::abs(lam - rounded) > 1e-9 * std::max(1.0, std::abs(lam))) {
      throw InputError("action_from_generator: non-integer eigenvalue phase");
    }
    out.action.weights.push_back(static_cast<int>(rounded));
  }
  return out;
}

CMatrix act(const CircleAction& a, Complex z, const CMatrix& m) {
  require_unimodular(z, "act");
  const int d = a.dimension();
  if (m.rows() != d || m.cols() != d) {
    throw InputError("act: matrix shape does not match the weight vector");
  }
  std::vector<Complex> zw(d);
  for (int i = 0; i < d; ++i) zw[i] = unit_power(z, a.weights[i]);
  CMatrix out(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) {
      out(i, j) = m(i, j) * zw[i] * std::conj(zw[j]);
    }
  }
  return out;
}

CMatrix spectral_projection(const CircleAction& a, int n, const CMatrix& m) {
  const int d = a.dimension();
  if (m.rows() != d || m.cols() != d) {
    throw InputError("spectral_projection: matrix shape does not match the weights");
  }
  CMatrix out = CMatrix::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) {
      if (a.weights[i] - a.weights[j] == n) out(i, j) = m(i, j);
    }
  }
  return out;
}

CMatrix spectral_projection_average(const CircleAction& a, int n, const CMatrix& m) {
  const int d = a.dimension();
  if (m.rows() != d || m.cols() != d) {
    throw InputError("spectral_projection_average: shape mismatch");
  }
  const int big_n = 2 * a.spread() + std::abs(n) + 1;
  CMatrix acc = CMatrix::Zero(d, d);
  for (int k = 0; k < big_n; ++k) {
    const double angle = 2.0 * M_PI * k / big_n;
    const Complex zk = std::polar(1.0, angle);
    acc += std::polar(1.0, -angle * n) * act(a, zk, m);
  }
  return acc / static_cast<double>(big_n);
}

WStarSystem WStarSystem::build(const StarAlgebra& m, CircleAction action) {
  const Tolerances& tol = m.tol();
  if (action.dimension() != m.matrix_dim()) {
    throw InputError("WStarSystem: weight vector length does not match the algebra");
  }
  const int spread = action.spread();
  const std::vector<CMatrix> basis = m.basis_matrices();

  // Collect spectral components per grade; invariance demands each one
  // stays inside the span.
  std::vector<SpectralBlock> blocks;
  std::vector<int> grades;
  Eigen::Index col = 0;
  CMatrix graded_basis(static_cast<Eigen::Index>(m.matrix_dim()) * m.matrix_dim(),
                       m.size());
  int total = 0;
  for (int n = -spread; n <= spread; ++n) {
    std::vector<CMatrix> comps;
    for (const CMatrix& b : basis) {
      CMatrix comp = spectral_projection(action, n, b);
      if (comp.norm() <= 1e-14) continue;
      double res = 0.0;
      if (!m.contains(comp, &res)) {
        throw InputError(
            "WStarSystem: algebra is not invariant under the action (grade " +
            std::to_string(n) + ", residual " + std::to_string(res) + ")");
      }
      comps.push_back(std::move(comp));
    }
    if (comps.empty()) continue;
    Subspace sub = span_of_matrices(comps, m.matrix_dim(), m.matrix_dim(), tol);
    if (sub.dimension() == 0) continue;
    total += sub.dimension();
    if (total > m.size()) {
      throw InternalError("WStarSystem: graded dimensions exceed the algebra");
    }
    for (int i = 0; i < sub.dimension(); ++i) {
      graded_basis.col(col++) = sub.basis_vector(i);
      grades.push_back(n);
    }
    blocks.push_back(SpectralBlock{n, std::move(sub)});
  }
  if (total != m.size()) {
    throw InternalError("WStarSystem: spectral components do not exhaust the algebra");
  }

  WStarSystem sys;
  sys.algebra_ = StarAlgebra::from_orthonormal_basis(
      m.matrix_dim(), std::move(graded_basis), m.unital(), m.star_closed(), tol);
  sys.action_ = std::move(action);
  sys.blocks_ = std::move(blocks);
  sys.grades_ = std::move(grades);
  return sys;
}

Subspace WStarSystem::spectral_subspace(int n) const {
  for (const SpectralBlock& b : blocks_) {
    if (b.n == n) return b.sub;
  }
  const int d2 = matrix_dim() * matrix_dim();
  return Subspace(d2, CMatrix(d2, 0));
}

std::vector<CMatrix> WStarSystem::spectral_basis_matrices(int n) const {
  const Subspace sub = spectral_subspace(n);
  std::vector<CMatrix> out;
  out.reserve(sub.dimension());
  for (int i = 0; i < sub.dimension(); ++i) {
    out.push_back(unvectorize(sub.basis_vector(i), matrix_dim(), matrix_dim()));
  }
  return out;
}

std::vector<int> arveson_spectrum(const WStarSystem& sys) {
  std::vector<int> sp;
  sp.reserve(sys.blocks().size());
  for (const SpectralBlock& b : sys.blocks()) sp.push_back(b.n);
  return sp;
}

CMatrix fixed_point_expectation(const WStarSystem& sys, const CMatrix& m) {
  double res = 0.0;
  if (!sys.algebra().contains(m, &res)) {
    throw InputError("fixed_point_expectation: element is outside the algebra (residual " +
                     std::to_string(res) + ")");
  }
  return spectral_projection(sys.action(), 0, m);
}

GradedProductReport graded_product_check(const WStarSystem& sys) {
  GradedProductReport report;
  const int d = sys.matrix_dim();
  for (const SpectralBlock& bn : sys.blocks()) {
    const std::vector<CMatrix> left = sys.spectral_basis_matrices(bn.n);
    for (const SpectralBlock& bk : sys.blocks()) {
      const std::vector<CMatrix> right = sys.spectral_basis_matrices(bk.n);
      const Subspace target = sys.spectral_subspace(bn.n + bk.n);
      for (const CMatrix& x : left) {
        for (const CMatrix& y : right) {
          const CVector prod = vectorize(x * y);
          const double res =
              target.dimension() > 0 ? target.residual(prod) : prod.norm();
          report.max_residual = std::max(report.max_residual, res);
        }
      }
    }
  }
  (void)d;
  report.pass = report.max_residual <= sys.tol().residual_tol;
  return report;
}

}  // namespace wflow
