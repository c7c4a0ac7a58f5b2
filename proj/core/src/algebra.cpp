#include "wflow/algebra.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

namespace wflow {

namespace {

void validate_closure(const StarAlgebra& a) {
  const Tolerances& tol = a.tol();
  const int d = a.matrix_dim();
  const std::vector<CMatrix> basis = a.basis_matrices();
  if (a.unital()) {
    double res = 0.0;
    if (!a.contains(CMatrix::Identity(d, d), &res)) {
      throw InputError("algebra flagged unital does not contain the identity");
    }
  }
  if (a.star_closed()) {
    for (const CMatrix& b : basis) {
      double res = 0.0;
      if (!a.contains(CMatrix(b.adjoint()), &res)) {
        throw InputError("algebra flagged star-closed is not closed under adjoints");
      }
    }
  }
  for (const CMatrix& x : basis) {
    for (const CMatrix& y : basis) {
      double res = 0.0;
      if (!a.contains(x * y, &res)) {
        throw InputError("span is not closed under products (residual " +
                         std::to_string(res) + ")");
      }
    }
  }
  (void)tol;
}

}  // namespace

StarAlgebra StarAlgebra::from_span(int d, const std::vector<CMatrix>& spanning,
                                   bool unital, bool star_closed,
                                   const Tolerances& tol) {
  tol.validate();
  if (d <= 0) throw InputError("StarAlgebra: matrix dimension must be positive");
  StarAlgebra a;
  a.d_ = d;
  a.space_ = span_of_matrices(spanning, d, d, tol);
  a.unital_ = unital;
  a.star_closed_ = star_closed;
  a.tol_ = tol;
  if (a.size() == 0) throw InputError("StarAlgebra: empty span");
  validate_closure(a);
  return a;
}

StarAlgebra StarAlgebra::from_orthonormal_basis(int d, CMatrix basis, bool unital,
                                                bool star_closed,
                                                const Tolerances& tol) {
  tol.validate();
  if (d <= 0) throw InputError("StarAlgebra: matrix dimension must be positive");
  if (basis.rows() != static_cast<Eigen::Index>(d) * d || basis.cols() == 0) {
    throw InputError("StarAlgebra: basis shape mismatch");
  }
  const CMatrix gram = basis.adjoint() * basis;
  const double ortho_defect =
      (gram - CMatrix::Identity(basis.cols(), basis.cols())).norm();
  if (ortho_defect > tol.residual_tol) {
    throw InputError("StarAlgebra: basis is not orthonormal");
  }
  StarAlgebra a;
  a.d_ = d;
  a.space_ = Subspace(d * d, std::move(basis));
  a.unital_ = unital;
  a.star_closed_ = star_closed;
  a.tol_ = tol;
  validate_closure(a);
  return a;
}

CMatrix StarAlgebra::basis_matrix(int i) const {
  return unvectorize(space_.basis_vector(i), d_, d_);
}

std::vector<CMatrix> StarAlgebra::basis_matrices() const {
  std::vector<CMatrix> out;
  out.reserve(size());
  for (int i = 0; i < size(); ++i) out.push_back(basis_matrix(i));
  return out;
}

bool StarAlgebra::contains(const CMatrix& m, double* residual) const {
  if (m.rows() != d_ || m.cols() != d_) {
    throw InputError("StarAlgebra::contains: shape mismatch");
  }
  const double res = space_.residual(vectorize(m));
  if (residual != nullptr) *residual = res;
  return res <= tol_.residual_tol * std::max(1.0, m.norm());
}

StarAlgebra generate(int d, const std::vector<CMatrix>& generators,
                     bool include_adjoints, bool include_unit, const Tolerances& tol) {
  tol.validate();
  if (d <= 0) throw InputError("generate: matrix dimension must be positive");
  std::vector<CMatrix> seed;
  for (const CMatrix& g : generators) {
    if (g.rows() != d || g.cols() != d) {
      throw InputError("generate: generator shape mismatch");
    }
    seed.push_back(g);
    if (include_adjoints) seed.push_back(g.adjoint());
  }
  if (include_unit) seed.push_back(CMatrix::Identity(d, d));
  if (seed.empty()) throw InputError("generate: nothing to generate from");

  Subspace cur = span_of_matrices(seed, d, d, tol);
  const int max_sweeps = 2 * d;
  for (int sweep = 0; sweep <= max_sweeps; ++sweep) {
    const int dim = cur.dimension();
    std::vector<CMatrix> next;
    next.reserve(static_cast<std::size_t>(dim) * dim + dim);
    std::vector<CMatrix> mats;
    mats.reserve(dim);
    for (int i = 0; i < dim; ++i) mats.push_back(unvectorize(cur.basis_vector(i), d, d));
    for (const CMatrix& m : mats) next.push_back(m);
    for (const CMatrix& x : mats) {
      for (const CMatrix& y : mats) next.push_back(x * y);
    }
    Subspace enlarged = span_of_matrices(next, d, d, tol);
    if (enlarged.dimension() > d * d) {
      throw InternalError("generate: dimension cap d^2 exceeded");
    }
    if (enlarged.dimension() == dim) {
      return StarAlgebra::from_span(d, mats, include_unit, include_adjoints, tol);
    }
    cur = enlarged;
  }
  throw InternalError("generate: closure did not stabilize within 2d sweeps");
}

Subspace commutant_of_operators(const std::vector<CMatrix>& ops, int n,
                                const Tolerances& tol) {
  tol.validate();
  if (n <= 0) throw InputError("commutant_of_operators: dimension must be positive");
  if (ops.empty()) {
    return Subspace(n * n, CMatrix::Identity(n * n, n * n));
  }
  // x commutes with every a iff vec(x) is in the kernel of
  // T = sum_a K_a^* K_a where K_a = I (x) a - a^T (x) I (column-major
  // vectorization). Each K_a^* K_a expands into four Kronecker products
  // of n x n factors, so T is assembled in O(#ops n^4) and one Hermitian
  // eigensolve replaces an SVD of the #ops n^2 x n^2 stack.
  const CMatrix eye = CMatrix::Identity(n, n);
  const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
  CMatrix t = CMatrix::Zero(nn, nn);
  for (const CMatrix& raw : ops) {
    if (raw.rows() != n || raw.cols() != n) {
      throw InputError("commutant_of_operators: operator shape mismatch");
    }
    const double scale = raw.norm();
    if (!(scale > 0.0)) continue;
    const CMatrix a = raw / scale;
    t += Eigen::kroneckerProduct(eye, CMatrix(a.adjoint() * a));
    t += Eigen::kroneckerProduct(CMatrix(a.conjugate() * a.transpose()), eye);
    t -= Eigen::kroneckerProduct(a.transpose(), CMatrix(a.adjoint()));
    t -= Eigen::kroneckerProduct(CMatrix(a.conjugate()), a);
  }
  t = 0.5 * (t + CMatrix(t.adjoint()));
  Eigen::SelfAdjointEigenSolver<CMatrix> es(t);
  const Eigen::VectorXd lam = es.eigenvalues();
  const double top = lam(lam.size() - 1);
  if (!(top > 0.0)) {
    return Subspace(n * n, CMatrix::Identity(nn, nn));
  }
  // Quadratic form, so the singular-value cut appears squared; 1e-12
  // relative sits far above eigensolver noise and far below any genuine
  // nonzero commutator direction in these algebraic settings. The absolute
  // floor covers the all-noise case: when every operator commutes with
  // everything (up to roundoff in the supplied basis), t itself is pure
  // noise with top ~ 1e-16, and a purely relative cut would keep an
  // arbitrary half of the noise eigenvectors instead of the full space.
  const double cut = std::max(1e-12 * top, 1e-13);
  int kernel = 0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) <= cut) ++kernel;
  }
  return Subspace(n * n, es.eigenvectors().leftCols(kernel));
}

StarAlgebra commutant(const StarAlgebra& a) {
  const Subspace comm = commutant_of_operators(a.basis_matrices(), a.matrix_dim(), a.tol());
  std::vector<CMatrix> mats;
  mats.reserve(comm.dimension());
  for (int i = 0; i < comm.dimension(); ++i) {
    mats.push_back(unvectorize(comm.basis_vector(i), a.matrix_dim(), a.matrix_dim()));
  }
  return StarAlgebra::from_span(a.matrix_dim(), mats, true, a.star_closed(), a.tol());
}

BicommutantReport bicommutant_check(const StarAlgebra& a) {
  if (!a.star_closed() || !a.unital()) {
    throw InputError("bicommutant_check requires a star-closed unital algebra");
  }
  const StarAlgebra second = commutant(commutant(a));
  const SubspaceComparison cmp = subspace_compare(a.space(), second.space(), a.tol());
  return {cmp.distance, cmp.relation == SubspaceRelation::equal};
}

bool is_abelian(const StarAlgebra& a) {
  const std::vector<CMatrix> basis = a.basis_matrices();
  for (const CMatrix& x : basis) {
    for (const CMatrix& y : basis) {
      if ((x * y - y * x).norm() > a.tol().residual_tol) return false;
    }
  }
  return true;
}

StarAlgebra center(const StarAlgebra& a) {
  const StarAlgebra comm = commutant(a);
  const Subspace inter = intersect(a.space(), comm.space(), a.tol());
  std::vector<CMatrix> mats;
  mats.reserve(inter.dimension());
  for (int i = 0; i < inter.dimension(); ++i) {
    mats.push_back(unvectorize(inter.basis_vector(i), a.matrix_dim(), a.matrix_dim()));
  }
  return StarAlgebra::from_span(a.matrix_dim(), mats, a.unital(), a.star_closed(), a.tol());
}

StarAlgebra direct_sum(const StarAlgebra& a, const StarAlgebra& b) {
  const int da = a.matrix_dim();
  const int db = b.matrix_dim();
  const int d = da + db;
  std::vector<CMatrix> mats;
  mats.reserve(static_cast<std::size_t>(a.size()) + b.size());
  for (int i = 0; i < a.size(); ++i) {
    CMatrix m = CMatrix::Zero(d, d);
    m.topLeftCorner(da, da) = a.basis_matrix(i);
    mats.push_back(m);
  }
  for (int i = 0; i < b.size(); ++i) {
    CMatrix m = CMatrix::Zero(d, d);
    m.bottomRightCorner(db, db) = b.basis_matrix(i);
    mats.push_back(m);
  }
  Tolerances tol = a.tol();
  return StarAlgebra::from_span(d, mats, a.unital() && b.unital(),
                                a.star_closed() && b.star_closed(), tol);
}

}  // namespace wflow
