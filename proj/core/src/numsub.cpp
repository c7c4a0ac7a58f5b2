#include "wflow/numsub.hpp"

#include <algorithm>
#include <cmath>

namespace wflow {

namespace {

// Thin SVD wrapper; Jacobi for small problems, divide and conquer above.
struct SvdResult {
  Eigen::VectorXd sigma;
  CMatrix u;
  CMatrix v;
};

SvdResult thin_svd(const CMatrix& m, bool need_u, bool need_v) {
  unsigned opts = 0;
  if (need_u) opts |= Eigen::ComputeThinU;
  if (need_v) opts |= Eigen::ComputeThinV;
  SvdResult out;
  if (m.rows() * m.cols() <= 64 * 64) {
    Eigen::JacobiSVD<CMatrix> svd(m, opts);
    out.sigma = svd.singularValues();
    if (need_u) out.u = svd.matrixU();
    if (need_v) out.v = svd.matrixV();
  } else {
    Eigen::BDCSVD<CMatrix> svd(m, opts);
    out.sigma = svd.singularValues();
    if (need_u) out.u = svd.matrixU();
    if (need_v) out.v = svd.matrixV();
  }
  return out;
}

int rank_from_sigma(const Eigen::VectorXd& sigma, double rank_tol) {
  if (sigma.size() == 0) return 0;
  const double top = sigma(0);
  if (!(top > 0.0)) return 0;
  const double cut = rank_tol * top;
  int r = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) >= cut) ++r;
  }
  return r;
}

}  // namespace

Complex hs_inner(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InputError("hs_inner: shape mismatch");
  }
  return (b.conjugate().cwiseProduct(a)).sum();
}

double hs_norm(const CMatrix& a) { return a.norm(); }

CVector vectorize(const CMatrix& m) {
  return Eigen::Map<const CVector>(m.data(), m.size());
}

CMatrix unvectorize(const CVector& v, int rows, int cols) {
  if (v.size() != static_cast<Eigen::Index>(rows) * cols) {
    throw InputError("unvectorize: length does not match shape");
  }
  return Eigen::Map<const CMatrix>(v.data(), rows, cols);
}

const char* to_string(SubspaceRelation r) {
  switch (r) {
    case SubspaceRelation::equal: return "equal";
    case SubspaceRelation::first_in_second: return "first_in_second";
    case SubspaceRelation::second_in_first: return "second_in_first";
    case SubspaceRelation::incomparable: return "incomparable";
  }
  return "?";
}

Subspace::Subspace(int ambient_dim, CMatrix basis)
    : ambient_dim_(ambient_dim), basis_(std::move(basis)) {
  if (ambient_dim_ < 0) throw InputError("Subspace: negative ambient dimension");
  if (basis_.size() == 0) basis_.resize(ambient_dim_, 0);
  if (basis_.rows() != ambient_dim_) {
    throw InputError("Subspace: basis rows do not match ambient dimension");
  }
  if (basis_.cols() > basis_.rows()) {
    throw InputError("Subspace: more basis vectors than ambient dimension");
  }
}

CMatrix Subspace::projector() const {
  if (dimension() == 0) return CMatrix::Zero(ambient_dim_, ambient_dim_);
  return basis_ * basis_.adjoint();
}

double Subspace::residual(const CVector& v) const {
  if (v.size() != ambient_dim_) throw InputError("Subspace::residual: shape mismatch");
  if (dimension() == 0) return v.norm();
  return (v - basis_ * (basis_.adjoint() * v)).norm();
}

CVector Subspace::coefficients(const CVector& v) const {
  return basis_.adjoint() * v;
}

bool Subspace::contains(const CVector& v, double tol) const {
  const double n = v.norm();
  return residual(v) <= tol * std::max(1.0, n);
}

double Subspace::containment_residual(const Subspace& other) const {
  double worst = 0.0;
  for (int i = 0; i < other.dimension(); ++i) {
    worst = std::max(worst, residual(other.basis_vector(i)));
  }
  return worst;
}

Subspace orthonormalize(const std::vector<CVector>& vectors, int ambient_dim,
                        const Tolerances& tol) {
  tol.validate();
  if (vectors.empty()) return Subspace(ambient_dim, CMatrix(ambient_dim, 0));
  CMatrix stacked(ambient_dim, static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != ambient_dim) {
      throw InputError("orthonormalize: vector length does not match ambient dimension");
    }
    stacked.col(static_cast<Eigen::Index>(i)) = vectors[i];
  }
  if (!(stacked.norm() > 0.0)) return Subspace(ambient_dim, CMatrix(ambient_dim, 0));
  SvdResult svd = thin_svd(stacked, true, false);
  const int r = rank_from_sigma(svd.sigma, tol.rank_tol);
  return Subspace(ambient_dim, svd.u.leftCols(r));
}

Subspace span_of_matrices(const std::vector<CMatrix>& mats, int rows, int cols,
                          const Tolerances& tol) {
  std::vector<CVector> vecs;
  vecs.reserve(mats.size());
  for (const CMatrix& m : mats) {
    if (m.rows() != rows || m.cols() != cols) {
      throw InputError("span_of_matrices: shape mismatch");
    }
    vecs.push_back(vectorize(m));
  }
  return orthonormalize(vecs, rows * cols, tol);
}

SubspaceComparison subspace_compare(const Subspace& s1, const Subspace& s2,
                                    const Tolerances& tol) {
  if (s1.ambient_dim() != s2.ambient_dim()) {
    throw InputError("subspace_compare: ambient dimensions differ");
  }
  SubspaceComparison out;
  out.residual_12 = s2.containment_residual(s1);
  out.residual_21 = s1.containment_residual(s2);
  // ||P1 - P2||_F^2 = ||(1 - P2) B1||_F^2 + ||(1 - P1) B2||_F^2. The
  // cosine form dim1 + dim2 - 2 ||B2^* B1||_F^2 is the same quantity but
  // cancels catastrophically for nearly equal subspaces (it floors at
  // sqrt(eps)); the residual form keeps full precision.
  const CMatrix b1 = s1.basis();
  const CMatrix b2 = s2.basis();
  const double d2 = (b1 - b2 * (b2.adjoint() * b1)).squaredNorm() +
                    (b2 - b1 * (b1.adjoint() * b2)).squaredNorm();
  out.distance = std::sqrt(d2);
  const bool in12 = out.residual_12 <= tol.subspace_tol;
  const bool in21 = out.residual_21 <= tol.subspace_tol;
  if (in12 && in21) {
    out.relation = SubspaceRelation::equal;
  } else if (in12) {
    out.relation = SubspaceRelation::first_in_second;
  } else if (in21) {
    out.relation = SubspaceRelation::second_in_first;
  } else {
    out.relation = SubspaceRelation::incomparable;
  }
  return out;
}

PolarDecomposition polar_partial_isometry(const CMatrix& a, const Tolerances& tol) {
  tol.validate();
  PolarDecomposition out;
  SvdResult svd = thin_svd(a, true, true);
  out.rank = rank_from_sigma(svd.sigma, tol.rank_tol);
  out.positive_part = svd.v * svd.sigma.cast<Complex>().asDiagonal() * svd.v.adjoint();
  if (out.rank == 0) {
    out.partial_isometry = CMatrix::Zero(a.rows(), a.cols());
  } else {
    out.partial_isometry =
        svd.u.leftCols(out.rank) * svd.v.leftCols(out.rank).adjoint();
  }
  return out;
}

Subspace null_space(const CMatrix& m, const Tolerances& tol) {
  tol.validate();
  const int cols = static_cast<int>(m.cols());
  if (m.rows() == 0 || !(m.norm() > 0.0)) {
    return Subspace(cols, CMatrix::Identity(cols, cols));
  }
  unsigned opts = Eigen::ComputeFullV;
  Eigen::VectorXd sigma;
  CMatrix v;
  if (m.rows() * m.cols() <= 64 * 64) {
    Eigen::JacobiSVD<CMatrix> svd(m, opts);
    sigma = svd.singularValues();
    v = svd.matrixV();
  } else {
    Eigen::BDCSVD<CMatrix> svd(m, opts);
    sigma = svd.singularValues();
    v = svd.matrixV();
  }
  const int r = rank_from_sigma(sigma, tol.rank_tol);
  return Subspace(cols, v.rightCols(cols - r));
}

Subspace orthogonal_complement(const Subspace& s, const Tolerances& tol) {
  const int n = s.ambient_dim();
  if (s.dimension() == 0) return Subspace(n, CMatrix::Identity(n, n));
  if (s.dimension() == n) return Subspace(n, CMatrix(n, 0));
  Eigen::HouseholderQR<CMatrix> qr(s.basis());
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  (void)tol;
  return Subspace(n, q.rightCols(n - s.dimension()));
}

Subspace intersect(const Subspace& a, const Subspace& b, const Tolerances& tol) {
  if (a.ambient_dim() != b.ambient_dim()) {
    throw InputError("intersect: ambient dimensions differ");
  }
  const int n = a.ambient_dim();
  if (a.dimension() == 0 || b.dimension() == 0) return Subspace(n, CMatrix(n, 0));
  // x in both spans iff (I - Pa) x = 0 and (I - Pb) x = 0.
  CMatrix stacked(2 * n, n);
  stacked.topRows(n) = CMatrix::Identity(n, n) - a.projector();
  stacked.bottomRows(n) = CMatrix::Identity(n, n) - b.projector();
  return null_space(stacked, tol);
}

}  // namespace wflow
