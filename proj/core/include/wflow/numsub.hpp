#pragma once

#include <vector>

#include "wflow/types.hpp"

namespace wflow {

/// Hilbert-Schmidt inner product tr(b* a), linear in a.
Complex hs_inner(const CMatrix& a, const CMatrix& b);

double hs_norm(const CMatrix& a);

/// Column-major flattening into an ambient coordinate vector.
CVector vectorize(const CMatrix& m);

CMatrix unvectorize(const CVector& v, int rows, int cols);

enum class SubspaceRelation { equal, first_in_second, second_in_first, incomparable };

const char* to_string(SubspaceRelation r);

/// A subspace of C^ambient held as a matrix with orthonormal columns.
/// The zero subspace is represented by a basis with zero columns.
class Subspace {
 public:
  Subspace() = default;
  Subspace(int ambient_dim, CMatrix basis);

  [[nodiscard]] int ambient_dim() const { return ambient_dim_; }
  [[nodiscard]] int dimension() const { return static_cast<int>(basis_.cols()); }
  [[nodiscard]] const CMatrix& basis() const { return basis_; }
  [[nodiscard]] CVector basis_vector(int i) const { return basis_.col(i); }

  /// Orthogonal projector, ambient x ambient.
  [[nodiscard]] CMatrix projector() const;

  /// || v - P v ||.
  [[nodiscard]] double residual(const CVector& v) const;

  /// Projection coefficients B^* v.
  [[nodiscard]] CVector coefficients(const CVector& v) const;

  [[nodiscard]] bool contains(const CVector& v, double tol) const;

  /// max over the other basis of residual(); 0 for the zero subspace.
  [[nodiscard]] double containment_residual(const Subspace& other) const;

 private:
  int ambient_dim_ = 0;
  CMatrix basis_;
};

/// SVD span of a vector list; rank cut at rank_tol relative to the
/// leading singular value. An empty or all-zero list gives dimension 0.
Subspace orthonormalize(const std::vector<CVector>& vectors, int ambient_dim,
                        const Tolerances& tol);

/// Matrix-space convenience: vectorizes, then spans.
Subspace span_of_matrices(const std::vector<CMatrix>& mats, int rows, int cols,
                          const Tolerances& tol);

struct SubspaceComparison {
  SubspaceRelation relation = SubspaceRelation::incomparable;
  double distance = 0.0;     // Frobenius distance of the two projectors
  double residual_12 = 0.0;  // containment residual of s1 in s2
  double residual_21 = 0.0;
};

/// Containment decided at subspace_tol; the distance is exact either way.
SubspaceComparison subspace_compare(const Subspace& s1, const Subspace& s2,
                                    const Tolerances& tol);

/// Polar factorization a = w * pos with pos = |a| and w a partial isometry
/// whose initial space is the range of |a|; rank decided at rank_tol.
struct PolarDecomposition {
  CMatrix partial_isometry;
  CMatrix positive_part;
  int rank = 0;
};

PolarDecomposition polar_partial_isometry(const CMatrix& a, const Tolerances& tol);

/// Conjugate-linear operator stored as "conjugate coordinates, then apply
/// mat". Under <T xi, eta> = <T* eta, xi> the adjoint is the plain
/// transpose of mat, and compositions of two such maps are linear.
struct ConjugateLinearOp {
  CMatrix mat;

  [[nodiscard]] CVector apply(const CVector& xi) const { return mat * xi.conjugate(); }
  [[nodiscard]] ConjugateLinearOp adjoint() const { return {mat.transpose()}; }
  /// this o other: a linear map.
  [[nodiscard]] CMatrix compose(const ConjugateLinearOp& other) const {
    return mat * other.mat.conjugate();
  }
  /// this o x for linear x: conjugate-linear again.
  [[nodiscard]] ConjugateLinearOp compose_linear(const CMatrix& x) const {
    return {mat * x.conjugate()};
  }
};

/// Right null space of m, rank cut at rank_tol.
Subspace null_space(const CMatrix& m, const Tolerances& tol);

/// Orthonormal basis of the orthogonal complement.
Subspace orthogonal_complement(const Subspace& s, const Tolerances& tol);

/// Intersection of two subspaces of the same ambient space.
Subspace intersect(const Subspace& a, const Subspace& b, const Tolerances& tol);

}  // namespace wflow
