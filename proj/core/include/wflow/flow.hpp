#pragma once

#include <optional>
#include <vector>

#include "wflow/algebra.hpp"

namespace wflow {

/// Periodic one-parameter group Ad(diag(z^w)) given by integer weights.
struct CircleAction {
  std::vector<int> weights;

  [[nodiscard]] int dimension() const { return static_cast<int>(weights.size()); }
  /// max weight minus min weight; 0 for a trivial action.
  [[nodiscard]] int spread() const;
};

/// Eigendecomposition of a Hermitian generator with near-integer spectrum,
/// returning the weight action in its eigenbasis. Non-integer eigenvalue
/// phases are rejected.
struct DiagonalizedAction {
  CircleAction action;
  CMatrix basis;  // columns are the eigenvectors; generator = B diag(w) B^*
};

DiagonalizedAction action_from_generator(const CMatrix& k, const Tolerances& tol);

/// alpha_z(m): entry (j, k) scales by z^{w_j - w_k}. Requires |z| = 1.
CMatrix act(const CircleAction& a, Complex z, const CMatrix& m);

/// Entrywise spectral component: keeps m_jk exactly when w_j - w_k = n.
CMatrix spectral_projection(const CircleAction& a, int n, const CMatrix& m);

/// The same component through an exact discrete average over the N-th
/// roots of unity, N = 2 * spread + |n| + 1.
CMatrix spectral_projection_average(const CircleAction& a, int n, const CMatrix& m);

struct SpectralBlock {
  int n = 0;
  Subspace sub;  // ambient d^2
};

/// A circle action together with an invariant matrix algebra. Construction
/// re-bases the algebra along the grading, so basis index i carries a
/// definite weight grade_of_basis(i) and the grading is exact thereafter.
class WStarSystem {
 public:
  WStarSystem() = default;

  /// Validates invariance: every spectral component of every basis element
  /// must lie back in the span; rejects otherwise.
  static WStarSystem build(const StarAlgebra& m, CircleAction action);

  [[nodiscard]] const StarAlgebra& algebra() const { return algebra_; }
  [[nodiscard]] const CircleAction& action() const { return action_; }
  [[nodiscard]] const Tolerances& tol() const { return algebra_.tol(); }
  [[nodiscard]] int matrix_dim() const { return algebra_.matrix_dim(); }
  [[nodiscard]] int size() const { return algebra_.size(); }

  [[nodiscard]] const std::vector<SpectralBlock>& blocks() const { return blocks_; }
  [[nodiscard]] const std::vector<int>& basis_grades() const { return grades_; }
  [[nodiscard]] int grade_of_basis(int i) const { return grades_.at(i); }

  /// Zero subspace when n is outside the spectrum.
  [[nodiscard]] Subspace spectral_subspace(int n) const;
  [[nodiscard]] std::vector<CMatrix> spectral_basis_matrices(int n) const;

 private:
  StarAlgebra algebra_;
  CircleAction action_;
  std::vector<SpectralBlock> blocks_;
  std::vector<int> grades_;
};

/// Integers n with dim M_n > 0, ascending.
std::vector<int> arveson_spectrum(const WStarSystem& sys);

/// P_0, the conditional expectation onto the fixed-point algebra.
/// Requires m in the span of the system's algebra.
CMatrix fixed_point_expectation(const WStarSystem& sys, const CMatrix& m);

struct GradedProductReport {
  double max_residual = 0.0;
  bool pass = false;
};

/// Checks M_n * M_k lands in M_{n+k} for all spectral pairs.
GradedProductReport graded_product_check(const WStarSystem& sys);

}  // namespace wflow
