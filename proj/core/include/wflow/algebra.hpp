#pragma once

#include <vector>

#include "wflow/numsub.hpp"

namespace wflow {

/// A linear subspace of d x d complex matrices closed under products.
/// unital and star_closed are validated structure flags, not hints.
class StarAlgebra {
 public:
  StarAlgebra() = default;

  /// Spans the input, then validates the closure properties.
  static StarAlgebra from_span(int d, const std::vector<CMatrix>& spanning,
                               bool unital, bool star_closed, const Tolerances& tol);

  /// Adopts an already HS-orthonormal basis without re-spanning, so the
  /// caller's basis order survives. Validates orthonormality and closure.
  static StarAlgebra from_orthonormal_basis(int d, CMatrix basis, bool unital,
                                            bool star_closed, const Tolerances& tol);

  [[nodiscard]] int matrix_dim() const { return d_; }
  [[nodiscard]] int size() const { return space_.dimension(); }
  [[nodiscard]] const Subspace& space() const { return space_; }
  [[nodiscard]] bool unital() const { return unital_; }
  [[nodiscard]] bool star_closed() const { return star_closed_; }
  [[nodiscard]] const Tolerances& tol() const { return tol_; }

  [[nodiscard]] CMatrix basis_matrix(int i) const;
  [[nodiscard]] std::vector<CMatrix> basis_matrices() const;

  /// Membership at residual_tol relative to max(1, ||m||).
  [[nodiscard]] bool contains(const CMatrix& m, double* residual = nullptr) const;

 private:
  int d_ = 0;
  Subspace space_;
  bool unital_ = false;
  bool star_closed_ = false;
  Tolerances tol_;
};

/// Multiplicative closure of the generators, capped at d^2 dimensions and
/// 2d enlargement sweeps; exceeding the sweep cap is an internal error.
StarAlgebra generate(int d, const std::vector<CMatrix>& generators,
                     bool include_adjoints, bool include_unit, const Tolerances& tol);

/// Relative commutant inside the full d x d matrix algebra. Always unital;
/// star_closed when the input is.
StarAlgebra commutant(const StarAlgebra& a);

struct BicommutantReport {
  double distance = 0.0;
  bool equal = false;
};

/// Double-commutant comparison; requires star_closed and unital input.
BicommutantReport bicommutant_check(const StarAlgebra& a);

bool is_abelian(const StarAlgebra& a);

StarAlgebra center(const StarAlgebra& a);

/// Block-diagonal sum inside M_{da+db}.
StarAlgebra direct_sum(const StarAlgebra& a, const StarAlgebra& b);

/// Subspace of n x n matrices commuting with every listed operator.
Subspace commutant_of_operators(const std::vector<CMatrix>& ops, int n,
                                const Tolerances& tol);

}  // namespace wflow
