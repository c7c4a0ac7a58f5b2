#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wflow/gns.hpp"

namespace wflow {

/// The nonnegative-grade half of a standard form: the subspace H+ spanned
/// by the coordinate blocks of grade n >= 0, its projector, and the two
/// analytic (non-self-adjoint) algebras obtained by compressing left and
/// right multiplication by nonnegative-grade elements to H+.
struct HardyStructure {
  GnsRealization g;
  std::vector<int> plus_coords;  // H coordinates with grade >= 0, ascending
  Subspace hplus;                // ambient h_dim
  CMatrix pplus;                 // h_dim x h_dim diagonal 0/1 projector

  /// Basis of the nonnegative-grade part of the algebra, graded order,
  /// as d x d matrices; preimage of the compressed algebra below.
  std::vector<CMatrix> mplus_preimage;
  std::vector<int> plus_grades;  // grade of each preimage element

  /// Compressions, aligned with mplus_preimage: left multiplication and
  /// right multiplication cut down to H+.
  std::vector<CMatrix> mplus_ops;
  std::vector<CMatrix> mprime_plus_ops;

  /// Carriers on H+ (unital, not star-closed).
  StarAlgebra mplus;
  StarAlgebra mprime_plus;

  [[nodiscard]] int plus_dim() const { return static_cast<int>(plus_coords.size()); }

  /// Submatrix of an operator on H at the H+ coordinates.
  [[nodiscard]] CMatrix compress(const CMatrix& op_on_h) const;

  /// Zero-padded embedding of an operator on H+ back into operators on H.
  [[nodiscard]] CMatrix expand(const CMatrix& op_on_hplus) const;
};

/// Requires nothing beyond a valid realization; a trivial action yields
/// H+ = H with both carriers the full (left/right) algebras.
HardyStructure build_hardy(const GnsRealization& g);

/// Least positive spectral point; absent when the spectrum is {0}.
std::optional<int> min_positive_spectrum(const WStarSystem& sys);

/// Searches the grade-n component for a unitary element: polar parts of
/// the component basis, the identity when n = 0, and seeded random
/// combinations. Absent when the search fails (for n > 0 in finite
/// dimension it always fails; see nogo_report).
std::optional<CMatrix> find_unitary_in_subspace(const WStarSystem& sys, int n,
                                                std::uint64_t seed = 0);

struct NogoReport {
  std::vector<CheckItem> items;
  bool pass = false;
};

/// Documents the finite-dimensional obstructions: the spectrum is finite
/// and symmetric, no grade n > 0 contains a unitary, and an abelian
/// algebra forces a trivial action.
NogoReport nogo_report(const WStarSystem& sys);

/// (I - lambda w)^{-1} b for unitary w and |lambda| < 1.
CMatrix resolvent_series(const CMatrix& w, Complex lambda, const CMatrix& b,
                         const Tolerances& tol = {});

struct VandermondeCoefficients {
  std::vector<Complex> lambdas;
  std::vector<Complex> mus;
  double residual = 0.0;   // defining-system residual
  double mu_bound = 0.0;   // 1 / (2^n eps^n sin(pi/(n+1))^n)
};

/// lambdas are the n+1 roots of lambda^{n+1} = eps^{n+1}; mus solve
/// sum_i mu_i lambda_i^j = delta_{jn} for j = 0..n.
VandermondeCoefficients vandermonde_coefficients(int n, double eps);

struct ApproxCertificate {
  int n = 0;
  double eps = 0.0;
  std::vector<Complex> lambdas;
  std::vector<Complex> mus;
  double achieved_error = 0.0;  // operator norm of approx - w^n
  double bound = 0.0;           // eps / (2^n sin(pi/(n+1))^n (1 - eps))
  [[nodiscard]] bool valid() const { return achieved_error <= bound + 1e-10; }
};

/// Approximates w^n by the resolvent combination sum_i mu_i (I-lambda_i w)^{-1}
/// and certifies the achieved operator-norm error against the closed bound.
ApproxCertificate power_approximation(const CMatrix& w, int n, double eps,
                                      const Tolerances& tol = {});

/// Rank of the (N+1) x count matrix whose columns are the profiles
/// (1, lambda, ..., lambda^N); all |lambda| < 1 required.
int eigenvector_span_rank(const std::vector<Complex>& lambdas, int big_n,
                          const Tolerances& tol = {});

struct CompressionShift {
  CMatrix s;          // p_+ rep(v) restricted to H+
  CMatrix s_adjoint;  // annihilates grades < n, acts as rep(v*) above
  double adjoint_residual = 0.0;
};

/// Shift-type compression of an element v of the grade-n component, n > 0.
CompressionShift compression_shift(const HardyStructure& h, const CMatrix& v, int n);

struct CornerDecomposition {
  std::vector<CMatrix> f_list;   // per-round extracted support projections
  CMatrix f_total;               // accumulated projection in M_0
  CMatrix residual_projection;   // 1 - f
  std::vector<CheckItem> certificates;
  bool hypothesis_absent = false;  // no normal partial isometries found
  std::string outcome;             // "corners complete" | "hypothesis absent"
};

/// Iterative extraction of orthogonal families of projections supported
/// by normal partial isometries in the least-positive-grade component,
/// with the terminal corner identity (1-f) M+ (1-f) = (1-f) M_0 (1-f)
/// checked on the residual. Requires a nontrivial spectrum. In finite
/// dimension nonzero normal partial isometries cannot exist at positive
/// grade, so the expected outcome is "hypothesis absent".
CornerDecomposition corner_decomposition(const WStarSystem& sys,
                                         const HardyStructure& h,
                                         std::uint64_t seed = 0);

}  // namespace wflow
