#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "wflow/flow.hpp"

namespace wflow {

/// An invariant faithful state phi = phi0 o P0, held through its effective
/// zero-grade density: phi(m) = tr(density * m).
struct State {
  CMatrix density;

  [[nodiscard]] Complex value(const CMatrix& m) const;
};

/// Default phi0 is the normalized ambient trace restricted to the
/// fixed-point algebra; a positive-definite density supplies a
/// non-tracial phi0 instead. Rejects states whose Gram form on the
/// fixed-point algebra is singular.
State canonical_state(const WStarSystem& sys,
                      const std::optional<CMatrix>& phi0_density = {});

/// Standard form of (M, alpha, phi): H carries the GNS inner product in
/// orthonormal coordinates aligned with the spectral grading, so the
/// implementing unitary is diagonal with integer exponents u_weights.
/// Conjugate-linear operators follow the ConjugateLinearOp convention.
class GnsRealization {
 public:
  GnsRealization() = default;

  static GnsRealization build(const WStarSystem& sys, const State& state);

  [[nodiscard]] const WStarSystem& system() const { return sys_; }
  [[nodiscard]] const State& state() const { return state_; }
  [[nodiscard]] const Tolerances& tol() const { return sys_.tol(); }
  [[nodiscard]] int h_dim() const { return h_dim_; }

  [[nodiscard]] const CMatrix& gram() const { return gram_; }
  [[nodiscard]] const CMatrix& gram_root() const { return gram_root_; }
  [[nodiscard]] const CVector& xi0() const { return xi0_; }
  [[nodiscard]] const std::vector<int>& u_weights() const { return u_weights_; }

  /// Left multiplication in GNS coordinates; m must lie in the algebra.
  [[nodiscard]] CMatrix rep(const CMatrix& m) const;
  /// Right multiplication; spans the commutant on H.
  [[nodiscard]] CMatrix commutant_rep(const CMatrix& m) const;

  /// m xi0 as an H coordinate vector.
  [[nodiscard]] CVector embed(const CMatrix& m) const;
  /// Inverse of embed.
  [[nodiscard]] CMatrix unembed(const CVector& xi) const;

  [[nodiscard]] const ConjugateLinearOp& s_op() const { return s_; }
  [[nodiscard]] const ConjugateLinearOp& f_op() const { return f_; }
  [[nodiscard]] const ConjugateLinearOp& j_op() const { return j_; }
  [[nodiscard]] const CMatrix& delta() const { return delta_; }

  /// J x J for a linear operator x on H.
  [[nodiscard]] CMatrix j_conjugate(const CMatrix& x) const;

  [[nodiscard]] CMatrix implementing_unitary(Complex z) const;

  /// Coordinate block of H at grade n; zero subspace when absent.
  [[nodiscard]] Subspace h_spectral_subspace(int n) const;
  [[nodiscard]] std::vector<int> h_spectrum() const;
  [[nodiscard]] const std::vector<std::pair<int, std::vector<int>>>& h_blocks() const {
    return h_blocks_;
  }

  /// Span of commutant_rep over the algebra basis, ambient h_dim^2.
  [[nodiscard]] const Subspace& commutant_span() const { return commutant_span_; }

  /// alpha'_z on a commutant operator; the operator must lie in the
  /// commutant span.
  [[nodiscard]] CMatrix commutant_action(Complex z, const CMatrix& mprime) const;

  /// Spectral component of a commutant operator under alpha', computed by
  /// an exact discrete average over roots of unity.
  [[nodiscard]] CMatrix commutant_spectral_component(int n, const CMatrix& x) const;

 private:
  WStarSystem sys_;
  State state_;
  int h_dim_ = 0;
  CMatrix gram_, gram_root_, gram_root_inv_;
  CVector xi0_;
  std::vector<int> u_weights_;
  std::vector<std::pair<int, std::vector<int>>> h_blocks_;
  ConjugateLinearOp s_, f_, j_;
  CMatrix delta_;
  Subspace commutant_span_;
};

struct CheckItem {
  std::string anchor;
  double residual = 0.0;
  bool pass = false;
  std::string note;
};

struct IdentityReport {
  std::vector<CheckItem> items;
  double max_residual = 0.0;
  bool pass = false;
};

/// Residual checks for the standard-form identities: the commutant action
/// and its grading, the H grading carried by the implementing unitaries,
/// and the modular relations tying S, F, J and Delta together.
IdentityReport verify_standard_identities(const GnsRealization& g);

}  // namespace wflow
