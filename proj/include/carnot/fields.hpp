#pragma once
/// Left-invariant vector fields with polynomial coefficients, and the
/// pushforward calculus along smooth maps.

#include "carnot/algebra.hpp"
#include "carnot/smooth_map.hpp"

#include <vector>

namespace carnot {

/// Z_j = sum_m coeffs[m] d/dx_m, where coeffs[j] = 1 and coeffs[m] vanishes
/// unless ord(m) > ord(j). Coefficients come from differentiating the group
/// law, so their sign follows the BCH convention in use.
struct LeftInvariantField {
  int index = 0;
  PolyVec coeffs;

  Vec at(const Vec& x) const { return evaluate(coeffs, x); }
  Polynomial apply(const Polynomial& f) const;
  double apply(const Polynomial& f, const Vec& x) const;
  /// Central differences; throws NonDifferentiable when f is not finite on
  /// the stencil.
  double apply(const ScalarFn& f, const Vec& x) const;
  FieldFn evaluator() const;
};

std::vector<LeftInvariantField> derive_left_invariant_fields(const StratifiedAlgebra& alg);

struct HomogeneityAudit {
  bool ok = true;
  int slots = 0;
  std::vector<std::string> failures;
};
/// Every coefficient of Z_j in d/dx_m must be homogeneous of weighted
/// degree ord(m)-ord(j), and vanish when ord(m) <= ord(j), m != j.
HomogeneityAudit audit_homogeneity(const StratifiedAlgebra& alg,
                                   const std::vector<LeftInvariantField>& fields);

/// Largest coefficient of [Z_i, Z_j] - sum_k c_ijk Z_k over all pairs, with
/// the bracket of fields computed on the polynomial coefficients.
double bracket_closure_residual(const StratifiedAlgebra& alg,
                                const std::vector<LeftInvariantField>& fields);

/// An algebra together with its derived frame.
class Group {
 public:
  explicit Group(StratifiedAlgebra alg);

  const StratifiedAlgebra& alg() const { return alg_; }
  const std::vector<LeftInvariantField>& fields() const { return fields_; }
  const LeftInvariantField& field(int j) const { return fields_[j]; }
  int dim() const { return alg_.dim(); }
  int n1() const { return alg_.n1(); }

  Vec mul(const Vec& x, const Vec& y) const { return bch_multiply(alg_, x, y); }
  double rho(const Vec& x) const { return homogeneous_norm(alg_, x); }
  /// rho(y^{-1} x)
  double dist(const Vec& x, const Vec& y) const { return gauge_distance(alg_, x, y); }
  /// Columns are the Euclidean coordinates of Z_1(x),...,Z_d(x).
  Mat frame(const Vec& x) const;

 private:
  StratifiedAlgebra alg_;
  std::vector<LeftInvariantField> fields_;
};

/// |Z_j(f o L_a)(x) - (Z_j f)(a x)| / (1 + |(Z_j f)(a x)|), maximized over j.
/// Both sides are exact polynomial evaluations.
double left_invariance_residual(const Group& g, const Polynomial& f, const Vec& a, const Vec& x);

/// Directional derivative of f at x along v by central differences.
double directional_derivative(const ScalarFn& f, const Vec& x, const Vec& v);
/// (X f)(x) for a field given by components.
double apply_field(const FieldFn& X, const ScalarFn& f, const Vec& x);
/// Euclidean Jacobian of a field evaluator by central differences.
Mat field_jacobian(const FieldFn& X, const Vec& x);
/// [X,Y](x) = DY(x) X(x) - DX(x) Y(x).
Vec field_bracket(const FieldFn& X, const FieldFn& Y, const Vec& x);

/// J_Phi(x) v.
Vec pushforward_vector(const SmoothMap& phi, const Vec& x, const Vec& v);
/// Phi_*(X) = sum_j ((X Phi_j) o Phi^{-1}) d/dy_j. Throws InverseUnavailable.
FieldFn pushforward_field(const SmoothMap& phi, const FieldFn& X);

/// a_k = (Jdet^{-1/2} X_k Jdet^{1/2}) o Phi^{-1}. Throws SingularJacobian
/// where Jdet <= 0 and InverseUnavailable without an inverse.
ScalarFn conjugation_correction(const Group& g, const SmoothMap& phi, int k);

}  // namespace carnot
