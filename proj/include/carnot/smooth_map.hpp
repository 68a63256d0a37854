#pragma once
/// Maps between open subsets of the group in Jacobian coordinates.
///
/// Polynomial and linear maps differentiate exactly; opaque evaluators use
/// central differences with step 1e-5*(1+|x|). An inverse evaluator is
/// optional and can be supplied explicitly or by Newton iteration.

#include "carnot/algebra.hpp"
#include "carnot/polynomial.hpp"

#include <memory>
#include <optional>

namespace carnot {

class SmoothMap {
 public:
  using Eval = std::function<Vec(const Vec&)>;
  using Jac = std::function<Mat(const Vec&)>;

  SmoothMap() = default;

  static SmoothMap identity(int d);
  static SmoothMap polynomial(PolyVec comps, std::string name);
  static SmoothMap linear(const Mat& A, std::string name);
  /// x -> a*x, with inverse x -> a^{-1}*x.
  static SmoothMap translation(const StratifiedAlgebra& alg, const Vec& a);
  /// x -> x*a.
  static SmoothMap right_translation(const StratifiedAlgebra& alg, const Vec& a);
  static SmoothMap dilation(const StratifiedAlgebra& alg, double r);
  static SmoothMap opaque(int d, Eval f, std::string name, Jac jac = nullptr);

  SmoothMap with_inverse(const SmoothMap& inv) const;
  /// Inverse by Newton iteration started at the image point.
  SmoothMap with_newton_inverse() const;
  /// (*this) o inner.
  SmoothMap compose(const SmoothMap& inner) const;
  SmoothMap renamed(std::string name) const;

  int dim() const;
  const std::string& name() const;
  Vec operator()(const Vec& x) const;
  Mat jacobian(const Vec& x) const;
  double jdet(const Vec& x) const { return jacobian(x).determinant(); }
  bool exact_jacobian() const;
  bool has_inverse() const { return static_cast<bool>(inv_); }
  /// Throws InverseUnavailable.
  SmoothMap inverse() const;
  /// Polynomial components when the map is polynomial.
  const std::optional<PolyVec>& polynomial_components() const;

  struct Impl;

 private:
  SmoothMap(std::shared_ptr<const Impl> f, std::shared_ptr<const Impl> inv)
      : impl_(std::move(f)), inv_(std::move(inv)) {}
  std::shared_ptr<const Impl> impl_;
  std::shared_ptr<const Impl> inv_;
};

/// Jacobian by central differences, step 1e-5*(1+|x|).
Mat finite_difference_jacobian(const SmoothMap::Eval& f, const Vec& x);

}  // namespace carnot
