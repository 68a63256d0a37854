#pragma once
/// Stratified nilpotent Lie algebras in Jacobian coordinates and the group
/// law obtained from the Baker-Campbell-Hausdorff series.

#include "carnot/common.hpp"
#include "carnot/polynomial.hpp"

#include <map>
#include <utility>
#include <vector>

namespace carnot {

/// Unvalidated structure data, 0-based. Brackets are keyed by the ordered
/// pair exactly as written in the source so that validation can report
/// antisymmetry problems.
struct RawAlgebra {
  int dimension = 0;
  std::vector<int> strata;
  std::map<std::pair<int, int>, std::map<int, double>> brackets;
};

struct Violation {
  std::string kind;    ///< GradingViolation, JacobiViolation, NotGenerated, ...
  std::string detail;  ///< 1-based indices as they appear in group files
};

class StratifiedAlgebra {
 public:
  /// Throws Error whose kind is the first violation found; use check() for
  /// the full list.
  static StratifiedAlgebra validate(const RawAlgebra& raw);
  static std::vector<Violation> check(const RawAlgebra& raw);

  static StratifiedAlgebra heisenberg(int n = 1);
  static StratifiedAlgebra engel();
  static StratifiedAlgebra abelian(int d);

  int dim() const { return d_; }
  int step() const { return static_cast<int>(strata_.size()); }
  int homogeneous_dimension() const { return Q_; }
  int n1() const { return strata_[0]; }
  const std::vector<int>& strata() const { return strata_; }
  /// Stratum (1-based) of basis vector i.
  int order(int i) const { return order_[i]; }
  const std::vector<int>& weights() const { return order_; }
  int stratum_offset(int s) const;  ///< first index of stratum s (1-based s)

  /// c_ijk for i<j, sparse.
  const std::map<std::pair<int, int>, std::map<int, double>>& constants() const {
    return c_;
  }
  double constant(int i, int j, int k) const;

  Vec bracket(const Vec& x, const Vec& y) const;
  PolyVec bracket(const PolyVec& x, const PolyVec& y) const;
  /// Matrix of ad_x.
  Mat ad(const Vec& x) const;

  std::string describe() const;

 private:
  int d_ = 0;
  int Q_ = 0;
  std::vector<int> strata_;
  std::vector<int> order_;
  std::map<std::pair<int, int>, std::map<int, double>> c_;
};

/// x*y via the degree recursion for the BCH series, truncated at the step.
Vec bch_multiply(const StratifiedAlgebra& alg, const Vec& x, const Vec& y);
/// Same series over polynomial vectors; used to obtain translations and
/// field coefficients symbolically.
PolyVec bch_multiply(const StratifiedAlgebra& alg, const PolyVec& x, const PolyVec& y);

inline Vec group_inverse(const Vec& x) { return -x; }

Vec dilate(const StratifiedAlgebra& alg, double r, const Vec& x);
/// Matrix of delta_r in Jacobian coordinates.
Mat dilation_matrix(const StratifiedAlgebra& alg, double r);

/// rho(x) = (sum |x_k|^{2 s!/ord(k)})^{1/(2 s!)} with s the step.
double homogeneous_norm(const StratifiedAlgebra& alg, const Vec& x);
/// rho(y^{-1} x).
double gauge_distance(const StratifiedAlgebra& alg, const Vec& x, const Vec& y);

struct A0Estimate {
  double value;
  int samples;
};
/// Max of rho(xy)/(rho(x)+rho(y)) over random pairs drawn at random scales.
A0Estimate estimate_A0(const StratifiedAlgebra& alg, int samples, Rng& rng);

/// Random point with first-stratum coordinates in [-s,s] and stratum k
/// coordinates in [-s^k, s^k].
Vec random_point(const StratifiedAlgebra& alg, Rng& rng, double s = 1.0);

}  // namespace carnot
