#pragma once
/// Sparse real polynomials in d variables. Used for the coefficients of
/// left-invariant fields and for polynomial maps.

#include "carnot/common.hpp"

#include <map>
#include <optional>
#include <vector>

namespace carnot {

class Polynomial {
 public:
  using Exponents = std::vector<int>;

  explicit Polynomial(int nvars = 0) : n_(nvars) {}

  static Polynomial constant(int nvars, double c);
  static Polynomial variable(int nvars, int i);
  static Polynomial monomial(const Exponents& e, double c);

  int nvars() const { return n_; }
  const std::map<Exponents, double>& terms() const { return terms_; }

  void add_term(const Exponents& e, double c);
  /// Drops coefficients with |c| <= tol.
  void prune(double tol = 0.0);
  bool is_zero() const { return terms_.empty(); }

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(double s) const;
  Polynomial& operator+=(const Polynomial& o);

  Polynomial derivative(int i) const;
  double operator()(const Vec& x) const;
  /// Gradient at x, exact.
  Vec gradient(const Vec& x) const;

  /// Weighted degree sum_i w_i e_i when every monomial shares it. Returns
  /// nullopt for mixed degrees; the zero polynomial reports nullopt too.
  std::optional<int> weighted_degree(const std::vector<int>& weights) const;
  int total_degree() const;

  std::string str() const;

 private:
  int n_;
  std::map<Exponents, double> terms_;
};

using PolyVec = std::vector<Polynomial>;

/// Evaluates every component at x.
Vec evaluate(const PolyVec& p, const Vec& x);

/// f(x_1(y),...,x_n(y)) with x_i polynomials in a common set of variables.
Polynomial substitute(const Polynomial& f, const PolyVec& x);

/// Parses expressions such as "x1 + x2^2/2 - 3*x1*x3" in nvars variables
/// x1..xn. Division is allowed by numeric constants only. Throws SyntaxError.
Polynomial parse_polynomial(const std::string& text, int nvars);
/// Components separated by ';'.
PolyVec parse_polyvec(const std::string& text, int nvars);

}  // namespace carnot
