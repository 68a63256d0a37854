#include "carnot/fields.hpp"

#include <cmath>
#include <sstream>

namespace carnot {
namespace {

// b_n = B_n / n! with B_1 = +1/2: the series of z/(1-e^{-z}).
double series_coefficient(int n) {
  static const double b[] = {1.0,           0.5, 1.0 / 12.0, 0.0, -1.0 / 720.0, 0.0,
                             1.0 / 30240.0, 0.0, -1.0 / 1209600.0, 0.0, 1.0 / 47900160.0};
  if (n > 10) fail("Unsupported", "step above 11");
  return b[n];
}

}  // namespace

Polynomial LeftInvariantField::apply(const Polynomial& f) const {
  Polynomial r(f.nvars());
  for (size_t m = 0; m < coeffs.size(); ++m)
    if (!coeffs[m].is_zero()) r += coeffs[m] * f.derivative(static_cast<int>(m));
  r.prune(0.0);
  return r;
}

double LeftInvariantField::apply(const Polynomial& f, const Vec& x) const {
  return f.gradient(x).dot(at(x));
}

double LeftInvariantField::apply(const ScalarFn& f, const Vec& x) const {
  return directional_derivative(f, x, at(x));
}

FieldFn LeftInvariantField::evaluator() const {
  PolyVec c = coeffs;
  return [c](const Vec& x) { return evaluate(c, x); };
}

std::vector<LeftInvariantField> derive_left_invariant_fields(const StratifiedAlgebra& alg) {
  // d/dt (x * t e_j)|_{t=0} = sum_n b_n ad_x^n e_j, with x symbolic.
  const int d = alg.dim();
  PolyVec X;
  for (int i = 0; i < d; ++i) X.push_back(Polynomial::variable(d, i));
  std::vector<LeftInvariantField> out;
  for (int j = 0; j < d; ++j) {
    PolyVec term(d, Polynomial(d));
    term[j] = Polynomial::constant(d, 1.0);
    PolyVec acc = term;
    for (int n = 1; n < alg.step(); ++n) {
      term = alg.bracket(X, term);
      const double b = series_coefficient(n);
      if (b != 0.0)
        for (int m = 0; m < d; ++m) acc[m] += term[m] * b;
    }
    for (auto& p : acc) p.prune(0.0);
    out.push_back({j, acc});
  }
  return out;
}

HomogeneityAudit audit_homogeneity(const StratifiedAlgebra& alg,
                                   const std::vector<LeftInvariantField>& fields) {
  HomogeneityAudit a;
  for (const auto& f : fields) {
    for (int m = 0; m < alg.dim(); ++m) {
      ++a.slots;
      const auto& p = f.coeffs[m];
      const int want = alg.order(m) - alg.order(f.index);
      std::ostringstream os;
      os << "Z_" << f.index + 1 << " d/dx_" << m + 1 << ": " << p.str();
      if (m == f.index) {
        if (p.terms().size() != 1 || p.weighted_degree(alg.weights()).value_or(-1) != 0 ||
            p.terms().begin()->second != 1.0) {
          a.ok = false;
          a.failures.push_back(os.str() + " (leading coefficient must be 1)");
        }
        continue;
      }
      if (p.is_zero()) continue;
      if (want <= 0) {
        a.ok = false;
        a.failures.push_back(os.str() + " (must vanish)");
        continue;
      }
      const auto deg = p.weighted_degree(alg.weights());
      if (!deg || *deg != want) {
        a.ok = false;
        a.failures.push_back(os.str() + " (expected weighted degree " + std::to_string(want) + ")");
      }
    }
  }
  return a;
}

double bracket_closure_residual(const StratifiedAlgebra& alg,
                                const std::vector<LeftInvariantField>& fields) {
  const int d = alg.dim();
  double worst = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      for (int m = 0; m < d; ++m) {
        // [Z_i, Z_j]_m = Z_i (Z_j)_m - Z_j (Z_i)_m
        Polynomial r = fields[i].apply(fields[j].coeffs[m]) - fields[j].apply(fields[i].coeffs[m]);
        for (int k = 0; k < d; ++k) {
          const double c = alg.constant(i, j, k);
          if (c != 0.0) r = r - fields[k].coeffs[m] * c;
        }
        for (const auto& [e, c] : r.terms()) worst = std::max(worst, std::abs(c));
      }
  return worst;
}

double left_invariance_residual(const Group& g, const Polynomial& f, const Vec& a, const Vec& x) {
  const int d = g.dim();
  PolyVec X, A;
  for (int i = 0; i < d; ++i) {
    X.push_back(Polynomial::variable(d, i));
    A.push_back(Polynomial::constant(d, a(i)));
  }
  const PolyVec ax = bch_multiply(g.alg(), A, X);
  const Polynomial fa = substitute(f, ax);
  const Vec y = g.mul(a, x);
  double worst = 0.0;
  for (const auto& Z : g.fields()) {
    const double rhs = Z.apply(f, y);
    worst = std::max(worst, std::abs(Z.apply(fa, x) - rhs) / (1.0 + std::abs(rhs)));
  }
  return worst;
}

Group::Group(StratifiedAlgebra alg) : alg_(std::move(alg)), fields_(derive_left_invariant_fields(alg_)) {}

Mat Group::frame(const Vec& x) const {
  Mat E(dim(), dim());
  for (int j = 0; j < dim(); ++j) E.col(j) = fields_[j].at(x);
  return E;
}

double directional_derivative(const ScalarFn& f, const Vec& x, const Vec& v) {
  const double vn = v.norm();
  if (vn == 0.0) return 0.0;
  const double h = 1e-5 * (1.0 + x.norm()) / vn;
  const double fp = f(x + h * v), fm = f(x - h * v);
  if (!std::isfinite(fp) || !std::isfinite(fm))
    fail("NonDifferentiable", "function not finite on the difference stencil");
  return (fp - fm) / (2.0 * h);
}

double apply_field(const FieldFn& X, const ScalarFn& f, const Vec& x) {
  return directional_derivative(f, x, X(x));
}

Mat field_jacobian(const FieldFn& X, const Vec& x) { return finite_difference_jacobian(X, x); }

Vec field_bracket(const FieldFn& X, const FieldFn& Y, const Vec& x) {
  return field_jacobian(Y, x) * X(x) - field_jacobian(X, x) * Y(x);
}

Vec pushforward_vector(const SmoothMap& phi, const Vec& x, const Vec& v) {
  return phi.jacobian(x) * v;
}

FieldFn pushforward_field(const SmoothMap& phi, const FieldFn& X) {
  const SmoothMap inv = phi.inverse();
  return [phi, inv, X](const Vec& y) {
    const Vec x = inv(y);
    return Vec(phi.jacobian(x) * X(x));
  };
}

ScalarFn conjugation_correction(const Group& g, const SmoothMap& phi, int k) {
  const SmoothMap inv = phi.inverse();
  const LeftInvariantField Xk = g.field(k);
  return [phi, inv, Xk](const Vec& y) {
    const Vec x = inv(y);
    auto sqrt_jdet = [&phi](const Vec& z) {
      const double J = phi.jdet(z);
      if (!(J > 0.0)) fail("SingularJacobian", "Jacobian determinant not positive");
      return std::sqrt(J);
    };
    return Xk.apply(ScalarFn(sqrt_jdet), x) / sqrt_jdet(x);
  };
}

}  // namespace carnot
