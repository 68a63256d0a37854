#include "carnot/smooth_map.hpp"

#include <cmath>

namespace carnot {

struct SmoothMap::Impl {
  int d = 0;
  std::string name;
  Eval f;
  Jac jac;  // empty -> finite differences
  std::optional<PolyVec> poly;
};

Mat finite_difference_jacobian(const SmoothMap::Eval& f, const Vec& x) {
  const double h = 1e-5 * (1.0 + x.norm());
  const Eigen::Index d = x.size();
  Mat J;
  for (Eigen::Index j = 0; j < d; ++j) {
    Vec xp = x, xm = x;
    xp(j) += h;
    xm(j) -= h;
    const Vec col = (f(xp) - f(xm)) / (2.0 * h);
    if (J.size() == 0) J.resize(col.size(), d);
    J.col(j) = col;
  }
  return J;
}

namespace {

std::shared_ptr<const SmoothMap::Impl> make_impl(int d, std::string name, SmoothMap::Eval f,
                                                 SmoothMap::Jac jac,
                                                 std::optional<PolyVec> poly = std::nullopt) {
  auto p = std::make_shared<SmoothMap::Impl>();
  p->d = d;
  p->name = std::move(name);
  p->f = std::move(f);
  p->jac = std::move(jac);
  p->poly = std::move(poly);
  return p;
}

std::shared_ptr<const SmoothMap::Impl> poly_impl(PolyVec comps, std::string name) {
  const int d = static_cast<int>(comps.size());
  std::vector<PolyVec> grads(comps.size());
  for (size_t i = 0; i < comps.size(); ++i)
    for (int j = 0; j < d; ++j) grads[i].push_back(comps[i].derivative(j));
  auto f = [comps](const Vec& x) { return evaluate(comps, x); };
  auto jac = [grads, d](const Vec& x) {
    Mat J(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) J(i, j) = grads[i][j](x);
    return J;
  };
  return make_impl(d, std::move(name), f, jac, comps);
}

PolyVec linear_components(const Mat& A) {
  const int d = static_cast<int>(A.rows());
  PolyVec comps(d, Polynomial(d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (A(i, j) != 0.0) comps[i] += Polynomial::variable(d, j) * A(i, j);
  return comps;
}

PolyVec constant_vector(const Vec& a) {
  const int d = static_cast<int>(a.size());
  PolyVec v;
  for (int i = 0; i < d; ++i) v.push_back(Polynomial::constant(d, a(i)));
  return v;
}

PolyVec variables(int d) {
  PolyVec v;
  for (int i = 0; i < d; ++i) v.push_back(Polynomial::variable(d, i));
  return v;
}

std::string vec_str(const Vec& a) {
  std::string s = "(";
  char buf[32];
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%g", i ? "," : "", a(i));
    s += buf;
  }
  return s + ")";
}

}  // namespace

SmoothMap SmoothMap::identity(int d) {
  auto f = poly_impl(variables(d), "id");
  return SmoothMap(f, f);
}

SmoothMap SmoothMap::polynomial(PolyVec comps, std::string name) {
  return SmoothMap(poly_impl(std::move(comps), std::move(name)), nullptr);
}

SmoothMap SmoothMap::linear(const Mat& A, std::string name) {
  Eigen::FullPivLU<Mat> lu(A);
  auto f = poly_impl(linear_components(A), name);
  if (!lu.isInvertible()) return SmoothMap(f, nullptr);
  return SmoothMap(f, poly_impl(linear_components(lu.inverse()), name + "^-1"));
}

SmoothMap SmoothMap::translation(const StratifiedAlgebra& alg, const Vec& a) {
  const int d = alg.dim();
  auto f = poly_impl(bch_multiply(alg, constant_vector(a), variables(d)), "L" + vec_str(a));
  auto g = poly_impl(bch_multiply(alg, constant_vector(-a), variables(d)), "L" + vec_str(-a));
  return SmoothMap(f, g);
}

SmoothMap SmoothMap::right_translation(const StratifiedAlgebra& alg, const Vec& a) {
  const int d = alg.dim();
  auto f = poly_impl(bch_multiply(alg, variables(d), constant_vector(a)), "R" + vec_str(a));
  auto g = poly_impl(bch_multiply(alg, variables(d), constant_vector(-a)), "R" + vec_str(-a));
  return SmoothMap(f, g);
}

SmoothMap SmoothMap::dilation(const StratifiedAlgebra& alg, double r) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "delta_%g", r);
  return linear(dilation_matrix(alg, r), buf);
}

SmoothMap SmoothMap::opaque(int d, Eval f, std::string name, Jac jac) {
  return SmoothMap(make_impl(d, std::move(name), std::move(f), std::move(jac)), nullptr);
}

SmoothMap SmoothMap::with_inverse(const SmoothMap& inv) const { return SmoothMap(impl_, inv.impl_); }

SmoothMap SmoothMap::with_newton_inverse() const {
  const SmoothMap fwd(impl_, nullptr);
  auto solve = [fwd](const Vec& y) {
    Vec x = y;
    for (int it = 0; it < 100; ++it) {
      const Vec r = fwd(x) - y;
      if (r.norm() <= 1e-15 * (1.0 + y.norm())) return x;
      const Vec dx = fwd.jacobian(x).fullPivLu().solve(r);
      x -= dx;
      if (dx.norm() <= 1e-16 * (1.0 + x.norm())) return x;
    }
    const Vec r = fwd(x) - y;
    if (!(r.norm() <= 1e-10 * (1.0 + y.norm())))
      fail("InverseUnavailable", "Newton inversion of " + fwd.name() + " did not converge");
    return x;
  };
  auto jac = [fwd, solve](const Vec& y) { return Mat(fwd.jacobian(solve(y)).inverse()); };
  return SmoothMap(impl_, make_impl(dim(), name() + "^-1", solve, jac));
}

namespace {

// a o b when both are polynomial.
std::optional<PolyVec> compose_components(const SmoothMap& a, const SmoothMap& b) {
  if (!a.polynomial_components() || !b.polynomial_components()) return std::nullopt;
  PolyVec out;
  for (const auto& p : *a.polynomial_components()) {
    Polynomial q = substitute(p, *b.polynomial_components());
    q.prune();
    out.push_back(std::move(q));
  }
  return out;
}

}  // namespace

SmoothMap SmoothMap::compose(const SmoothMap& inner) const {
  const std::string nm = name() + "o" + inner.name();
  std::shared_ptr<const Impl> f;
  if (const auto c = compose_components(*this, inner)) {
    f = poly_impl(*c, nm);
  } else {
    const SmoothMap outer_f(impl_, nullptr), inner_f(inner.impl_, nullptr);
    Jac jac = nullptr;
    if (exact_jacobian() && inner.exact_jacobian())
      jac = [outer_f, inner_f](const Vec& x) {
        return Mat(outer_f.jacobian(inner_f(x)) * inner_f.jacobian(x));
      };
    f = make_impl(dim(), nm, [outer_f, inner_f](const Vec& x) { return outer_f(inner_f(x)); }, jac);
  }
  if (!has_inverse() || !inner.has_inverse()) return SmoothMap(f, nullptr);
  const SmoothMap oi = inverse(), ii = inner.inverse();
  if (const auto c = compose_components(ii, oi)) return SmoothMap(f, poly_impl(*c, "(" + nm + ")^-1"));
  Jac ijac = nullptr;
  if (oi.exact_jacobian() && ii.exact_jacobian())
    ijac = [oi, ii](const Vec& y) { return Mat(ii.jacobian(oi(y)) * oi.jacobian(y)); };
  return SmoothMap(f, make_impl(dim(), "(" + nm + ")^-1", [oi, ii](const Vec& y) { return ii(oi(y)); }, ijac));
}

SmoothMap SmoothMap::renamed(std::string name) const {
  auto p = std::make_shared<Impl>(*impl_);
  p->name = std::move(name);
  return SmoothMap(p, inv_);
}

int SmoothMap::dim() const { return impl_->d; }
const std::string& SmoothMap::name() const { return impl_->name; }
Vec SmoothMap::operator()(const Vec& x) const { return impl_->f(x); }

Mat SmoothMap::jacobian(const Vec& x) const {
  if (impl_->jac) return impl_->jac(x);
  return finite_difference_jacobian(impl_->f, x);
}

bool SmoothMap::exact_jacobian() const { return static_cast<bool>(impl_->jac); }

SmoothMap SmoothMap::inverse() const {
  if (!inv_) fail("InverseUnavailable", "no inverse evaluator for " + name());
  return SmoothMap(inv_, impl_);
}

const std::optional<PolyVec>& SmoothMap::polynomial_components() const { return impl_->poly; }

}  // namespace carnot
