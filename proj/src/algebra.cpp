#include "carnot/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace carnot {
namespace {

constexpr double kJacobiTol = 1e-12;

std::string idx3(int i, int j, int k) {
  std::ostringstream os;
  os << "(" << i + 1 << "," << j + 1 << "," << k + 1 << ")";
  return os.str();
}

Vec bracket_raw(int d, const std::map<std::pair<int, int>, std::map<int, double>>& c,
                const Vec& x, const Vec& y) {
  Vec r = Vec::Zero(d);
  for (const auto& [ij, row] : c) {
    const double coef = x(ij.first) * y(ij.second) - x(ij.second) * y(ij.first);
    if (coef == 0.0) continue;
    for (const auto& [k, v] : row) r(k) += v * coef;
  }
  return r;
}

int factorial(int n) {
  int f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// B_{2p}/(2p)! for p = 1..5.
double bernoulli_over_factorial(int p) {
  static const double b[] = {0.0, 1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0};
  if (p > 5) fail("Unsupported", "BCH step above 11");
  double f = 1.0;
  for (int i = 2; i <= 2 * p; ++i) f *= i;
  return b[p] / f;
}

void compositions(int n, int parts, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (parts == 0) {
    if (n == 0) out.push_back(cur);
    return;
  }
  for (int k = 1; k <= n - (parts - 1); ++k) {
    cur.push_back(k);
    compositions(n - k, parts - 1, cur, out);
    cur.pop_back();
  }
}

// Homogeneous components Z_n of log(e^x e^y) from the recursion
//   (n+1) Z_{n+1} = 1/2 [x-y, Z_n]
//                 + sum_{p>=1, 2p<=n} B_{2p}/(2p)! sum_{k_1+..+k_{2p}=n}
//                       [Z_{k_1}, [ ... [Z_{k_{2p}}, x+y] ... ]].
template <class V, class Br, class Add, class Scale>
V bch_series(int step, const V& x, const V& y, Br br, Add add, Scale scale) {
  const V xpy = add(x, y);
  const V xmy = add(x, scale(y, -1.0));
  std::vector<V> Z(static_cast<size_t>(step) + 1);
  Z[1] = xpy;
  V total = xpy;
  for (int n = 1; n < step; ++n) {
    V acc = scale(br(xmy, Z[n]), 0.5);
    for (int p = 1; 2 * p <= n; ++p) {
      const double K = bernoulli_over_factorial(p);
      std::vector<std::vector<int>> comps;
      std::vector<int> cur;
      compositions(n, 2 * p, cur, comps);
      for (const auto& ks : comps) {
        V t = xpy;
        for (int i = 2 * p - 1; i >= 0; --i) t = br(Z[ks[i]], t);
        acc = add(acc, scale(t, K));
      }
    }
    Z[n + 1] = scale(acc, 1.0 / (n + 1));
    total = add(total, Z[n + 1]);
  }
  return total;
}

}  // namespace

std::vector<Violation> StratifiedAlgebra::check(const RawAlgebra& raw) {
  std::vector<Violation> out;
  const int d = raw.dimension;
  if (raw.strata.empty()) {
    out.push_back({"StrataMismatch", "no strata declared"});
    return out;
  }
  int sum = 0;
  for (int n : raw.strata) {
    if (n <= 0) out.push_back({"StrataMismatch", "stratum dimension must be positive"});
    sum += n;
  }
  if (sum != d) {
    std::ostringstream os;
    os << "strata sum to " << sum << " but dimension is " << d;
    out.push_back({"StrataMismatch", os.str()});
  }
  if (!out.empty()) return out;

  std::vector<int> ord;
  for (size_t s = 0; s < raw.strata.size(); ++s)
    for (int k = 0; k < raw.strata[s]; ++k) ord.push_back(static_cast<int>(s) + 1);

  std::map<std::pair<int, int>, std::map<int, double>> c;
  for (const auto& [ij, row] : raw.brackets) {
    auto [i, j] = ij;
    bool bad_index = i < 0 || j < 0 || i >= d || j >= d;
    for (const auto& [k, v] : row) bad_index = bad_index || k < 0 || k >= d;
    if (bad_index) {
      out.push_back({"IndexOutOfRange", "bracket indices must lie in [1," + std::to_string(d) + "]"});
      continue;
    }
    if (i == j) {
      bool nonzero = false;
      for (const auto& [k, v] : row) nonzero = nonzero || v != 0.0;
      if (nonzero)
        out.push_back({"AntisymmetryViolation",
                       "[Z_" + std::to_string(i + 1) + ",Z_" + std::to_string(i + 1) + "] must vanish"});
      continue;
    }
    const int a = std::min(i, j), b = std::max(i, j);
    const double sign = i < j ? 1.0 : -1.0;
    auto twin = raw.brackets.find({j, i});
    if (twin != raw.brackets.end() && i > j) {
      // Both orders given: they must be negatives of each other.
      std::map<int, double> sum_map = row;
      for (const auto& [k, v] : twin->second) sum_map[k] += v;
      for (const auto& [k, v] : sum_map)
        if (std::abs(v) > kJacobiTol) {
          out.push_back({"AntisymmetryViolation",
                         "[Z_" + std::to_string(j + 1) + ",Z_" + std::to_string(i + 1) +
                             "] is not minus [Z_" + std::to_string(i + 1) + ",Z_" +
                             std::to_string(j + 1) + "]"});
          break;
        }
      continue;
    }
    for (const auto& [k, v] : row)
      if (v != 0.0) c[{a, b}][k] = sign * v;
  }
  if (!out.empty()) return out;

  for (const auto& [ij, row] : c)
    for (const auto& [k, v] : row)
      if (ord[k] != ord[ij.first] + ord[ij.second])
        out.push_back({"GradingViolation",
                       "c" + idx3(ij.first, ij.second, k) + " maps strata " +
                           std::to_string(ord[ij.first]) + "+" + std::to_string(ord[ij.second]) +
                           " into stratum " + std::to_string(ord[k])});

  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      for (int k = j + 1; k < d; ++k) {
        const Vec ei = Vec::Unit(d, i), ej = Vec::Unit(d, j), ek = Vec::Unit(d, k);
        const Vec J = bracket_raw(d, c, ei, bracket_raw(d, c, ej, ek)) +
                      bracket_raw(d, c, ej, bracket_raw(d, c, ek, ei)) +
                      bracket_raw(d, c, ek, bracket_raw(d, c, ei, ej));
        if (J.lpNorm<Eigen::Infinity>() > kJacobiTol)
          out.push_back({"JacobiViolation", "triple " + idx3(i, j, k)});
      }

  // The first stratum must generate: brackets of stratum 1 with a spanning
  // set of stratum s-1 must span stratum s.
  const int n1 = raw.strata[0];
  std::vector<Vec> prev;
  for (int a = 0; a < n1; ++a) prev.push_back(Vec::Unit(d, a));
  int offset = n1;
  for (size_t s = 1; s < raw.strata.size(); ++s) {
    const int ns = raw.strata[s];
    std::vector<Vec> next;
    for (int a = 0; a < n1; ++a)
      for (const Vec& v : prev) next.push_back(bracket_raw(d, c, Vec::Unit(d, a), v));
    Mat P(ns, static_cast<Eigen::Index>(std::max<size_t>(next.size(), 1)));
    P.setZero();
    for (size_t m = 0; m < next.size(); ++m)
      P.col(static_cast<Eigen::Index>(m)) = next[m].segment(offset, ns);
    Eigen::JacobiSVD<Mat> svd(P);
    int rank = 0;
    for (Eigen::Index m = 0; m < svd.singularValues().size(); ++m)
      if (svd.singularValues()(m) > 1e-10) ++rank;
    if (rank < ns)
      out.push_back({"NotGenerated", "stratum " + std::to_string(s + 1) + " reaches rank " +
                                         std::to_string(rank) + " of " + std::to_string(ns)});
    // Keep a basis of stratum s for the next round.
    prev.clear();
    for (int k = 0; k < ns; ++k) prev.push_back(Vec::Unit(d, offset + k));
    offset += ns;
  }
  return out;
}

StratifiedAlgebra StratifiedAlgebra::validate(const RawAlgebra& raw) {
  const auto v = check(raw);
  if (!v.empty()) {
    std::string msg;
    for (const auto& x : v) msg += (msg.empty() ? "" : "; ") + x.kind + " " + x.detail;
    fail(v.front().kind, msg);
  }
  StratifiedAlgebra a;
  a.d_ = raw.dimension;
  a.strata_ = raw.strata;
  for (size_t s = 0; s < raw.strata.size(); ++s) {
    a.Q_ += static_cast<int>(s + 1) * raw.strata[s];
    for (int k = 0; k < raw.strata[s]; ++k) a.order_.push_back(static_cast<int>(s) + 1);
  }
  for (const auto& [ij, row] : raw.brackets) {
    auto [i, j] = ij;
    if (i > j && raw.brackets.count({j, i})) continue;
    const int lo = std::min(i, j), hi = std::max(i, j);
    const double sign = i < j ? 1.0 : -1.0;
    for (const auto& [k, v] : row)
      if (v != 0.0) a.c_[{lo, hi}][k] = sign * v;
  }
  return a;
}

StratifiedAlgebra StratifiedAlgebra::heisenberg(int n) {
  RawAlgebra r;
  r.dimension = 2 * n + 1;
  r.strata = {2 * n, 1};
  for (int i = 0; i < n; ++i) r.brackets[{i, n + i}][2 * n] = 1.0;
  return validate(r);
}

StratifiedAlgebra StratifiedAlgebra::engel() {
  RawAlgebra r;
  r.dimension = 4;
  r.strata = {2, 1, 1};
  r.brackets[{0, 1}][2] = 1.0;
  r.brackets[{0, 2}][3] = 1.0;
  return validate(r);
}

StratifiedAlgebra StratifiedAlgebra::abelian(int d) {
  RawAlgebra r;
  r.dimension = d;
  r.strata = {d};
  return validate(r);
}

int StratifiedAlgebra::stratum_offset(int s) const {
  int off = 0;
  for (int k = 1; k < s; ++k) off += strata_[k - 1];
  return off;
}

double StratifiedAlgebra::constant(int i, int j, int k) const {
  if (i == j) return 0.0;
  const double sign = i < j ? 1.0 : -1.0;
  auto it = c_.find({std::min(i, j), std::max(i, j)});
  if (it == c_.end()) return 0.0;
  auto jt = it->second.find(k);
  return jt == it->second.end() ? 0.0 : sign * jt->second;
}

Vec StratifiedAlgebra::bracket(const Vec& x, const Vec& y) const {
  return bracket_raw(d_, c_, x, y);
}

PolyVec StratifiedAlgebra::bracket(const PolyVec& x, const PolyVec& y) const {
  PolyVec r(static_cast<size_t>(d_), Polynomial(x.empty() ? 0 : x[0].nvars()));
  for (const auto& [ij, row] : c_) {
    const Polynomial coef = x[ij.first] * y[ij.second] - x[ij.second] * y[ij.first];
    if (coef.is_zero()) continue;
    for (const auto& [k, v] : row) r[k] += coef * v;
  }
  return r;
}

Mat StratifiedAlgebra::ad(const Vec& x) const {
  Mat m(d_, d_);
  for (int j = 0; j < d_; ++j) m.col(j) = bracket(x, Vec::Unit(d_, j));
  return m;
}

std::string StratifiedAlgebra::describe() const {
  std::ostringstream os;
  os << "d=" << d_ << " strata=[";
  for (size_t s = 0; s < strata_.size(); ++s) os << (s ? "," : "") << strata_[s];
  os << "] step=" << step() << " Q=" << Q_;
  for (const auto& [ij, row] : c_)
    for (const auto& [k, v] : row)
      os << " [" << ij.first + 1 << "," << ij.second + 1 << "]:" << k + 1 << "=" << v;
  return os.str();
}

Vec bch_multiply(const StratifiedAlgebra& alg, const Vec& x, const Vec& y) {
  return bch_series<Vec>(
      alg.step(), x, y, [&](const Vec& a, const Vec& b) { return alg.bracket(a, b); },
      [](const Vec& a, const Vec& b) { return Vec(a + b); },
      [](const Vec& a, double s) { return Vec(a * s); });
}

PolyVec bch_multiply(const StratifiedAlgebra& alg, const PolyVec& x, const PolyVec& y) {
  auto add = [](const PolyVec& a, const PolyVec& b) {
    PolyVec r = a;
    for (size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
  };
  auto scale = [](const PolyVec& a, double s) {
    PolyVec r;
    for (const auto& p : a) r.push_back(p * s);
    return r;
  };
  PolyVec out = bch_series<PolyVec>(
      alg.step(), x, y, [&](const PolyVec& a, const PolyVec& b) { return alg.bracket(a, b); },
      add, scale);
  for (auto& p : out) p.prune(0.0);
  return out;
}

Vec dilate(const StratifiedAlgebra& alg, double r, const Vec& x) {
  if (!(r > 0.0)) fail("NonPositiveScale", "dilation factor must be positive");
  Vec y = x;
  for (int i = 0; i < alg.dim(); ++i) y(i) *= std::pow(r, alg.order(i));
  return y;
}

Mat dilation_matrix(const StratifiedAlgebra& alg, double r) {
  if (!(r > 0.0)) fail("NonPositiveScale", "dilation factor must be positive");
  Mat m = Mat::Zero(alg.dim(), alg.dim());
  for (int i = 0; i < alg.dim(); ++i) m(i, i) = std::pow(r, alg.order(i));
  return m;
}

double homogeneous_norm(const StratifiedAlgebra& alg, const Vec& x) {
  const int N = 2 * factorial(alg.step());
  double m = 0.0;
  for (int k = 0; k < alg.dim(); ++k)
    m = std::max(m, std::pow(std::abs(x(k)), 1.0 / alg.order(k)));
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (int k = 0; k < alg.dim(); ++k) {
    const double t = std::abs(x(k)) / std::pow(m, alg.order(k));
    s += std::pow(t, static_cast<double>(N) / alg.order(k));
  }
  return m * std::pow(s, 1.0 / N);
}

double gauge_distance(const StratifiedAlgebra& alg, const Vec& x, const Vec& y) {
  return homogeneous_norm(alg, bch_multiply(alg, -y, x));
}

Vec random_point(const StratifiedAlgebra& alg, Rng& rng, double s) {
  Vec x(alg.dim());
  for (int k = 0; k < alg.dim(); ++k) {
    const double b = std::pow(s, alg.order(k));
    x(k) = uniform(rng, -b, b);
  }
  return x;
}

A0Estimate estimate_A0(const StratifiedAlgebra& alg, int samples, Rng& rng) {
  double best = 0.0;
  for (int n = 0; n < samples; ++n) {
    const Vec x = dilate(alg, std::exp(uniform(rng, -2.0, 2.0)), random_point(alg, rng));
    const Vec y = dilate(alg, std::exp(uniform(rng, -2.0, 2.0)), random_point(alg, rng));
    const double den = homogeneous_norm(alg, x) + homogeneous_norm(alg, y);
    if (den == 0.0) continue;
    best = std::max(best, homogeneous_norm(alg, bch_multiply(alg, x, y)) / den);
  }
  return {best, samples};
}

}  // namespace carnot
