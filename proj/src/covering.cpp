#include "carnot/covering.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace carnot {

CoveringSystem CoveringSystem::build(std::shared_ptr<const Group> g, double eps, const Box& extent) {
  if (!(eps > 0.0)) fail("NonPositiveScale", "covering scale must be positive");
  if (extent.dim() != g->dim() || extent.empty()) fail("EmptyBox", "covering extent is empty");
  CoveringSystem c;
  c.g_ = std::move(g);
  c.eps_ = eps;
  c.extent_ = extent;
  return c;
}

Vec CoveringSystem::center(const Key& k) const {
  Vec v(k.size());
  for (size_t i = 0; i < k.size(); ++i) v(i) = static_cast<double>(k[i]);
  return dilate(g_->alg(), eps_, v);
}

std::vector<CoveringSystem::Key> CoveringSystem::near(const Vec& x, double R) const {
  const auto& alg = g_->alg();
  const Vec xs = dilate(alg, 1.0 / eps_, x);
  std::vector<Key> out;
  Key cur(alg.dim(), 0);
  // Stratum s of gamma^{-1}x is x_s - gamma_s plus terms in lower strata of
  // gamma, and each coordinate is bounded by rho^s.
  std::function<void(int)> rec = [&](int s) {
    if (s > alg.step()) {
      Vec gv(alg.dim());
      for (int i = 0; i < alg.dim(); ++i) gv(i) = static_cast<double>(cur[i]);
      if (gauge_distance(alg, xs, gv) < R) out.push_back(cur);
      return;
    }
    const int off = alg.stratum_offset(s), ns = alg.strata()[s - 1];
    Vec gv(alg.dim());
    for (int i = 0; i < alg.dim(); ++i) gv(i) = static_cast<double>(cur[i]);
    for (int i = off; i < off + ns; ++i) gv(i) = 0.0;
    const Vec u = bch_multiply(alg, -gv, xs);
    const double bound = std::pow(R, s);
    std::function<void(int)> fill = [&](int i) {
      if (i == off + ns) {
        rec(s + 1);
        return;
      }
      const long lo = static_cast<long>(std::ceil(u(i) - bound));
      const long hi = static_cast<long>(std::floor(u(i) + bound));
      for (long v = lo; v <= hi; ++v) {
        cur[i] = v;
        fill(i + 1);
      }
      cur[i] = 0;
    };
    fill(off);
  };
  rec(1);
  return out;
}

std::vector<std::pair<CoveringSystem::Key, double>> CoveringSystem::eta(const Vec& x) const {
  const auto& alg = g_->alg();
  const Vec xs = dilate(alg, 1.0 / eps_, x);
  std::vector<std::pair<Key, double>> out;
  double s2 = 0.0;
  for (auto& k : near(x, support_radius)) {
    Vec gv(alg.dim());
    for (int i = 0; i < alg.dim(); ++i) gv(i) = static_cast<double>(k[i]);
    const double v = profile(gauge_distance(alg, xs, gv));
    if (v > 0.0) {
      out.emplace_back(std::move(k), v);
      s2 += v * v;
    }
  }
  const double n = std::sqrt(s2);
  for (auto& [k, v] : out) v /= n;
  return out;
}

double CoveringSystem::eta(const Key& k, const Vec& x) const {
  for (const auto& [kk, v] : eta(x))
    if (kk == k) return v;
  return 0.0;
}

std::vector<CoveringSystem::Key> CoveringSystem::centers(const std::vector<Vec>& probes) const {
  std::set<Key> s;
  for (const auto& x : probes)
    for (auto& [k, v] : eta(x)) s.insert(k);
  return {s.begin(), s.end()};
}

MultiplicityAudit CoveringSystem::multiplicity(const std::vector<double>& C, int samples, Rng& rng) const {
  MultiplicityAudit a;
  a.C = C;
  a.Q = g_->alg().homogeneous_dimension();
  a.samples = samples;
  a.multiplicity.assign(C.size(), 0);
  for (int s = 0; s < samples; ++s) {
    const Vec x = extent_.sample(rng);
    for (size_t c = 0; c < C.size(); ++c)
      a.multiplicity[c] = std::max(a.multiplicity[c], static_cast<int>(near(x, C[c]).size()));
  }
  for (size_t c = 0; c < C.size(); ++c) {
    a.M = std::max(a.M, std::pow(static_cast<double>(a.multiplicity[c]), 1.0 / a.Q) / C[c]);
    if (c > 0 && C[c] > C[c - 1] && a.multiplicity[c] < a.multiplicity[c - 1]) a.monotone = false;
  }
  return a;
}

}  // namespace carnot
