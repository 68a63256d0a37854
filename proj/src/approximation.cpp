#include "carnot/approximation.hpp"

#include "carnot/matfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace carnot {

Mat field_derivative(const Group& g, const MatrixField& w, int l, const Vec& x) {
  const double t = 1e-5;
  Vec e = Vec::Zero(g.dim());
  e(l) = t;
  return (w(g.mul(x, e)) - w(g.mul(x, -e))) / (2.0 * t);
}

FieldConstants field_constants(const Group& g, const MatrixField& w, int samples, Rng& rng) {
  const auto& alg = g.alg();
  FieldConstants fc;
  fc.samples = samples;
  const double R = std::max(w.constancy_radius, 1e-3);
  const int n = w.n1;
  Mat dsup = Mat::Zero(n, n * alg.n1());
  auto visit = [&](const Vec& x) {
    const Mat W = w(x);
    fc.sup_w = std::max(fc.sup_w, spectral_norm(W));
    fc.sup_inv = std::max(fc.sup_inv, spectral_norm(W.inverse()));
    if (w.constancy_radius <= 0.0) return;
    for (int l = 0; l < alg.n1(); ++l)
      dsup.middleCols(l * n, n) = dsup.middleCols(l * n, n).cwiseMax(field_derivative(g, w, l, x).cwiseAbs());
  };
  Vec far = Vec::Zero(g.dim());
  far(0) = 2.0 * R;
  visit(far);
  std::vector<Vec> pts;
  for (int s = 0; s < samples; ++s) {
    Vec x = random_point(alg, rng, 1.05 * R);
    pts.push_back(x);
    visit(x);
  }
  fc.w1inf = dsup.sum();
  if (fc.w1inf > 0.0) {
    for (const auto& x : pts) {
      const double r = std::exp(uniform(rng, std::log(1e-3), std::log(2.0 * R)));
      Vec u = random_point(alg, rng, 1.0);
      if (g.rho(u) == 0.0) continue;
      u = dilate(alg, r / g.rho(u), u);
      const Vec y = g.mul(x, u);
      fc.C = std::max(fc.C, spectral_norm(w(x) - w(y)) / (fc.w1inf * g.dist(x, y)));
    }
  }
  fc.C_w = std::max(fc.C, 1.0) * fc.w1inf * fc.sup_inv;
  fc.eps_w = fc.C_w > 0.0 ? 1.0 / (2.0 * fc.C_w) : std::numeric_limits<double>::infinity();
  return fc;
}

double patch_cutoff(const Group& g, const Vec& gamma, double eps, const Vec& x) {
  return smooth_cutoff(g.dist(x, gamma) / eps, 1.0, 2.0);
}

Mat approximant(const Group& g, const MatrixField& w, const Vec& gamma, double eps, const Vec& x) {
  const Mat wg = w(gamma);
  const double th = patch_cutoff(g, gamma, eps, x);
  if (th == 0.0) return wg;
  const Mat xi = logm_series(w(x) * wg.inverse());
  return expm(th * xi) * wg;
}

MatrixField approximant_field(std::shared_ptr<const Group> g, const MatrixField& w, const Vec& gamma,
                              double eps) {
  MatrixField f;
  f.name = w.name + "^gamma";
  f.n1 = w.n1;
  f.constancy_radius = g->rho(gamma) + 2.0 * eps;
  f.eval = [g, w, gamma, eps](const Vec& x) { return approximant(*g, w, gamma, eps, x); };
  return f;
}

namespace {

void require_scale(double eps, const FieldConstants& fc) {
  if (eps > 0.5 * fc.eps_w)
    fail("EpsilonTooLarge", "eps = " + std::to_string(eps) + " exceeds eps_w/2 = " + std::to_string(0.5 * fc.eps_w));
}

using Key = CoveringSystem::Key;

// Bump values of every center on the given points.
std::map<Key, std::vector<std::pair<int, double>>> bumps(const CoveringSystem& cov, const std::vector<Vec>& pts) {
  std::map<Key, std::vector<std::pair<int, double>>> out;
  for (int i = 0; i < static_cast<int>(pts.size()); ++i)
    for (auto& [k, v] : cov.eta(pts[i])) out[k].emplace_back(i, v);
  return out;
}

}  // namespace

ApproximationReport approximation_family(const Lattice& lat, const MatrixField& w, double eps,
                                         const FieldConstants& fc, Rng& rng, int sobolev_samples) {
  require_scale(eps, fc);
  const Group& g = lat.group();
  const auto& alg = g.alg();
  const int Q = alg.homogeneous_dimension();
  const auto cov = CoveringSystem::build(lat.group_ptr(), eps, Box::cube(lat.dim(), lat.L()));
  std::vector<Vec> pts = lat.nodes();
  pts.insert(pts.end(), lat.cells().begin(), lat.cells().end());

  // Points within 2.5 eps of each center: the inner ball, the transition shell
  // and a margin where the family must already be constant.
  std::map<Key, std::vector<int>> nearby;
  for (int i = 0; i < static_cast<int>(pts.size()); ++i)
    for (auto& k : cov.near(pts[i], 2.5)) nearby[k].push_back(i);

  ApproximationReport r;
  r.eps = eps;
  r.deviation_bound = 6.0 * fc.sup_w * fc.C_w * eps;
  r.bound_approx = std::exp(1.0) * fc.sup_w;
  r.bound_approx_inv = std::exp(1.0) * fc.sup_inv;
  for (const auto& [k, idx] : nearby) {
    const Vec gamma = cov.center(k);
    bool meets = false;
    for (int i : idx) meets = meets || g.dist(pts[i], gamma) < 2.0 * eps;
    if (!meets) continue;
    ++r.centers;
    const Mat wg = w(gamma);
    for (int i : idx) {
      const Vec& x = pts[i];
      const double d = g.dist(x, gamma);
      const Mat v = approximant(g, w, gamma, eps, x);
      ++r.evaluations;
      if (d < eps) r.agree_residual = std::max(r.agree_residual, spectral_norm(v - w(x)));
      if (d >= 2.0 * eps) r.constant_residual = std::max(r.constant_residual, spectral_norm(v - wg));
      r.sup_deviation = std::max(r.sup_deviation, spectral_norm(v - wg));
      r.sup_approx = std::max(r.sup_approx, spectral_norm(v));
      r.sup_approx_inv = std::max(r.sup_approx_inv, spectral_norm(v.inverse()));
    }
    // Derivatives of w^gamma live in B(gamma, 2 eps) = gamma delta_{2 eps}(B(o,1)),
    // and B(o,1) sits in the box |x_m| <= 1 of volume 2^d.
    if (sobolev_samples > 0) {
      const int n = w.n1;
      Mat acc = Mat::Zero(n, n * alg.n1());
      for (int s = 0; s < sobolev_samples; ++s) {
        const Vec x = g.mul(gamma, dilate(alg, 2.0 * eps, random_point(alg, rng, 1.0)));
        if (g.dist(x, gamma) >= 2.0 * eps) continue;
        for (int l = 0; l < alg.n1(); ++l) {
          Vec e = Vec::Zero(g.dim());
          e(l) = 1e-5;
          const Mat D = (approximant(g, w, gamma, eps, g.mul(x, e)) - approximant(g, w, gamma, eps, g.mul(x, -e))) / 2e-5;
          acc.middleCols(l * n, n) += D.cwiseAbs().array().pow(Q).matrix();
        }
      }
      const double vol = std::pow(2.0, g.dim()) * std::pow(2.0 * eps, Q) / sobolev_samples;
      r.sobolev_proxy = std::max(r.sobolev_proxy, std::pow(vol * acc.sum(), 1.0 / Q));
    }
  }
  return r;
}

PatchedSums patched_riesz_sums(const Lattice& lat, const MatrixField& a, double eps, int k,
                               const FieldConstants& fc, const PatchedOptions& opt) {
  require_scale(eps, fc);
  lat.require_dense();
  const Group& g = lat.group();
  if (k < 0 || k >= g.n1()) fail("IndexOutOfRange", "Riesz index outside the first stratum");
  const auto cov = CoveringSystem::build(lat.group_ptr(), eps, Box::cube(lat.dim(), lat.L()));
  const auto on_nodes = bumps(cov, lat.nodes());
  const auto on_cells = bumps(cov, lat.cells());

  PatchedSums p;
  p.eps = eps;
  p.k = k;
  p.difference = Mat::Zero(lat.m(), lat.n());
  if (opt.full) {
    p.A = p.difference;
    p.R = p.difference;
  }
  std::map<std::vector<double>, Mat> cache;
  for (const auto& [key, nv] : on_nodes) {
    auto ct = on_cells.find(key);
    if (ct == on_cells.end()) continue;
    if (opt.only && std::find(opt.only->begin(), opt.only->end(), key) == opt.only->end()) continue;
    ++p.centers;
    const Vec gamma = cov.center(key);
    const MatrixField local = approximant_field(lat.group_ptr(), a, gamma, eps);
    const Mat ag = a(gamma);
    bool differs = false;
    for (const auto& c : lat.cells())
      if (g.dist(c, gamma) < 2.0 * eps && (local(c) - ag).norm() != 0.0) {
        differs = true;
        break;
      }
    if (differs) ++p.active;
    if (!differs && !opt.full) continue;

    // a(gamma) repeats wherever a is constant, so constant transforms are cached
    // by value.
    std::vector<double> tag(ag.data(), ag.data() + ag.size());
    auto hit = cache.find(tag);
    if (hit == cache.end()) hit = cache.emplace(tag, quasi_riesz(lat, MatrixField::constant(ag)).R[k]).first;
    const Mat& Rg = hit->second;
    const Mat Rl = differs ? quasi_riesz(lat, local).R[k] : Rg;
    auto sandwich = [&](const Mat& T) {
      Mat out = Mat::Zero(lat.m(), lat.n());
      for (const auto& [i, u] : ct->second)
        for (const auto& [j, v] : nv) out(i, j) = u * T(i, j) * v;
      return out;
    };
    if (opt.full) {
      p.A += sandwich(Rl);
      p.R += sandwich(Rg);
    } else {
      p.difference += sandwich(Rl - Rg);
    }
  }
  if (opt.full) p.difference = p.A - p.R;
  p.deviation = spectral_norm(p.difference);
  return p;
}

}  // namespace carnot
