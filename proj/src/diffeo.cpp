#include "carnot/diffeo.hpp"

#include <cmath>
#include <sstream>

namespace carnot {

std::vector<Vec> F_basis(const Group& g, const Vec& x) {
  std::vector<Vec> h;
  for (int j = 0; j < g.n1(); ++j) h.push_back(g.field(j).at(x));
  return h;
}

std::vector<Vec> sample_points(const Group& g, Rng& rng, int n, double s) {
  std::vector<Vec> pts;
  for (int i = 0; i < n; ++i) pts.push_back(random_point(g.alg(), rng, s));
  return pts;
}

namespace {

// Residual of v against F(y): components of E(y)^{-1} v beyond the first stratum.
double pushforward_residual(const Group& g, const Vec& y, const Vec& v) {
  const Vec c = g.frame(y).triangularView<Eigen::UnitLower>().solve(v);
  return c.tail(g.dim() - g.n1()).norm() / (1.0 + v.norm());
}

// Residual of w against F(y) through the normals e_i - sum_j Z_j(y)_i e_j.
double subspace_residual(const Group& g, const Vec& y, const Vec& w) {
  const int n1 = g.n1(), d = g.dim();
  const Mat E = g.frame(y);
  double r = 0.0;
  for (int i = n1; i < d; ++i) {
    Vec n = Vec::Unit(d, i);
    for (int j = 0; j < n1; ++j) n(j) = -E(i, j);
    r = std::max(r, std::abs(n.dot(w)) / (n.norm() * (1.0 + w.norm())));
  }
  return r;
}

}  // namespace

DiffeoReport check_G_diffeomorphism(const Group& g, const SmoothMap& phi,
                                    const std::vector<Vec>& samples, double tol) {
  if (!phi.has_inverse()) fail("InverseUnavailable", "map " + phi.name() + " has no inverse");
  DiffeoReport r;
  r.name = phi.name();
  r.tol = tol;
  r.samples = static_cast<int>(samples.size());
  std::vector<FieldFn> pushed;
  for (int k = 0; k < g.n1(); ++k) pushed.push_back(pushforward_field(phi, g.field(k).evaluator()));
  double worst = -1.0;
  for (const Vec& x : samples) {
    const Vec y = phi(x);
    const Mat J = phi.jacobian(x);
    const auto h = F_basis(g, x);
    double local = 0.0;
    for (int k = 0; k < g.n1(); ++k) {
      const double r5 = pushforward_residual(g, y, pushed[k](y));
      const double r6 = subspace_residual(g, y, J * h[k]);
      r.residual_pushforward = std::max(r.residual_pushforward, r5);
      r.residual_subspace = std::max(r.residual_subspace, r6);
      local = std::max({local, r5, r6});
    }
    if (local > worst) {
      worst = local;
      r.worst_point = x;
    }
  }
  r.pass_pushforward = r.residual_pushforward <= tol;
  r.pass_subspace = r.residual_subspace <= tol;
  return r;
}

Mat frame_jacobian(const Group& g, const SmoothMap& phi, const Vec& x) {
  const Mat JE = phi.jacobian(x) * g.frame(x);
  return g.frame(phi(x)).triangularView<Eigen::UnitLower>().solve(JE);
}

Mat horizontal_jacobian(const Group& g, const SmoothMap& phi, const Vec& x) {
  // The first n1 rows of E(y)^{-1} are [I 0], so no solve is needed.
  return (phi.jacobian(x) * g.frame(x)).topLeftCorner(g.n1(), g.n1());
}

Mat admissibility_matrix(const Group& g, const SmoothMap& phi, const Vec& x, double tol) {
  double res = 0.0;
  const Mat H = extend_first_block(g.alg(), horizontal_jacobian(g, phi, x), &res);
  if (res > tol) {
    std::ostringstream os;
    os << "horizontal Jacobian of " << phi.name() << " does not extend (residual " << res << ")";
    fail("NotAdmissible", os.str());
  }
  const auto c = check_strata_automorphism(g.alg(), H, tol);
  if (!c.ok) fail("NotAdmissible", c.violations.front());
  return H;
}

CertifiedDiffeo CertifiedDiffeo::certify(const Group& g, const SmoothMap& phi,
                                         const std::vector<Vec>& samples, double tol) {
  CertifiedDiffeo c;
  c.report_ = check_G_diffeomorphism(g, phi, samples, tol);
  if (!c.report_.pass()) {
    std::ostringstream os;
    os << phi.name() << " fails G-diffeomorphism check (residuals "
       << c.report_.residual_pushforward << ", " << c.report_.residual_subspace << ")";
    fail("NotCertified", os.str());
  }
  c.g_ = std::make_shared<const Group>(g);
  c.map_ = phi;
  c.samples_ = samples;
  return c;
}

CertifiedDiffeo CertifiedDiffeo::compose(const CertifiedDiffeo& psi) const {
  return certify(*g_, map_.compose(psi.map_), psi.samples_, report_.tol);
}

LocalizedDiffeo localize_diffeomorphism(const Group& g, const SmoothMap& phi, const Vec& xi,
                                        Rng& rng, double r0, int samples) {
  const Vec phi_xi = phi(xi);
  const Mat J0 = phi.jacobian(xi);
  const double det0 = J0.determinant();
  if (!(std::abs(det0) > 1e-12)) fail("DegenerateJacobian", "det J vanishes at the base point");

  LocalizedDiffeo out;
  out.xi = xi;
  double r = r0;
  for (int halvings = 0; halvings < 30; ++halvings, r *= 0.5) {
    const auto gp = std::make_shared<const Group>(g);
    auto f = [gp, phi, xi, phi_xi, J0, r](const Vec& z) -> Vec {
      const Vec tangent = phi_xi + J0 * (z - xi);
      const double psi = smooth_cutoff(gp->dist(xi, z) / r, 1.0, 2.0);
      if (psi == 0.0) return tangent;
      return psi * phi(z) + (1.0 - psi) * tangent;
    };
    SmoothMap m = SmoothMap::opaque(g.dim(), f, "localized(" + phi.name() + ")");
    double worst = 1e300;
    bool ok = true;
    for (int s = 0; s < samples && ok; ++s) {
      // Points spread over B(xi, 2r) in the gauge.
      const Vec u = random_point(g.alg(), rng, 1.0);
      const double ru = g.rho(u);
      if (ru == 0.0) continue;
      const Vec z = g.mul(xi, dilate(g.alg(), 2.0 * r * uniform(rng, 0.0, 1.0) / ru, u));
      try {
        const double ratio = m.jdet(z) / det0;
        worst = std::min(worst, ratio);
        if (ratio < 0.5) ok = false;
      } catch (const Error&) {
        ok = false;
      }
    }
    if (ok) {
      out.map = m.with_newton_inverse();
      out.r1 = r;
      out.r2 = 2.0 * r;
      out.halvings = halvings;
      out.min_det_ratio = worst;
      return out;
    }
  }
  fail("DegenerateJacobian", "no localization radius keeps det J away from zero");
}

}  // namespace carnot
