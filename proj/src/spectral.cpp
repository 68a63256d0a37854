#include "carnot/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace carnot {

OperatorAudit audit_operator(const SpMat& T) {
  OperatorAudit a;
  const Mat D(T);
  a.symmetry_error = (D - D.transpose()).cwiseAbs().maxCoeff();
  const Vec ev = sym_eigvals(0.5 * (D + D.transpose()));
  a.lambda_min = ev(0);
  a.lambda_max = ev(ev.size() - 1);
  return a;
}

LaplacianContext::LaplacianContext(const Lattice& lat) : delta(lat.sub_laplacian()), cells(lat.cells()) {
  lat.require_dense();
  delta_half = sym_fun(Mat(delta), [](double l) { return std::sqrt(std::max(l, 0.0)); });
}

NormBoundResult verify_norm_bounds(const Lattice& lat, const LaplacianContext& ctx,
                                   const MatrixField& w, double tol) {
  NormBoundResult r;
  r.field = w.name;
  const RieszFamily fam = quasi_riesz(lat, w);
  const Mat Lw(fam.Lw);
  r.lw_symmetry = (Lw - Lw.transpose()).cwiseAbs().maxCoeff();
  const SymEig e = sym_eig(Lw);
  r.lw_lambda_min = e.values(0);
  const Mat Lm4 = sym_fun(e, [](double l) { return std::pow(l, -0.25); });
  const Mat D(ctx.delta);
  const Mat& Lm2 = fam.inv_sqrt_Lw;
  r.half_norm = std::sqrt(std::max(0.0, sym_eigvals(Lm2 * D * Lm2).maxCoeff()));
  r.quarter_norm = std::sqrt(std::max(0.0, sym_eigvals(Lm4 * ctx.delta_half * Lm4).maxCoeff()));
  r.half_bound = sup_inverse_norm(w, ctx.cells);
  r.quarter_bound = std::sqrt(r.half_bound);
  r.half_ok = r.half_norm <= r.half_bound * (1.0 + tol);
  r.quarter_ok = r.quarter_norm <= r.quarter_bound * (1.0 + tol);
  Mat P = -Mat::Identity(lat.n(), lat.n());
  for (const auto& R : fam.R) {
    P += R.transpose() * R;
    r.riesz_norm = std::max(r.riesz_norm, spectral_norm(R));
  }
  r.projection_residual = spectral_norm(P);
  return r;
}

ModulusRatio modulus_ratio(const Lattice& lat, const LaplacianContext& ctx, const ScalarFn& f) {
  ModulusRatio m;
  const SymEig e = sym_eig(Mat(ctx.delta));
  const Mat Dm = sym_fun(e, [](double l) { return 1.0 / std::sqrt(l); });
  const Vec fv = lat.sample(f);
  m.lhs = spectral_norm(ctx.delta_half * fv.asDiagonal() * Dm);
  m.sup = fv.cwiseAbs().maxCoeff();
  const int Q = lat.group().alg().homogeneous_dimension();
  Vec grad2 = Vec::Zero(lat.m());
  for (int k = 0; k < lat.group().n1(); ++k) grad2 += (lat.field(k) * fv).cwiseAbs2();
  double s = 0.0;
  for (int i = 0; i < grad2.size(); ++i) s += std::pow(grad2(i), 0.5 * Q);
  m.sobolev = std::pow(s * lat.cell_volume(), 1.0 / Q);
  m.ratio = m.lhs / (m.sobolev + m.sup);
  return m;
}

Vec heat_kernel(const Lattice& lat, const SpMat& L, double t) {
  Vec d = Vec::Zero(lat.n());
  d(lat.origin()) = 1.0 / lat.cell_volume();
  return expm_action(L, d, t);
}

double boundary_mass(const Lattice& lat, const Vec& u) {
  double edge = 0.0;
  for (int i = 0; i < lat.n(); ++i) {
    const auto p = lat.node_multi(i);
    bool near = false;
    for (int a : p) near = near || a < 2 || a >= lat.N() - 2;
    if (near) edge += std::abs(u(i));
  }
  return edge / u.cwiseAbs().sum();
}

HeatResult heat_profile(const Lattice& lat, double t) {
  HeatResult r;
  r.t = t;
  const Vec u = heat_kernel(lat, lat.sub_laplacian(), t);
  r.boundary = boundary_mass(lat, u);
  if (r.boundary > 1e-3) fail("BoundaryContamination", "heat mass reaches the boundary");
  const auto& alg = lat.group().alg();
  r.centre_scaled = u(lat.origin()) * std::pow(t, 0.5 * alg.homogeneous_dimension());
  if (alg.step() == 1) {
    const int d = lat.dim();
    const Vec G = lat.sample([&](const Vec& x) {
      return std::pow(4.0 * std::numbers::pi * t, -0.5 * d) * std::exp(-x.squaredNorm() / (4.0 * t));
    });
    r.gaussian_error = (u - G).norm() / G.norm();
  }
  return r;
}

double heat_automorphism_error(const Lattice& lat, const Mat& A, double t) {
  const int n1 = lat.group().n1();
  const MatrixField w = MatrixField::constant(A.topLeftCorner(n1, n1), "A");
  const Vec uA = heat_kernel(lat, lat.twisted_laplacian(w), t);
  const Vec u = heat_kernel(lat, lat.sub_laplacian(), t);
  const Mat Ai = A.inverse();
  const double scale = std::abs(Ai.determinant());
  const Vec ref = lat.sample([&](const Vec& x) { return scale * lat.interpolate(u, Ai * x); });
  return (uA - ref).norm() / ref.norm();
}

double translation_conjugation_error(const Lattice& lat, const Vec& x, const ScalarFn& f) {
  const SpMat P = lat.left_translation(x);
  const auto& alg = lat.group().alg();
  const SpMat lhs = P * lat.mult(f);
  const SpMat rhs = lat.mult([&](const Vec& y) { return f(bch_multiply(alg, -x, y)); }) * P;
  const SpMat diff = lhs - rhs;
  double e = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (SpMat::InnerIterator it(diff, k); it; ++it) e = std::max(e, std::abs(it.value()));
  return e;
}

namespace {

double keys(double s) {
  s = std::abs(s);
  if (s < 1.0) return (1.5 * s - 2.5) * s * s + 1.0;
  if (s < 2.0) return ((-0.5 * s + 2.5) * s - 4.0) * s + 2.0;
  return 0.0;
}

// Tensor cubic interpolation of data on the cell grid of a lattice.
double interpolate_cells(const Lattice& lat, const Vec& values, const Vec& x) {
  const int d = lat.dim(), M = lat.N() + 1;
  const double h = lat.h();
  const double origin = lat.cell(0)(0);  // every axis starts at the same coordinate
  std::vector<int> base(d);
  std::vector<std::array<double, 4>> w(d);
  for (int a = 0; a < d; ++a) {
    const double q = (x(a) - origin) / h;
    const double f = std::floor(q);
    base[a] = static_cast<int>(f) - 1;
    for (int s = 0; s < 4; ++s) w[a][s] = keys(q - (f - 1 + s));
  }
  double out = 0.0;
  for (int code = 0; code < (1 << (2 * d)); ++code) {
    double wt = 1.0;
    int idx = 0, c = code;
    bool inside = true;
    for (int a = 0; a < d; ++a) {
      const int p = base[a] + (c & 3);
      wt *= w[a][c & 3];
      c >>= 2;
      if (p < 0 || p >= M) inside = false;
      idx = idx * M + p;
    }
    if (inside && wt != 0.0) out += wt * values(idx);
  }
  return out;
}

std::shared_ptr<const Group> line() { return std::make_shared<const Group>(StratifiedAlgebra::abelian(1)); }

}  // namespace

std::vector<double> riesz_dilation_errors(const std::vector<std::pair<int, double>>& grids,
                                          const ScalarFn& f, double r, double window) {
  std::vector<double> errs;
  for (const auto& [N, L] : grids) {
    Lattice lat(line(), N, L);
    const RieszFamily fam = quasi_riesz(lat, MatrixField::constant(Mat::Identity(1, 1)));
    const Mat& R = fam.R[0];
    const Vec u1 = R * lat.sample(f);
    const Vec v = R * lat.sample([&](const Vec& x) { return f(x / r) / std::sqrt(r); });
    double num = 0.0, den = 0.0;
    for (int i = 0; i < lat.m(); ++i) {
      const Vec& x = lat.cells()[i];
      if (std::abs(x(0)) >= window) continue;
      const double u2 = std::sqrt(r) * interpolate_cells(lat, v, r * x);
      num += (u1(i) - u2) * (u1(i) - u2);
      den += u1(i) * u1(i);
    }
    errs.push_back(std::sqrt(num / den));
  }
  return errs;
}

double riesz_kernel_antisymmetry(int N, double L) {
  if (N % 2 == 0) fail("BadGrid", "antisymmetry needs an odd point count");
  Lattice lat(line(), N, L);
  const RieszFamily fam = quasi_riesz(lat, MatrixField::constant(Mat::Identity(1, 1)));
  const Vec K = fam.R[0].col(lat.origin());
  double e = 0.0;
  for (int i = 0; i < lat.m(); ++i) e = std::max(e, std::abs(K(i) + K(lat.m() - 1 - i)));
  return e / K.cwiseAbs().maxCoeff();
}

double riesz_kernel_scaling(int N, double L, double r, double inner, double outer) {
  Lattice lat(std::make_shared<const Group>(StratifiedAlgebra::abelian(2)), N, L, 1 << 20);
  const SpMat D = lat.sub_laplacian();
  Vec d = Vec::Zero(lat.n());
  d(lat.origin()) = 1.0 / lat.cell_volume();
  const Vec K = lat.field(0) * inv_sqrt_apply(D, d);
  const int Q = 2;
  // a forward difference along axis 0 sits at node + h/2 e0, while cells carry the
  // extra h/2 offset along axis 1 as well
  Vec off = Vec::Zero(2);
  off(1) = 0.5 * lat.h();
  double kmax = 0.0;
  for (int i = 0; i < lat.m(); ++i) {
    const double n = (lat.cells()[i] - off).norm();
    if (n >= inner && n <= outer) kmax = std::max(kmax, std::abs(K(i)));
  }
  double worst = 0.0;
  for (int i = 0; i < lat.m(); ++i) {
    const Vec x = lat.cells()[i] - off;
    const double n = x.norm();
    if (n < inner || n > outer || std::abs(K(i)) < 0.05 * kmax) continue;
    const double ratio = interpolate_cells(lat, K, r * x + off) * std::pow(r, Q) / K(i);
    worst = std::max(worst, std::abs(ratio - 1.0));
  }
  return worst;
}

double SingularValueProfile::schatten(double p) const {
  double s = 0.0;
  for (int i = 0; i < mu.size(); ++i) s += std::pow(mu(i), p);
  return std::pow(s, 1.0 / p);
}

double SingularValueProfile::weak_schatten(double p) const {
  double s = 0.0;
  for (int i = 0; i < mu.size(); ++i) s = std::max(s, std::pow(i + 1.0, 1.0 / p) * mu(i));
  return s;
}

bool SingularValueProfile::nonincreasing() const {
  for (int i = 1; i < mu.size(); ++i)
    if (mu(i) > mu(i - 1)) return false;
  return true;
}

SingularValueProfile compactness_profile(const Mat& T, int cap) {
  if (T.rows() > cap || T.cols() > cap) fail("CapExceeded", "profile needs a dense SVD above the cap");
  SingularValueProfile p;
  p.mu = singular_values(T);
  const int n = static_cast<int>(p.mu.size());
  p.decay_ratio = (n == 0 || p.mu(0) == 0.0) ? 0.0 : p.mu(n / 4) / p.mu(0);
  return p;
}

SpMat conjugation_operator(const Lattice& lat, const SmoothMap& phi) {
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < lat.n(); ++i) {
    const Vec& x = lat.nodes()[i];
    const double J = std::sqrt(std::abs(phi.jdet(x)));
    for (const auto& [j, w] : lat.interpolation_weights(phi(x))) t.emplace_back(i, j, J * w);
  }
  SpMat U(lat.n(), lat.n());
  U.setFromTriplets(t.begin(), t.end());
  return U;
}

MultiplierConjugation multiplier_conjugation(const Lattice& lat, const SmoothMap& phi,
                                             const ScalarFn& f, const ScalarFn& g) {
  const SmoothMap inv = phi.inverse();
  const SpMat U = conjugation_operator(lat, phi);
  const ScalarFn F = [&](const Vec& y) { return f(inv(y)); };
  const ScalarFn Fg = [&](const Vec& y) { return F(y) * g(y); };
  const Vec gv = lat.sample(g), Fgv = lat.sample(Fg);
  const Vec lhs = lat.sample(f).asDiagonal() * (U * gv);
  const Vec rhs = U * Fgv;
  MultiplierConjugation r;
  r.within = true;
  for (int i = 0; i < lat.n(); ++i) {
    const Vec& x = lat.nodes()[i];
    const Vec y = phi(x);
    const double J = std::sqrt(std::abs(phi.jdet(x)));
    const double b = J * (std::abs(f(x)) * std::abs(lat.interpolate(gv, y) - g(y)) +
                          std::abs(lat.interpolate(Fgv, y) - Fg(y)));
    const double res = std::abs(lhs(i) - rhs(i));
    r.residual = std::max(r.residual, res);
    r.bound = std::max(r.bound, b);
    if (res > b + 1e-12 * (1.0 + std::abs(lhs(i)))) r.within = false;
  }
  return r;
}

double conjugated_field_residual(const Group& g, const SmoothMap& phi, int k, const ScalarFn& test,
                                 const std::vector<Vec>& pts) {
  const SmoothMap inv = phi.inverse();
  const ScalarFn Ug = [&](const Vec& x) { return std::sqrt(std::abs(phi.jdet(x))) * test(phi(x)); };
  const ScalarFn a = conjugation_correction(g, phi, k);
  double worst = 0.0;
  for (const auto& y : pts) {
    const Vec x = inv(y);
    const double lhs = g.field(k).apply(Ug, x) / std::sqrt(std::abs(phi.jdet(x)));
    const Vec v = phi.jacobian(x) * g.field(k).at(x);
    const double rhs = directional_derivative(test, y, v) + a(y) * test(y);
    worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
  }
  return worst;
}

SqrtDifferenceRatio sqrt_difference_ratio(int pairs, int size, std::uint64_t seed) {
  Rng rng(seed);
  SqrtDifferenceRatio r;
  r.pairs = pairs;
  auto spd = [&]() {
    Mat G(size, size);
    for (int i = 0; i < size; ++i)
      for (int j = 0; j < size; ++j) G(i, j) = uniform(rng, -1.0, 1.0);
    Mat S = G * G.transpose() / size;
    S.diagonal().array() += 0.05;
    return S;
  };
  double sum = 0.0;
  for (int p = 0; p < pairs; ++p) {
    const Mat A = spd(), B = spd();
    const SymEig ea = sym_eig(A), eb = sym_eig(B);
    const auto pw = [](double e) { return [e](double l) { return std::pow(l, e); }; };
    const Mat lhs = (sym_fun(ea, pw(0.5)) - sym_fun(eb, pw(0.5))) * sym_fun(ea, pw(-0.5));
    const Mat rhs = sym_fun(eb, pw(-0.25)) * (B - A) * sym_fun(ea, pw(-0.75));
    const double ratio = spectral_norm(lhs) / spectral_norm(rhs);
    r.max_ratio = std::max(r.max_ratio, ratio);
    sum += ratio;
  }
  r.mean_ratio = sum / pairs;
  return r;
}

std::vector<double> localization_echo(int N, double L, const std::function<double(double)>& a,
                                      double x0, const std::vector<double>& eps) {
  Lattice lat(line(), N, L);
  MatrixField w;
  w.name = "a";
  w.n1 = 1;
  w.eval = [a](const Vec& x) { return Mat::Constant(1, 1, a(x(0))); };
  const Mat Ra = quasi_riesz(lat, w).R[0];
  const Mat R0 = quasi_riesz(lat, MatrixField::constant(Mat::Constant(1, 1, a(x0)))).R[0];
  std::vector<double> out;
  for (double e : eps) {
    const ScalarFn chi = [&](const Vec& x) { return smooth_cutoff(std::abs(x(0) - x0), e, 2.0 * e); };
    const Vec co = lat.sample_cells(chi), ci = lat.sample(chi);
    out.push_back(spectral_norm(co.asDiagonal() * (Ra - R0) * ci.asDiagonal()));
  }
  return out;
}

}  // namespace carnot
