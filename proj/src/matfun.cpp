#include "carnot/matfun.hpp"

#include <lapacke.h>

#include <cmath>
#include <numbers>

namespace carnot {

SymEig sym_eig(const Mat& A) {
  const int n = static_cast<int>(A.rows());
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + A.cwiseAbs().maxCoeff()))
    fail("NotSymmetric", "matrix is not symmetric");
  SymEig e;
  e.vectors = A;
  e.values.resize(n);
  if (n == 0) return e;
  const int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, e.vectors.data(), n, e.values.data());
  if (info != 0) fail("EigenFailure", "dsyevd returned " + std::to_string(info));
  return e;
}

Vec sym_eigvals(const Mat& A) {
  const int n = static_cast<int>(A.rows());
  Mat w = A;
  Vec v(n);
  if (n == 0) return v;
  const int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'U', n, w.data(), n, v.data());
  if (info != 0) fail("EigenFailure", "dsyevd returned " + std::to_string(info));
  return v;
}

Mat sym_fun(const SymEig& e, const std::function<double(double)>& f) {
  Vec fv(e.values.size());
  for (int i = 0; i < fv.size(); ++i) fv(i) = f(e.values(i));
  return e.vectors * fv.asDiagonal() * e.vectors.transpose();
}

Mat sym_fun(const Mat& A, const std::function<double(double)>& f) { return sym_fun(sym_eig(A), f); }

Vec singular_values(const Mat& A) {
  const int m = static_cast<int>(A.rows()), n = static_cast<int>(A.cols());
  const int k = std::min(m, n);
  Vec s(k);
  if (k == 0) return s;
  Mat w = A;
  const int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', m, n, w.data(), m, s.data(), nullptr, 1,
                                  nullptr, 1);
  if (info != 0) fail("SvdFailure", "dgesdd returned " + std::to_string(info));
  return s;
}

double spectral_norm(const Mat& A) {
  if (A.size() == 0) return 0.0;
  return singular_values(A)(0);
}

GaussRule gauss_legendre(int n) {
  GaussRule r{Vec(n), Vec(n)};
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes(i) = -x;
    r.nodes(n - 1 - i) = x;
    r.weights(i) = w;
    r.weights(n - 1 - i) = w;
  }
  return r;
}

namespace {

// Nodes t_i and weights W_i with T^{-1/2} ~ sum W_i (T + t_i^2)^{-1}.
void quadrature(double lbar, int n, Vec& t, Vec& W) {
  const GaussRule g = gauss_legendre(n);
  t.resize(n);
  W.resize(n);
  const double s = std::sqrt(lbar);
  for (int i = 0; i < n; ++i) {
    const double u = g.nodes(i);
    const double q = (1.0 + u) / (1.0 - u);
    t(i) = s * q * q;
    W(i) = (2.0 / std::numbers::pi) * g.weights(i) * 4.0 / (1.0 - u * u) * t(i);
  }
}

}  // namespace

double inv_sqrt_scalar(double lambda, double lbar, int nodes) {
  Vec t, W;
  quadrature(lbar, nodes, t, W);
  double s = 0.0;
  for (int i = 0; i < nodes; ++i) s += W(i) / (lambda + t(i) * t(i));
  return s;
}

std::pair<double, double> extreme_eigenvalues(const Mat& T, int iters) {
  const int n = static_cast<int>(T.rows());
  Eigen::LLT<Mat> llt(T);
  if (llt.info() != Eigen::Success) fail("NotPositiveDefinite", "Cholesky factorization failed");
  Vec v = Vec::Ones(n).normalized(), w = v;
  double lmax = 0.0, lmin = 0.0;
  for (int i = 0; i < iters; ++i) {
    const Vec y = T * v;
    lmax = v.dot(y);
    v = y.normalized();
    const Vec z = llt.solve(w);
    lmin = 1.0 / w.dot(z);
    w = z.normalized();
  }
  // Rayleigh quotients lie inside the spectrum; widen slightly.
  return {lmin * 0.9, lmax * 1.1};
}

InvSqrtRule inv_sqrt_rule(double lmin, double lmax) {
  if (!(lmin > 0.0)) fail("NotPositiveDefinite", "smallest eigenvalue estimate is not positive");
  const double lbar = std::sqrt(lmin * lmax);
  int nodes = 64;
  double err = 0.0;
  for (;; nodes *= 2) {
    err = 0.0;
    for (double l : {lmin, lbar, lmax})
      err = std::max(err, std::abs(inv_sqrt_scalar(l, lbar, nodes) * std::sqrt(l) - 1.0));
    if (err <= 1e-10 || nodes >= 256) break;
  }
  InvSqrtRule r;
  quadrature(lbar, nodes, r.t, r.W);
  r.info = {nodes, lmin, lmax, err};
  return r;
}

Mat inv_sqrt(const Mat& T, InvSqrtInfo* info) {
  const int n = static_cast<int>(T.rows());
  const auto [lmin, lmax] = extreme_eigenvalues(T);
  const InvSqrtRule rule = inv_sqrt_rule(lmin, lmax);
  Mat S = Mat::Zero(n, n);
  for (int i = 0; i < rule.t.size(); ++i) {
    Mat M = T;
    M.diagonal().array() += rule.t(i) * rule.t(i);
    if (LAPACKE_dpotrf(LAPACK_COL_MAJOR, 'L', n, M.data(), n) != 0 ||
        LAPACKE_dpotri(LAPACK_COL_MAJOR, 'L', n, M.data(), n) != 0)
      fail("NotPositiveDefinite", "shifted matrix is not positive definite");
    S.triangularView<Eigen::Lower>() += rule.W(i) * M;
  }
  S.triangularView<Eigen::StrictlyUpper>() = S.transpose();
  if (info) *info = rule.info;
  return S;
}

Mat inv_sqrt_eig(const Mat& T) {
  const SymEig e = sym_eig(T);
  if (e.values.size() && !(e.values(0) > 0.0))
    fail("NotPositiveDefinite", "smallest eigenvalue is not positive");
  return sym_fun(e, [](double l) { return 1.0 / std::sqrt(l); });
}

Mat expm(const Mat& X) {
  const int n = static_cast<int>(X.rows());
  const double norm = X.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm > 0.5) s = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Mat A = X / std::ldexp(1.0, s);
  Mat E = Mat::Identity(n, n), term = Mat::Identity(n, n);
  for (int k = 1; k < 30; ++k) {
    term = term * A / k;
    E += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18 * E.cwiseAbs().maxCoeff()) break;
  }
  for (int i = 0; i < s; ++i) E = E * E;
  return E;
}

Mat logm_series(const Mat& V) {
  const int n = static_cast<int>(V.rows());
  const Mat D = V - Mat::Identity(n, n);
  const double r = spectral_norm(D);
  if (r > 0.5 + 1e-12) fail("EpsilonTooLarge", "log series needs |V - 1| <= 1/2, got " + std::to_string(r));
  Mat L = Mat::Zero(n, n), P = Mat::Identity(n, n);
  for (int k = 1; k < 200; ++k) {
    P = P * D;
    L += ((k % 2) ? 1.0 : -1.0) / k * P;
    if (std::pow(r, k) / k < 1e-17) break;
  }
  return L;
}

Vec expm_action(const SpMat& A, const Vec& v, double t) {
  double norm1 = 0.0;
  for (int k = 0; k < A.outerSize(); ++k) {
    double c = 0.0;
    for (SpMat::InnerIterator it(A, k); it; ++it) c += std::abs(it.value());
    norm1 = std::max(norm1, c);
  }
  const int steps = std::max(1, static_cast<int>(std::ceil(t * norm1)));
  const double dt = t / steps;
  Vec u = v;
  for (int s = 0; s < steps; ++s) {
    Vec term = u, acc = u;
    for (int k = 1; k < 60; ++k) {
      term = (A * term) * (-dt / k);
      acc += term;
      if (term.norm() <= 1e-17 * acc.norm()) break;
    }
    u = acc;
  }
  return u;
}

}  // namespace carnot
