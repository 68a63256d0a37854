#include "carnot/lattice.hpp"

#include "carnot/matfun.hpp"

#include <Eigen/SparseCholesky>

#include <array>
#include <cmath>

namespace carnot {

MatrixField MatrixField::constant(const Mat& A, std::string name) {
  MatrixField w;
  w.name = std::move(name);
  w.n1 = static_cast<int>(A.rows());
  w.eval = [A](const Vec&) { return A; };
  return w;
}

Lattice::Lattice(std::shared_ptr<const Group> g, int N, double L, int cap)
    : g_(std::move(g)), d_(g_->dim()), N_(N), c_(N / 2), cap_(cap), L_(L) {
  if (N < 3) fail("BadGrid", "need at least 3 points per axis");
  if (!(L > 0.0)) fail("BadGrid", "extent must be positive");
  h_ = L / c_;
  double nn = std::pow(static_cast<double>(N), d_);
  if (nn > cap) fail("CapExceeded", std::to_string(static_cast<long>(nn)) + " unknowns exceed the cap " +
                                        std::to_string(cap));
  n_ = static_cast<int>(nn);
  m_ = static_cast<int>(std::pow(static_cast<double>(N + 1), d_));
  nodes_.reserve(n_);
  for (int i = 0; i < n_; ++i) nodes_.push_back(node(i));
  cells_.reserve(m_);
  for (int i = 0; i < m_; ++i) cells_.push_back(cell(i));
}

int Lattice::origin() const { return node_index(std::vector<int>(d_, c_)); }

std::vector<int> Lattice::node_multi(int idx) const {
  std::vector<int> p(d_);
  for (int a = d_ - 1; a >= 0; --a) {
    p[a] = idx % N_;
    idx /= N_;
  }
  return p;
}

int Lattice::node_index(const std::vector<int>& p) const {
  int idx = 0;
  for (int a = 0; a < d_; ++a) {
    if (p[a] < 0 || p[a] >= N_) return -1;
    idx = idx * N_ + p[a];
  }
  return idx;
}

Vec Lattice::node(int idx) const {
  const auto p = node_multi(idx);
  Vec x(d_);
  for (int a = 0; a < d_; ++a) x(a) = (p[a] - c_) * h_;
  return x;
}

namespace {

std::vector<int> cell_multi(int idx, int d, int N) {
  std::vector<int> p(d);
  for (int a = d - 1; a >= 0; --a) {
    p[a] = idx % (N + 1) - 1;
    idx /= (N + 1);
  }
  return p;
}

}  // namespace

Vec Lattice::cell(int idx) const {
  const auto p = cell_multi(idx, d_, N_);
  Vec x(d_);
  for (int a = 0; a < d_; ++a) x(a) = (p[a] - c_) * h_ + 0.5 * h_;
  return x;
}

Vec Lattice::sample(const ScalarFn& f) const {
  Vec v(n_);
  for (int i = 0; i < n_; ++i) v(i) = f(nodes_[i]);
  return v;
}

Vec Lattice::sample_cells(const ScalarFn& f) const {
  Vec v(m_);
  for (int i = 0; i < m_; ++i) v(i) = f(cells_[i]);
  return v;
}

namespace {

SpMat diagonal(const Vec& v) {
  SpMat D(v.size(), v.size());
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < v.size(); ++i)
    if (v(i) != 0.0) t.emplace_back(i, i, v(i));
  D.setFromTriplets(t.begin(), t.end());
  return D;
}

}  // namespace

SpMat Lattice::mult(const ScalarFn& f) const { return diagonal(sample(f)); }
SpMat Lattice::mult_cells(const ScalarFn& f) const { return diagonal(sample_cells(f)); }

SpMat Lattice::partial(int a) const {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(2 * m_);
  for (int r = 0; r < m_; ++r) {
    auto p = cell_multi(r, d_, N_);
    const int i0 = node_index(p);
    if (i0 >= 0) t.emplace_back(r, i0, -1.0 / h_);
    p[a] += 1;
    const int i1 = node_index(p);
    if (i1 >= 0) t.emplace_back(r, i1, 1.0 / h_);
  }
  SpMat D(m_, n_);
  D.setFromTriplets(t.begin(), t.end());
  return D;
}

SpMat Lattice::field(int k) const {
  SpMat X(m_, n_);
  for (int a = 0; a < d_; ++a) {
    const Vec coef = sample_cells([&](const Vec& x) { return g_->field(k).at(x)(a); });
    if (coef.cwiseAbs().maxCoeff() == 0.0) continue;
    X += diagonal(coef) * partial(a);
  }
  return X;
}

std::vector<SpMat> Lattice::twisted_fields(const MatrixField& w) const {
  const int n1 = g_->n1();
  if (w.n1 != n1) fail("DimensionMismatch", "matrix field must be " + std::to_string(n1) + "x" + std::to_string(n1));
  std::vector<Mat> W;
  W.reserve(m_);
  for (const auto& x : cells_) W.push_back(w(x));
  std::vector<SpMat> X;
  for (int j = 0; j < n1; ++j) X.push_back(field(j));
  std::vector<SpMat> out;
  for (int k = 0; k < n1; ++k) {
    SpMat Y(m_, n_);
    for (int j = 0; j < n1; ++j) {
      Vec c(m_);
      for (int r = 0; r < m_; ++r) c(r) = W[r](j, k);
      if (c.cwiseAbs().maxCoeff() == 0.0) continue;
      Y += diagonal(c) * X[j];
    }
    out.push_back(Y);
  }
  return out;
}

SpMat Lattice::twisted_field(const MatrixField& w, int k) const { return twisted_fields(w)[k]; }

SpMat Lattice::sub_laplacian() const {
  SpMat D(n_, n_);
  for (int k = 0; k < g_->n1(); ++k) {
    const SpMat X = field(k);
    D += SpMat(X.transpose()) * X;
  }
  return D;
}

SpMat Lattice::twisted_laplacian(const MatrixField& w) const {
  SpMat D(n_, n_);
  for (const auto& X : twisted_fields(w)) D += SpMat(X.transpose()) * X;
  return D;
}

SpMat Lattice::left_translation(const Vec& x) const {
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < n_; ++i) {
    const Vec y = bch_multiply(g_->alg(), -x, nodes_[i]);
    std::vector<int> p(d_);
    for (int a = 0; a < d_; ++a) {
      const double q = y(a) / h_ + c_;
      const double r = std::round(q);
      if (std::abs(q - r) > 1e-9) fail("NonRepresentableShift", "x^{-1} y leaves the grid");
      p[a] = static_cast<int>(r);
    }
    const int j = node_index(p);
    if (j >= 0) t.emplace_back(i, j, 1.0);
  }
  SpMat P(n_, n_);
  P.setFromTriplets(t.begin(), t.end());
  return P;
}

namespace {

// Keys cubic convolution kernel, a = -1/2.
double keys(double s) {
  s = std::abs(s);
  if (s < 1.0) return (1.5 * s - 2.5) * s * s + 1.0;
  if (s < 2.0) return ((-0.5 * s + 2.5) * s - 4.0) * s + 2.0;
  return 0.0;
}

}  // namespace

std::vector<std::pair<int, double>> Lattice::interpolation_weights(const Vec& x) const {
  std::vector<int> base(d_);
  std::vector<std::array<double, 4>> w(d_);
  for (int a = 0; a < d_; ++a) {
    const double q = x(a) / h_ + c_;
    const double f = std::floor(q);
    base[a] = static_cast<int>(f) - 1;
    for (int s = 0; s < 4; ++s) w[a][s] = keys(q - (f - 1 + s));
  }
  std::vector<std::pair<int, double>> out;
  std::vector<int> p(d_);
  const int total = 1 << (2 * d_);
  for (int code = 0; code < total; ++code) {
    double wt = 1.0;
    int c = code;
    for (int a = 0; a < d_; ++a) {
      const int s = c & 3;
      c >>= 2;
      p[a] = base[a] + s;
      wt *= w[a][s];
    }
    if (wt == 0.0) continue;
    const int idx = node_index(p);
    if (idx >= 0) out.emplace_back(idx, wt);
  }
  return out;
}

double Lattice::interpolate(const Vec& values, const Vec& x) const {
  double s = 0.0;
  for (const auto& [i, w] : interpolation_weights(x)) s += w * values(i);
  return s;
}

void Lattice::require_dense() const {
  if (n_ > cap_) fail("CapExceeded", "dense routine on " + std::to_string(n_) + " unknowns");
}

double sup_norm(const MatrixField& w, const std::vector<Vec>& pts) {
  double s = 0.0;
  for (const auto& x : pts) s = std::max(s, spectral_norm(w(x)));
  return s;
}

double sup_inverse_norm(const MatrixField& w, const std::vector<Vec>& pts) {
  double s = 0.0;
  for (const auto& x : pts) {
    const Vec sv = singular_values(w(x));
    s = std::max(s, 1.0 / sv(sv.size() - 1));
  }
  return s;
}

RieszFamily quasi_riesz(const Lattice& lat, const MatrixField& w, bool quadrature) {
  lat.require_dense();
  RieszFamily f;
  const auto X = lat.twisted_fields(w);
  f.Lw = SpMat(lat.n(), lat.n());
  for (const auto& Y : X) f.Lw += SpMat(Y.transpose()) * Y;
  const Mat L = Mat(f.Lw);
  f.inv_sqrt_Lw = quadrature ? inv_sqrt(L) : inv_sqrt_eig(L);
  for (const auto& Y : X) f.R.push_back(Y * f.inv_sqrt_Lw);
  return f;
}

Vec inv_sqrt_apply(const SpMat& T, const Vec& v) {
  const int n = static_cast<int>(T.rows());
  Eigen::SimplicialLDLT<SpMat> base(T);
  if (base.info() != Eigen::Success) fail("NotPositiveDefinite", "sparse factorization failed");
  // Extreme eigenvalue estimates by power and inverse iteration.
  Vec a = Vec::Ones(n).normalized(), b = a;
  double lmax = 0.0, lmin = 0.0;
  for (int i = 0; i < 80; ++i) {
    const Vec y = T * a;
    lmax = a.dot(y);
    a = y.normalized();
    const Vec z = base.solve(b);
    lmin = 1.0 / b.dot(z);
    b = z.normalized();
  }
  if (!(lmin > 0.0)) fail("NotPositiveDefinite", "smallest eigenvalue estimate is not positive");
  const InvSqrtRule rule = inv_sqrt_rule(0.9 * lmin, 1.1 * lmax);
  SpMat I(n, n);
  I.setIdentity();
  Eigen::SimplicialLDLT<SpMat> ldlt;
  ldlt.analyzePattern(T);
  Vec out = Vec::Zero(n);
  for (int i = 0; i < rule.t.size(); ++i) {
    ldlt.factorize(T + rule.t(i) * rule.t(i) * I);
    out += rule.W(i) * ldlt.solve(v);
  }
  return out;
}

}  // namespace carnot
