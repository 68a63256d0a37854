#include "carnot/matfun.hpp"

#include <doctest.h>

using namespace carnot;

namespace {

Mat random_spd(int n, double lo, double hi, Rng& rng) {
  Mat q = Mat::NullaryExpr(n, n, [&] { return uniform(rng, -1, 1); });
  q = Eigen::HouseholderQR<Mat>(q).householderQ();
  Vec d(n);
  for (int i = 0; i < n; ++i) d(i) = lo * std::pow(hi / lo, double(i) / (n - 1));
  return q * d.asDiagonal() * q.transpose();
}

}  // namespace

TEST_CASE("symmetric eigensystem") {
  Rng rng(1);
  const Mat A = random_spd(12, 0.1, 50, rng);
  const SymEig e = sym_eig(A);
  CHECK((e.vectors * e.values.asDiagonal() * e.vectors.transpose() - A).norm() < 1e-11);
  CHECK(e.values(0) == doctest::Approx(0.1));
  for (int i = 1; i < 12; ++i) CHECK(e.values(i) >= e.values(i - 1));
  Mat B = A;
  B(0, 1) += 1.0;
  CHECK_THROWS_AS(sym_eig(B), Error);
}

TEST_CASE("inverse square root by quadrature") {
  Rng rng(2);
  for (double cond : {10.0, 1e3, 1e5}) {
    const Mat A = random_spd(20, 1.0 / cond, 1.0, rng);
    InvSqrtInfo info;
    const Mat q = inv_sqrt(A, &info);
    const Mat e = inv_sqrt_eig(A);
    CHECK((q - e).norm() / e.norm() <= 1e-6);
    CHECK((q * A * q - Mat::Identity(20, 20)).norm() <= 1e-5);
    CHECK(info.nodes > 0);
  }
  CHECK(inv_sqrt_scalar(4.0, 2.0, 64) == doctest::Approx(0.5).epsilon(1e-8));
  CHECK_THROWS_AS(inv_sqrt(-Mat::Identity(3, 3)), Error);
}

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  const GaussRule r = gauss_legendre(8);
  CHECK(r.weights.sum() == doctest::Approx(2.0));
  double m14 = 0.0;
  for (int i = 0; i < 8; ++i) m14 += r.weights(i) * std::pow(r.nodes(i), 14);
  CHECK(m14 == doctest::Approx(2.0 / 15.0).epsilon(1e-13));
}

TEST_CASE("singular values") {
  const Mat A = (Mat(2, 3) << 3, 0, 0, 0, 0, -4).finished();
  const Vec s = singular_values(A);
  CHECK(s(0) == doctest::Approx(4));
  CHECK(s(1) == doctest::Approx(3));
  CHECK(spectral_norm(A) == doctest::Approx(4));
}

TEST_CASE("matrix exp and log") {
  Rng rng(3);
  const Mat X = 0.2 * Mat::NullaryExpr(3, 3, [&] { return uniform(rng, -1, 1); });
  CHECK((logm_series(expm(X)) - X).norm() < 1e-12);
  const Mat R = (Mat(2, 2) << 0, -1, 1, 0).finished();
  const Mat E = expm(M_PI / 2 * R);
  CHECK((E - R).norm() < 1e-13);
  CHECK_THROWS_AS(logm_series(3.0 * Mat::Identity(2, 2)), Error);
}

TEST_CASE("semigroup action matches the dense exponential") {
  const int n = 30;
  SpMat A(n, n);
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, 2.0 * n * n);
    if (i + 1 < n) {
      t.emplace_back(i, i + 1, -1.0 * n * n);
      t.emplace_back(i + 1, i, -1.0 * n * n);
    }
  }
  A.setFromTriplets(t.begin(), t.end());
  Vec v = Vec::Zero(n);
  v(n / 2) = 1.0;
  const Vec ref = sym_fun(Mat(A), [](double l) { return std::exp(-0.01 * l); }) * v;
  CHECK((expm_action(A, v, 0.01) - ref).norm() <= 1e-10);
}

TEST_CASE("extreme eigenvalues") {
  Rng rng(4);
  const Mat A = random_spd(15, 0.5, 8.0, rng);
  const auto [lo, hi] = extreme_eigenvalues(A, 200);
  // The bracket is widened by 10% on each side.
  CHECK(lo == doctest::Approx(0.9 * 0.5).epsilon(1e-6));
  CHECK(hi == doctest::Approx(1.1 * 8.0).epsilon(1e-6));
}
