#include "carnot/fixtures.hpp"
#include "carnot/spectral.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace carnot;

namespace {

std::shared_ptr<const Group> h1() { return std::make_shared<const Group>(StratifiedAlgebra::heisenberg(1)); }
std::shared_ptr<const Group> rn(int d) { return std::make_shared<const Group>(StratifiedAlgebra::abelian(d)); }

}  // namespace

TEST_CASE("lattice geometry and caps") {
  const Lattice lat(h1(), 7, 2.0);
  CHECK(lat.n() == 343);
  CHECK(lat.m() == 512);
  CHECK(lat.h() == doctest::Approx(2.0 / 3.0));
  CHECK(lat.node(lat.origin()).norm() == 0.0);
  CHECK((lat.cell(0) - lat.node(0)).norm() > 0.0);
  CHECK_THROWS_AS(Lattice(h1(), 20, 2.0, 5000), Error);
  CHECK_THROWS_AS(Lattice(h1(), 2, 2.0), Error);
}

TEST_CASE("adjoints are transposes on the lattice") {
  const Lattice lat(h1(), 5, 1.5);
  Rng rng(1);
  const Vec u = uniform_vec(rng, lat.n(), -1, 1);
  const Vec v = uniform_vec(rng, lat.m(), -1, 1);
  const SpMat X = lat.field(0);
  CHECK(v.dot(X * u) == doctest::Approx((Vec(X.transpose() * v)).dot(u)));
}

TEST_CASE("sub-Laplacian is symmetric and nonnegative") {
  const Lattice lat(h1(), 7, 2.0);
  const OperatorAudit a = audit_operator(lat.sub_laplacian());
  CHECK(a.symmetry_error <= 1e-12);
  CHECK(a.lambda_min >= -1e-10);
  CHECK(a.lambda_max > 0);
}

TEST_CASE("comparison bounds hold and are sharp for multiples of the identity") {
  const Lattice lat(h1(), 7, 2.0);
  const LaplacianContext ctx(lat);
  for (double c : {0.5, 2.0}) {
    const NormBoundResult r = verify_norm_bounds(lat, ctx, MatrixField::constant(c * Mat::Identity(2, 2)));
    CHECK(r.half_norm == doctest::Approx(1.0 / c).epsilon(1e-8));
    CHECK(r.quarter_norm == doctest::Approx(std::sqrt(1.0 / c)).epsilon(1e-8));
    CHECK(r.half_ok);
    CHECK(r.quarter_ok);
    CHECK(r.projection_residual <= 1e-8);
  }
  const auto corpus = norm_bound_corpus();
  const NormBoundResult r = verify_norm_bounds(lat, ctx, corpus[6]);
  CHECK(r.half_ok);
  CHECK(r.quarter_ok);
  CHECK(r.half_norm < r.half_bound);
  CHECK(r.lw_lambda_min >= -1e-10);
}

TEST_CASE("quasi-Riesz family by quadrature and by eigendecomposition") {
  const Lattice lat(h1(), 5, 1.5);
  const MatrixField w = norm_bound_corpus()[7];
  const RieszFamily a = quasi_riesz(lat, w, false), b = quasi_riesz(lat, w, true);
  for (int k = 0; k < 2; ++k) CHECK((a.R[k] - b.R[k]).norm() / a.R[k].norm() <= 1e-6);
  Rng rng(3);
  const Vec v = uniform_vec(rng, lat.n(), -1, 1);
  CHECK((inv_sqrt_apply(a.Lw, v) - a.inv_sqrt_Lw * v).norm() <= 1e-6 * v.norm());
}

TEST_CASE("heat kernel on the plane") {
  const Lattice lat(rn(2), 64, 3.2);
  const HeatResult h = heat_profile(lat, 0.1);
  CHECK(h.gaussian_error <= 2e-2);
  CHECK(h.boundary <= 1e-3);
  CHECK(h.centre_scaled == doctest::Approx(oracle::gaussian(Vec::Zero(2), 0.1) * 0.1).epsilon(0.03));
  CHECK(heat_automorphism_error(lat, (Mat(2, 2) << 1.25, 0, 0, 0.8).finished(), 0.1) <= 5e-2);
}

TEST_CASE("translation invariance on representable shifts") {
  const Lattice lat(h1(), 9, 4.0);
  const Vec x = (Vec(3) << 2, -2, 1).finished();
  CHECK(translation_conjugation_error(lat, x, [](const Vec& y) { return std::sin(y(0)) + y(2); }) <= 1e-12);
  CHECK_THROWS_AS(lat.left_translation((Vec(3) << 0.3, 0, 0).finished()), Error);
}

TEST_CASE("Riesz kernel on the line and the plane") {
  CHECK(riesz_kernel_antisymmetry(129, 8.0) <= 1e-12);
  CHECK(riesz_kernel_scaling(64, 4.0, 2.0, 0.5, 1.0) <= 0.2);
  const auto d = riesz_dilation_errors({{64, 8.0}, {128, 16.0}},
                                       [](const Vec& x) { return x(0) * std::exp(-x(0) * x(0)); });
  CHECK(d[1] < d[0]);
}

TEST_CASE("commutators with multipliers compress singular values") {
  const auto g = rn(1);
  const Lattice lat(g, 128, 8.0);
  const RieszFamily fam = quasi_riesz(lat, MatrixField::constant(Mat::Identity(1, 1)));
  const ScalarFn f = [](const Vec& x) { return std::exp(-x(0) * x(0)); };
  const Mat C = Mat(lat.mult_cells(f)) * fam.R[0] - fam.R[0] * Mat(lat.mult(f));
  const SingularValueProfile pc = compactness_profile(C), pr = compactness_profile(fam.R[0]);
  CHECK(pc.nonincreasing());
  CHECK(pc.decay_ratio <= 0.2);
  CHECK(pr.decay_ratio >= 0.9);
  CHECK_THROWS_AS(compactness_profile(C, 100), Error);
}

TEST_CASE("Schatten norms of a diagonal profile") {
  const SingularValueProfile p = compactness_profile((Vec(3) << 1.0, 0.5, 1.0 / 3).finished().asDiagonal());
  CHECK(p.schatten(1) == doctest::Approx(1 + 0.5 + 1.0 / 3));
  CHECK(p.schatten(2) == doctest::Approx(std::sqrt(1 + 0.25 + 1.0 / 9)));
  CHECK(p.weak_schatten(1) == doctest::Approx(1.0));
}

TEST_CASE("conjugation by diffeomorphisms") {
  const auto g2 = rn(2);
  const Lattice lat(g2, 33, 4.0);
  const ScalarFn f = [](const Vec& x) { return std::exp(-x.squaredNorm()); };
  const ScalarFn u = [](const Vec& x) { return std::exp(-2 * x.squaredNorm()); };
  const auto tr = multiplier_conjugation(lat, SmoothMap::translation(g2->alg(), (Vec(2) << 0.5, -0.25).finished()), f, u);
  CHECK(tr.residual <= 1e-12);
  const auto dl = multiplier_conjugation(lat, SmoothMap::dilation(g2->alg(), 2.0), f, u);
  CHECK(dl.residual <= 1e-12);

  const auto g = h1();
  const SmoothMap shear =
      SmoothMap::polynomial(parse_polyvec("x1 + 0.1*x1^3; x2; x3 + 0.05*x1^2*x2", 3), "s").with_newton_inverse();
  Rng rng(3);
  std::vector<Vec> pts;
  for (int i = 0; i < 30; ++i) pts.push_back(uniform_vec(rng, 3, -0.8, 0.8));
  CHECK(conjugated_field_residual(*g, shear, 0, [](const Vec& x) { return std::exp(-x.squaredNorm()) * (1 + x(0)); }, pts) <=
        1e-3);
}

TEST_CASE("random matrix ratio is stable") {
  const SqrtDifferenceRatio a = sqrt_difference_ratio(200, 30, 7), b = sqrt_difference_ratio(200, 30, 8);
  CHECK(a.pairs == 200);
  CHECK(b.mean_ratio == doctest::Approx(a.mean_ratio).epsilon(0.2));
  CHECK(a.max_ratio <= 1.0);
}

TEST_CASE("localization echo shrinks with the window") {
  const auto e = localization_echo(128, 8.0, [](double x) { return 1.5 + 0.5 * std::tanh(x); }, 0.3, {0.8, 0.4, 0.2});
  CHECK(e[1] < e[0]);
  CHECK(e[2] < e[1]);
  // A constant field has nothing to localize.
  const auto z = localization_echo(64, 8.0, [](double) { return 2.0; }, 0.3, {0.8});
  CHECK(z[0] <= 1e-12);
}
