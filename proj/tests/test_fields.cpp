#include "carnot/fields.hpp"

#include <doctest.h>

using namespace carnot;

TEST_CASE("Heisenberg fields in closed form") {
  const Group g(StratifiedAlgebra::heisenberg(1));
  Vec x(3);
  x << 0.7, -1.3, 2.0;
  Vec z1(3), z2(3), z3(3);
  z1 << 1, 0, -x(1) / 2;
  z2 << 0, 1, x(0) / 2;
  z3 << 0, 0, 1;
  CHECK((g.field(0).at(x) - z1).norm() < 1e-15);
  CHECK((g.field(1).at(x) - z2).norm() < 1e-15);
  CHECK((g.field(2).at(x) - z3).norm() < 1e-15);
}

TEST_CASE("fields are the derivative of right multiplication") {
  for (const auto& alg : {StratifiedAlgebra::heisenberg(1), StratifiedAlgebra::engel()}) {
    const Group g(alg);
    Rng rng(1);
    for (int i = 0; i < 20; ++i) {
      const Vec x = random_point(alg, rng);
      for (int j = 0; j < g.dim(); ++j) {
        const double t = 1e-6;
        const Vec e = Vec::Unit(g.dim(), j);
        const Vec fd = (g.mul(x, t * e) - g.mul(x, -t * e)) / (2 * t);
        CHECK((fd - g.field(j).at(x)).norm() < 1e-8);
      }
    }
  }
}

TEST_CASE("bracket closure and homogeneity") {
  for (const auto& alg : {StratifiedAlgebra::heisenberg(1), StratifiedAlgebra::heisenberg(2),
                          StratifiedAlgebra::engel(), StratifiedAlgebra::abelian(2)}) {
    const auto f = derive_left_invariant_fields(alg);
    CHECK(bracket_closure_residual(alg, f) <= 1e-12);
    const auto h = audit_homogeneity(alg, f);
    CHECK(h.ok);
    CHECK(h.slots == alg.dim() * alg.dim());
  }
}

TEST_CASE("homogeneity audit catches a perturbed coefficient") {
  const auto alg = StratifiedAlgebra::heisenberg(1);
  auto f = derive_left_invariant_fields(alg);
  f[0].coeffs[2] += Polynomial::variable(3, 2);  // x3 has weight 2, slot wants 1
  const auto h = audit_homogeneity(alg, f);
  CHECK_FALSE(h.ok);
  CHECK(h.failures.size() == 1);
  CHECK(bracket_closure_residual(alg, f) > 0.1);
}

TEST_CASE("numeric bracket agrees with the structure constants") {
  const Group g(StratifiedAlgebra::engel());
  Rng rng(5);
  const Vec x = random_point(g.alg(), rng);
  const Vec b = field_bracket(g.field(0).evaluator(), g.field(2).evaluator(), x);
  CHECK((b - g.field(3).at(x)).norm() < 1e-7);
}

TEST_CASE("left invariance") {
  const Group g(StratifiedAlgebra::engel());
  const Polynomial f = parse_polynomial("x1*x4 + x2^2*x3 - 3*x3 + x1^3", 4);
  Rng rng(8);
  for (int i = 0; i < 50; ++i) {
    const Vec a = random_point(g.alg(), rng, 2.0), x = random_point(g.alg(), rng, 2.0);
    CHECK(left_invariance_residual(g, f, a, x) <= 1e-10);
  }
  // Translation does not commute with a non-invariant field such as d/dx1.
  const SmoothMap tr = SmoothMap::translation(g.alg(), (Vec(4) << 0, 1, 0, 0).finished());
  const FieldFn d1 = [](const Vec&) { return Vec::Unit(4, 0); };
  const Vec y = (Vec(4) << 0.2, 0.1, 0.3, 0.4).finished();
  CHECK((pushforward_field(tr, d1)(y) - d1(y)).norm() > 0.1);
}

TEST_CASE("pushforward under a dilation scales first-layer fields") {
  const Group g(StratifiedAlgebra::heisenberg(1));
  const SmoothMap d = SmoothMap::dilation(g.alg(), 3.0);
  const Vec y = (Vec(3) << 0.4, -0.2, 1.1).finished();
  for (int k = 0; k < 2; ++k)
    CHECK((pushforward_field(d, g.field(k).evaluator())(y) - 3.0 * g.field(k).at(y)).norm() < 1e-9);
}

TEST_CASE("polynomial parsing") {
  const Polynomial p = parse_polynomial("x1 + x2^2/2 - 3*x1*x3", 3);
  CHECK(p((Vec(3) << 1, 2, 3).finished()) == doctest::Approx(1 + 2 - 9));
  CHECK(p.weighted_degree({1, 1, 2}) == std::nullopt);
  CHECK(parse_polynomial("x1*x2", 3).weighted_degree({1, 1, 2}) == 2);
  CHECK_THROWS_AS(parse_polynomial("x1 +", 3), Error);
  CHECK_THROWS_AS(parse_polynomial("x4", 3), Error);
}
