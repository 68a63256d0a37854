#include "carnot/covering.hpp"

#include <doctest.h>

using namespace carnot;

TEST_CASE("square partition of unity") {
  for (const auto& alg : {StratifiedAlgebra::heisenberg(1), StratifiedAlgebra::engel(), StratifiedAlgebra::abelian(2)}) {
    const auto g = std::make_shared<const Group>(alg);
    for (double eps : {1.0, 0.35}) {
      const auto cov = CoveringSystem::build(g, eps, Box::cube(g->dim(), 1.5));
      Rng rng(7);
      for (int i = 0; i < 500; ++i) {
        const Vec x = cov.extent().sample(rng);
        double s = 0.0;
        for (const auto& [k, v] : cov.eta(x)) {
          s += v * v;
          CHECK(v == doctest::Approx(cov.eta(k, x)));
          CHECK(g->dist(x, cov.center(k)) < CoveringSystem::support_radius * eps + 1e-12);
        }
        CHECK(std::abs(s - 1.0) <= 1e-12);
      }
    }
  }
}

TEST_CASE("centers sit on the dilated lattice") {
  const auto g = std::make_shared<const Group>(StratifiedAlgebra::heisenberg(1));
  const auto cov = CoveringSystem::build(g, 0.5, Box::cube(3, 1.0));
  const Vec c = cov.center({1, -2, 3});
  CHECK((c - dilate(g->alg(), 0.5, (Vec(3) << 1, -2, 3).finished())).norm() < 1e-15);
  // A lattice point is its own unique bump center at full height.
  const auto e = cov.eta(c);
  REQUIRE(e.size() == 1);
  CHECK(e[0].second == 1.0);
}

TEST_CASE("multiplicity grows like C^Q") {
  const auto g = std::make_shared<const Group>(StratifiedAlgebra::heisenberg(1));
  const auto cov = CoveringSystem::build(g, 0.5, Box::cube(3, 1.0));
  Rng rng(3);
  const MultiplicityAudit m = cov.multiplicity({1.0, 2.0, 4.0}, 500, rng);
  CHECK(m.Q == 4);
  CHECK(m.monotone);
  for (size_t i = 0; i < m.C.size(); ++i) CHECK(m.multiplicity[i] <= std::pow(m.M * m.C[i], m.Q) * (1 + 1e-12));
  CHECK(m.multiplicity[0] >= 1);
}

TEST_CASE("covering errors") {
  const auto g = std::make_shared<const Group>(StratifiedAlgebra::heisenberg(1));
  CHECK_THROWS_AS(CoveringSystem::build(g, 0.5, Box{Vec::Constant(3, 1.0), Vec::Constant(3, -1.0)}), Error);
  CHECK_THROWS_AS(CoveringSystem::build(g, 0.0, Box::cube(3, 1.0)), Error);
}

TEST_CASE("smooth cutoff") {
  CHECK(smooth_cutoff(0.2, 0.5, 1.0) == 1.0);
  CHECK(smooth_cutoff(1.2, 0.5, 1.0) == 0.0);
  CHECK(smooth_cutoff(0.75, 0.5, 1.0) == doctest::Approx(0.5));
  double prev = 1.0;
  for (double s = 0.5; s <= 1.0; s += 0.01) {
    const double v = smooth_cutoff(s, 0.5, 1.0);
    CHECK(v <= prev);
    prev = v;
  }
}
