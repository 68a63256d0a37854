#include "carnot/atlas.hpp"
#include "carnot/fixtures.hpp"

#include <doctest.h>

using namespace carnot;

TEST_CASE("map corpus verdicts") {
  const Group g(StratifiedAlgebra::heisenberg(1));
  Rng rng(3);
  const auto pts = sample_points(g, rng, 60);
  const auto corpus = diffeo_corpus(g.alg());
  CHECK(corpus.size() >= 12);
  int positives = 0;
  for (const auto& m : corpus) {
    const DiffeoReport r = check_G_diffeomorphism(g, m.map, pts);
    CHECK_MESSAGE(r.agree(), m.map.name());
    CHECK_MESSAGE(r.pass() == m.g_diffeo, m.map.name());
    positives += m.g_diffeo;
  }
  CHECK(positives == 6);
}

TEST_CASE("admissibility matrices") {
  const Group g(StratifiedAlgebra::heisenberg(1));
  const Mat A = (Mat(3, 3) << 2, 1, 0, 0, 1, 0, 0, 0, 2).finished();
  const SmoothMap aut = SmoothMap::linear(A, "A");
  const Vec x = (Vec(3) << 0.3, -0.4, 0.9).finished();
  CHECK((admissibility_matrix(g, aut, x) - A).norm() < 1e-12);
  // Left translations have identity admissibility matrices.
  const SmoothMap tr = SmoothMap::translation(g.alg(), (Vec(3) << 1, 2, 3).finished());
  CHECK((admissibility_matrix(g, tr, x) - Mat::Identity(3, 3)).norm() < 1e-12);
  // Dilations act by their matrix.
  const SmoothMap d = SmoothMap::dilation(g.alg(), 0.5);
  CHECK((admissibility_matrix(g, d, x) - dilation_matrix(g.alg(), 0.5)).norm() < 1e-12);
  // A right translation still has H = Id pointwise; it fails only off the first layer.
  const SmoothMap rt = SmoothMap::right_translation(g.alg(), (Vec(3) << 1, 0, 0).finished());
  CHECK((admissibility_matrix(g, rt, x) - Mat::Identity(3, 3)).norm() < 1e-12);
  // A degenerate horizontal Jacobian has no admissibility matrix.
  const Mat P = (Mat(3, 3) << 1, 0, 0, 0, 0, 0, 0, 0, 1).finished();
  CHECK_THROWS_AS(admissibility_matrix(g, SmoothMap::linear(P, "P"), x), Error);
}

TEST_CASE("strata automorphism checks") {
  const auto alg = StratifiedAlgebra::heisenberg(1);
  CHECK(check_strata_automorphism(alg, dilation_matrix(alg, 2.0)).ok);
  const Mat bad = (Mat(3, 3) << 2, 0, 0, 0, 1, 0, 0, 0, 1).finished();
  const auto c = check_strata_automorphism(alg, bad);
  CHECK_FALSE(c.ok);
  CHECK(c.bracket_residual > 0.1);
  double res = 1.0;
  const Mat ext = extend_first_block(alg, (Mat(2, 2) << 2, 1, 0, 1).finished(), &res);
  CHECK(res < 1e-12);
  CHECK(ext(2, 2) == doctest::Approx(2.0));
  CHECK_THROWS_AS(StrataAutomorphism::from_matrix(alg, bad), Error);
}

TEST_CASE("certified composition and the H chain rule") {
  const Group g(StratifiedAlgebra::heisenberg(1));
  Rng rng(6);
  const auto pts = sample_points(g, rng, 30);
  const auto corpus = diffeo_corpus(g.alg());
  const auto phi = CertifiedDiffeo::certify(g, corpus[5].map, pts);  // contact shear
  const auto psi = CertifiedDiffeo::certify(g, corpus[2].map, pts);  // automorphism
  const auto both = phi.compose(psi);
  for (int i = 0; i < 10; ++i) {
    const Vec& x = pts[i];
    CHECK((both.H(x) - phi.H(psi(x)) * psi.H(x)).norm() < 1e-8);
  }
  CHECK_THROWS_AS(CertifiedDiffeo::certify(g, corpus[6].map, pts), Error);
}

TEST_CASE("polynomial maps compose to polynomial maps") {
  const auto alg = StratifiedAlgebra::heisenberg(1);
  const SmoothMap tr = SmoothMap::translation(alg, (Vec(3) << 1, -0.5, 0.25).finished());
  const SmoothMap sh = SmoothMap::polynomial(parse_polyvec("x1; x2 + x1^2; x3 + x1^3/6", 3), "s");
  const SmoothMap c = tr.compose(sh);
  REQUIRE(c.polynomial_components().has_value());
  REQUIRE(SmoothMap::identity(3).compose(tr).polynomial_components().has_value());
  const Vec x = (Vec(3) << 0.3, -0.7, 1.1).finished();
  CHECK((c(x) - tr(sh(x))).norm() <= 1e-14);
  CHECK((c.jacobian(x) - tr.jacobian(sh(x)) * sh.jacobian(x)).norm() <= 1e-13);
  const SmoothMap ct = tr.compose(tr);
  CHECK((ct.inverse()(ct(x)) - x).norm() <= 1e-13);
}

TEST_CASE("localized diffeomorphism") {
  const Group g(StratifiedAlgebra::heisenberg(1));
  Rng rng(1);
  const SmoothMap shear = diffeo_corpus(g.alg())[5].map;
  const Vec xi = (Vec(3) << 0.2, 0.1, 0.0).finished();
  const LocalizedDiffeo loc = localize_diffeomorphism(g, shear, xi, rng);
  CHECK(loc.r1 > 0);
  CHECK(loc.min_det_ratio >= 0.5);
  CHECK((loc.map(xi) - shear(xi)).norm() < 1e-12);
}

TEST_CASE("fixture atlases satisfy the cocycle conditions") {
  for (const char* f : {"two_chart.atlas", "three_chart.atlas", "shear_chart.atlas"}) {
    const ChartAtlas atlas = parse_atlas_file(fixture_path(f));
    Rng rng(2);
    const AtlasReport r = verify_atlas(atlas, 100, rng);
    CHECK_MESSAGE(r.pass(), f);
    CHECK(r.pairwise_residual <= 1e-8);
    CHECK(r.triple_residual <= 1e-8);
  }
  const ChartAtlas three = parse_atlas_file(fixture_path("three_chart.atlas"));
  Rng rng(2);
  CHECK(verify_atlas(three, 50, rng).triples == 1);
}

TEST_CASE("atlas with a non G-diffeomorphic transition fails") {
  const std::string text =
      "group heisenberg1.grp\n"
      "chart U1\n  domain -2 2 -2 2 -3 3\n  map identity\n"
      "chart U2\n  domain -2 2 -2 2 -3 3\n  map right-translation 1 0 0\n"
      "overlap U1 U2\n";
  const ChartAtlas atlas = parse_atlas_text(text, fixture_dir());
  Rng rng(2);
  CHECK_FALSE(verify_atlas(atlas, 50, rng).pass());
}

TEST_CASE("atlas syntax errors") {
  CHECK_THROWS_AS(parse_atlas_text("chart U1\n", fixture_dir()), Error);
  CHECK_THROWS_AS(parse_atlas_text("group heisenberg1.grp\nchart U1\n  map spiral 2\n", fixture_dir()), Error);
  CHECK_THROWS_AS(parse_atlas_file("/nonexistent.atlas"), Error);
}
