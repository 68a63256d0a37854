#include "carnot/fixtures.hpp"
#include "carnot/manifold_symbol.hpp"
#include "carnot/symbol_file.hpp"

#include <doctest.h>

using namespace carnot;

namespace {

SymbolFile fixture() { return parse_symbol_file(fixture_path("symbols.sym")); }

const FormalElement& expr(const SymbolFile& f, const std::string& name) {
  for (const auto& [n, e] : f.exprs)
    if (n == name) return e;
  throw std::runtime_error("missing " + name);
}

std::vector<Letter> letters() {
  return {Letter::mult("psi"), Letter::mult("f"), Letter::riesz(0, "A"), Letter::riesz_adj(1, "a"),
          Letter::compact()};
}

}  // namespace

TEST_CASE("symbol file parses") {
  const SymbolFile f = fixture();
  CHECK(f.exprs.size() == 5);
  CHECK(f.alphabet->probes.size() == 3);
  CHECK(f.alphabet->function("psi").support.has_value());
  CHECK_FALSE(f.alphabet->function("f").support.has_value());
  CHECK(f.alphabet->is_field("a"));
  CHECK(symbol(expr(f, "sandwich")) ==
        SymbolExpr::term({{"psi", "psi"}, {Letter::riesz(0, "A")}}));
}

TEST_CASE("symbol file errors") {
  const std::string head = "group " + fixture_path("heisenberg1.grp") + "\n";
  CHECK_THROWS_AS(parse_symbol_text(head + "expr e (mult nope)\n", ""), Error);
  CHECK_THROWS_AS(parse_symbol_text(head + "automorphism A 2 1 | 0 1\nexpr e (riesz 3 A)\n", ""), Error);
  CHECK_THROWS_AS(parse_symbol_text(head + "automorphism S 1 0 | 0 0\n", ""), Error);
  CHECK_THROWS_AS(parse_symbol_text("probe 1 2 3\n", ""), Error);
  try {
    parse_symbol_text(head + "function f poly x1\nexpr e (* (mult f)\n", "");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == "SyntaxError");
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("canonical forms") {
  const SymbolFile f = fixture();
  // Scalars commute inside the symbol; Riesz letters keep their order.
  const FormalElement comm = expr(f, "commutator");
  CHECK_FALSE(comm.is_zero());
  CHECK(kernel_test(comm));
  CHECK_FALSE(kernel_test(expr(f, "sandwich")));
  CHECK(kernel_test(expr(f, "adjoint_pair")));
  const SymbolExpr cp = symbol(expr(f, "compact_piece"));
  REQUIRE(cp.terms().size() == 1);
  CHECK(cp.terms().begin()->second == cplx(0, 2));
}

TEST_CASE("symbol is a *-homomorphism on random words") {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const FormalElement a = random_element(letters(), 3, 6, rng), b = random_element(letters(), 3, 6, rng);
    CHECK(symbol(a + b) == symbol(a) + symbol(b));
    CHECK(symbol(a * b) == symbol(a) * symbol(b));
    CHECK(symbol(a.adjoint()) == symbol(a).adjoint());
    CHECK(a.adjoint().adjoint() == a);
    CHECK(symbol(lift(symbol(a))) == symbol(a));
    CHECK(kernel_test(a - lift(symbol(a))));
    CHECK(symbol(a.scaled(cplx(0, 2))) == symbol(a).scaled(cplx(0, 2)));
  }
}

TEST_CASE("probe equality sees through scalar names") {
  const SymbolFile f = fixture();
  Alphabet& al = *f.alphabet;
  al.add_function("f2", [](const Vec& x) { return 1 + 0.5 * x(0) * x(0); });
  const SymbolExpr a = SymbolExpr::term({{"f"}, {Letter::riesz(0, "A")}});
  const SymbolExpr b = SymbolExpr::term({{"f2"}, {Letter::riesz(0, "A")}});
  CHECK_FALSE(a == b);
  CHECK(probe_equal(a, b, al));
  CHECK_FALSE(probe_equal(a, SymbolExpr::term({{"g"}, {Letter::riesz(0, "A")}}), al));
}

TEST_CASE("fiber elements") {
  const Mat A = (Mat(2, 2) << 2, 1, 0, 1).finished();
  FiberElement e;
  e.add({{0, false, A}}, 1.0);
  e.add({{0, false, A + Mat::Constant(2, 2, 1e-12)}}, 2.0);
  CHECK(e.terms().size() == 1);
  CHECK(e.weight() == doctest::Approx(3.0));
  const Mat H = (Mat(3, 3) << 1, 1, 0, 0, 1, 0, 0, 0, 1).finished();
  const FiberElement h = e.acted(H);
  CHECK((h.terms()[0].first[0].A - H.topLeftCorner(2, 2) * A).norm() == 0.0);
  CHECK(fiber_distance(e, e) == 0.0);
  CHECK(fiber_distance(e, FiberElement{}) == doctest::Approx(3.0));
  CHECK((e + e.scaled(-1.0)).is_zero(1e-15));
}

TEST_CASE("sandwich symbol matches its direct assembly") {
  const SymbolFile f = fixture();
  Alphabet& al = *f.alphabet;
  const FormalElement e = FormalElement::word({Letter::mult("psi"), Letter::riesz(0, "a"), Letter::mult("psi")});
  const SymbolSection s = section(symbol(e), al), direct = symbol_of_sandwich(al, "psi", "a", 0);
  for (const auto& p : al.probes) CHECK(fiber_distance(s(p), direct(p)) <= 1e-15);
}

TEST_CASE("equivariance composes") {
  const SymbolFile f = fixture();
  Alphabet& al = *f.alphabet;
  const Group& g = al.group();
  Rng rng(4);
  const auto pts = sample_points(g, rng, 30);
  const auto corpus = diffeo_corpus(g.alg());
  const auto phi = CertifiedDiffeo::certify(g, corpus[5].map, pts);
  const auto psi = CertifiedDiffeo::certify(g, corpus[2].map, pts);
  const auto both = phi.compose(psi);
  const FormalElement e = expr(f, "mixed");
  const SymbolSection one = conjugate_by_diffeo(e, al, both);
  const SymbolSection two = transport(conjugate_by_diffeo(e, al, psi), phi);
  const SymbolSection letters_route =
      section(symbol(conjugate_element(conjugate_element(e, al, psi, "psi"), al, phi, "phi")), al);
  for (int i = 0; i < 10; ++i) {
    const Vec y = both(pts[i]);
    CHECK(fiber_distance(one(y), two(y)) <= 1e-8);
    CHECK(fiber_distance(one(y), letters_route(y)) <= 1e-8);
  }
  CHECK_THROWS_AS(conjugate_by_diffeo(expr(f, "commutator"), al, phi), Error);
}

TEST_CASE("chart transfer and globalization") {
  const SymbolFile f = fixture();
  Alphabet& al = *f.alphabet;
  const auto atlas = std::make_shared<const ChartAtlas>(parse_atlas_file(fixture_path("two_chart.atlas")));
  al.add_function("b2", box_bump((Vec(3) << 1.5, 0.5, 0).finished(), 0.8),
                  Box{(Vec(3) << 0.7, -0.3, -0.8).finished(), (Vec(3) << 2.3, 1.3, 0.8).finished()});
  const FormalElement e = FormalElement::word({Letter::mult("b2"), Letter::riesz(1, "B"), Letter::mult("b2")});

  // Ext after Rest returns the element with its original names.
  const FormalElement pushed = rest(*atlas, {1, e}, al);
  CHECK_FALSE(pushed == e);
  CHECK(ext(*atlas, 1, pushed, al).e == e);
  // Identity charts keep names.
  CHECK(rest(*atlas, {0, expr(f, "sandwich")}, al) == expr(f, "sandwich"));
  // An unbounded multiplier leaks out of the chart.
  CHECK_THROWS_AS(rest(*atlas, {0, expr(f, "commutator")}, al), Error);

  const std::vector<ScalarFn> partition = {
      [](const Vec& p) { return smooth_cutoff(p(0), -0.5, 1.5); },
      [](const Vec& p) { return 1.0 - smooth_cutoff(p(0), -0.5, 1.5); },
  };
  Rng rng(2);
  const std::vector<ChartElement> pieces = {{0, expr(f, "sandwich")}, {1, e}};
  const BundleSection s = globalize(atlas, pieces, partition, al, rng);
  CHECK(s.compatibility(100, rng) <= 1e-12);
  CHECK(s.norm_proxy(50, rng) > 0.0);

  // Compact pieces are killed; globalize is linear.
  const FormalElement k = FormalElement::word({Letter::mult("psi"), Letter::compact(), Letter::mult("psi")});
  const BundleSection sk = globalize(atlas, {{0, k}}, partition, al, rng);
  const BundleSection s2 = globalize(atlas, {{0, expr(f, "sandwich").scaled(2.0)}, {1, e.scaled(2.0)}}, partition, al, rng);
  for (int i = 0; i < 20; ++i) {
    const Vec p = atlas->charts()[0].domain.sample(rng);
    CHECK(sk(0, p).is_zero());
    CHECK(fiber_distance(s2(0, p), s(0, p).scaled(2.0)) <= 1e-12);
  }

  const std::vector<ScalarFn> bad = {[](const Vec&) { return 0.5; }, [](const Vec&) { return 0.4; }};
  CHECK_THROWS_AS(globalize(atlas, pieces, bad, al, rng), Error);
  const std::vector<ScalarFn> leaky = {[](const Vec&) { return 1.0; }, [](const Vec&) { return 0.0; }};
  CHECK_THROWS_AS(globalize(atlas, pieces, leaky, al, rng), Error);
}
