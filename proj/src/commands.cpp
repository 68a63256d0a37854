#include "carnot/commands.hpp"

#include "carnot/approximation.hpp"
#include "carnot/fixtures.hpp"
#include "carnot/group_file.hpp"
#include "carnot/manifold_symbol.hpp"
#include "carnot/spectral.hpp"
#include "carnot/symbol_file.hpp"

#include <algorithm>
#include <iostream>
#include <set>

namespace carnot {

namespace {

using SectionFn = Section (*)(const RunConfig&);

double tol_or(const RunConfig& c, double fallback) { return c.tol > 0.0 ? c.tol : fallback; }

std::string arg_or(const RunConfig& c, const std::string& fallback) {
  if (!c.args.empty()) return c.args[0];
  if (!c.group.empty()) return c.group;
  return fallback;
}

std::string group_or(const RunConfig& c, const std::string& fallback) {
  return c.group.empty() ? fallback : c.group;
}

std::shared_ptr<const Group> load(const std::string& name) {
  return std::make_shared<const Group>(load_group(fixture_path(name)));
}

Json base_inputs(const RunConfig& c) { return {{"seed", c.seed}, {"tol", c.tol}}; }

// Runs body and turns any exception into a FAIL entry of the section.
template <class F>
void guarded(Section& s, const std::string& name, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    s.error(name, "plumbing", e);
  }
}

// ---- verify-group ------------------------------------------------------

Section verify_group(const RunConfig& c) {
  const std::string file = arg_or(c, "heisenberg1.grp");
  Json in = base_inputs(c);
  in["group"] = file;
  Section s("verify-group", in);
  guarded(s, "load_group", [&] {
    const RawAlgebra raw = parse_group_file(fixture_path(file));
    const auto violations = StratifiedAlgebra::check(raw);
    Json v = Json::array();
    for (const auto& x : violations) v.push_back({{"kind", x.kind}, {"detail", x.detail}});
    s.holds("algebra_axioms", "stratified algebra axioms", violations.empty(), {{"violations", v}});
    if (!violations.empty()) return;
    const StratifiedAlgebra alg = StratifiedAlgebra::validate(raw);
    s.info("homogeneous_dimension", "homogeneous dimension", alg.homogeneous_dimension(),
           {{"dimension", alg.dim()}, {"strata", alg.strata()}, {"step", alg.step()}});

    Rng rng(c.seed);
    double assoc = 0.0, inverse = 0.0, dil = 0.0;
    for (int i = 0; i < 200; ++i) {
      const Vec x = random_point(alg, rng), y = random_point(alg, rng), z = random_point(alg, rng);
      const Vec l = bch_multiply(alg, bch_multiply(alg, x, y), z);
      const Vec r = bch_multiply(alg, x, bch_multiply(alg, y, z));
      assoc = std::max(assoc, (l - r).norm() / (1.0 + l.norm()));
      inverse = std::max(inverse, bch_multiply(alg, x, group_inverse(x)).norm());
      const double t = uniform(rng, 0.25, 4.0);
      const Vec a = dilate(alg, t, bch_multiply(alg, x, y));
      const Vec b = bch_multiply(alg, dilate(alg, t, x), dilate(alg, t, y));
      dil = std::max(dil, (a - b).norm() / (1.0 + a.norm()));
    }
    s.at_most("bch_associativity", "group law associativity", assoc, tol_or(c, 1e-10), {{"triples", 200}});
    s.at_most("bch_inverse", "inverse is negation", inverse, 1e-12, {{"points", 200}});
    s.at_most("dilation_homomorphism", "dilations are automorphisms", dil, 1e-10, {{"pairs", 200}});
    const A0Estimate a0 = estimate_A0(alg, 2000, rng);
    s.info("quasi_triangle_constant", "homogeneous norm quasi-triangle constant", a0.value,
           {{"samples", a0.samples}});
  });
  return s;
}

// ---- fields --------------------------------------------------------------

// Mixes every coordinate at several weighted degrees.
Polynomial test_polynomial(int d) {
  Polynomial f(d);
  for (int i = 0; i < d; ++i) {
    Polynomial::Exponents e(d, 0);
    e[i] = 2;
    f.add_term(e, 0.5 + i);
    e[i] = 1;
    e[(i + 1) % d] += 1;
    f.add_term(e, i % 2 ? -1.0 : 1.0);
  }
  Polynomial::Exponents e(d, 0);
  e[0] = 1;
  e[d - 1] += 2;
  f.add_term(e, 0.25);
  return f;
}

Section fields(const RunConfig& c) {
  const std::string file = arg_or(c, "heisenberg1.grp");
  Json in = base_inputs(c);
  in["group"] = file;
  Section s("fields", in);
  guarded(s, "derive_fields", [&] {
    const auto g = load(file);
    const auto& alg = g->alg();
    Json listing = Json::array();
    for (const auto& Z : g->fields()) {
      std::string t;
      for (int m = 0; m < g->dim(); ++m)
        if (!Z.coeffs[m].is_zero())
          t += (t.empty() ? "" : " + ") + ("(" + Z.coeffs[m].str() + ") d/dx" + std::to_string(m + 1));
      listing.push_back("Z" + std::to_string(Z.index + 1) + " = " + t);
    }
    const HomogeneityAudit h = audit_homogeneity(alg, g->fields());
    s.holds("coefficient_homogeneity", "homogeneous field coefficients", h.ok,
            {{"slots", h.slots}, {"failures", h.failures}, {"fields", listing}});
    s.at_most("bracket_closure", "field brackets follow the structure constants",
              bracket_closure_residual(alg, g->fields()), tol_or(c, 1e-12));
    Rng rng(c.seed);
    const Polynomial f = test_polynomial(g->dim());
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const Vec a = random_point(alg, rng), x = random_point(alg, rng);
      worst = std::max(worst, left_invariance_residual(*g, f, a, x));
    }
    s.at_most("left_invariance", "fields commute with left translations", worst, 1e-10,
              {{"points", 200}, {"test_function", f.str()}});
  });
  return s;
}

// ---- check-diffeo --------------------------------------------------------

double admissibility_residual(const Group& g, const SmoothMap& phi, const std::vector<Vec>& pts) {
  double worst = 0.0;
  for (const auto& x : pts) {
    const AutomorphismCheck a = check_strata_automorphism(g.alg(), admissibility_matrix(g, phi, x));
    if (!a.ok) return INFINITY;
    worst = std::max({worst, a.block_residual, a.bracket_residual});
  }
  return worst;
}

Section check_diffeo(const RunConfig& c) {
  const std::string file = group_or(c, "heisenberg1.grp");
  Json in = base_inputs(c);
  in["group"] = file;
  in["map"] = c.map.empty() ? Json("corpus") : Json(c.map);
  Section s("check-diffeo", in);
  guarded(s, "check_diffeo", [&] {
    const auto g = load(file);
    std::vector<LabeledMap> maps;
    const bool corpus = c.map.empty();
    if (corpus) {
      if (g->dim() != 3 || g->n1() != 2) fail("BadConfig", "the built-in map corpus lives on heisenberg1.grp");
      maps = diffeo_corpus(g->alg());
    } else {
      maps.push_back({parse_map_spec(g->alg(), c.map).renamed(c.map), false});
    }
    Rng rng(c.seed);
    const auto pts = sample_points(*g, rng, 100);
    const double tol = tol_or(c, 1e-7);
    std::vector<const SmoothMap*> certified;
    int disagreements = 0;
    for (const auto& m : maps) {
      const DiffeoReport r = check_G_diffeomorphism(*g, m.map, pts, tol);
      const Json d = {{"pushforward_residual", r.residual_pushforward},
                      {"subspace_residual", r.residual_subspace},
                      {"samples", r.samples},
                      {"criterion_tol", tol}};
      disagreements += !r.agree();
      s.holds("criteria_agree[" + m.map.name() + "]", "two characterizations of G-diffeomorphisms", r.agree(), d);
      s.info("g_diffeo[" + m.map.name() + "]", "G-diffeomorphism verdict", r.pass() ? 1.0 : 0.0, d);
      if (corpus)
        s.holds("expected_verdict[" + m.map.name() + "]", "plumbing", r.pass() == m.g_diffeo,
                {{"expected", m.g_diffeo}});
      if (r.pass()) {
        certified.push_back(&m.map);
        const std::vector<Vec> few(pts.begin(), pts.begin() + 20);
        s.at_most("admissibility[" + m.map.name() + "]", "admissibility matrix is a strata automorphism",
                  admissibility_residual(*g, m.map, few), 1e-10, {{"points", 20}});
      }
    }
    if (corpus) {
      s.holds("corpus_disagreements", "two characterizations of G-diffeomorphisms", disagreements == 0,
              {{"maps", maps.size()}, {"disagreements", disagreements}});
      // H^{phi o psi}(x) = H^phi(psi x) H^psi(x) over ordered pairs.
      double chain = 0.0;
      int pairs = 0;
      for (const SmoothMap* a : certified)
        for (const SmoothMap* b : certified) {
          if (a == b) continue;
          const SmoothMap ab = a->compose(*b);
          for (int i = 0; i < 5; ++i) {
            const Vec& x = pts[i];
            const Mat lhs = admissibility_matrix(*g, ab, x);
            const Mat rhs = admissibility_matrix(*g, *a, (*b)(x)) * admissibility_matrix(*g, *b, x);
            chain = std::max(chain, (lhs - rhs).norm() / (1.0 + rhs.norm()));
          }
          ++pairs;
        }
      s.at_most("h_chain_rule", "chain rule for admissibility matrices", chain, 1e-8, {{"pairs", pairs}});
    }
  });
  return s;
}

// ---- check-atlas ---------------------------------------------------------

Section check_atlas(const RunConfig& c) {
  const std::string file = c.args.empty() ? "two_chart.atlas" : c.args[0];
  Json in = base_inputs(c);
  in["atlas"] = file;
  Section s("check-atlas", in);
  guarded(s, "check_atlas", [&] {
    const ChartAtlas atlas = parse_atlas_file(fixture_path(file));
    Rng rng(c.seed);
    const double tol = tol_or(c, 1e-8);
    const AtlasReport r = verify_atlas(atlas, 200, rng, tol);
    for (const auto& t : r.transitions) {
      const std::string name = atlas.charts()[t.i].name + "->" + atlas.charts()[t.j].name;
      s.holds("transition[" + name + "]", "transitions are G-diffeomorphisms", t.diffeo.pass(),
              {{"pushforward_residual", t.diffeo.residual_pushforward},
               {"subspace_residual", t.diffeo.residual_subspace}});
    }
    s.at_most("pairwise_cocycle", "pairwise cocycle of admissibility matrices", r.pairwise_residual, tol,
              {{"samples", r.pairwise_samples}});
    if (r.triples > 0)
      s.at_most("triple_cocycle", "triple cocycle of admissibility matrices", r.triple_residual, tol,
                {{"samples", r.triple_samples}, {"triples", r.triples}});
    else
      s.info("triple_cocycle", "triple cocycle of admissibility matrices", 0.0, {{"triples", 0}});
    s.holds("atlas_audit", "plumbing", r.pass(), {{"failures", r.failures}});
  });
  return s;
}

// ---- covering ------------------------------------------------------------

Section covering(const RunConfig& c) {
  const std::string file = group_or(c, "heisenberg1.grp");
  const double eps = c.eps > 0 ? c.eps : 0.5, L = c.extent > 0 ? c.extent : 2.0;
  Json in = base_inputs(c);
  in["group"] = file;
  in["eps"] = eps;
  in["extent"] = L;
  Section s("covering", in);
  guarded(s, "covering", [&] {
    const auto g = load(file);
    const auto cov = CoveringSystem::build(g, eps, Box::cube(g->dim(), L));
    Rng rng(c.seed);
    const int samples = 10000;
    double worst = 0.0;
    int most = 0;
    for (int i = 0; i < samples; ++i) {
      const auto e = cov.eta(cov.extent().sample(rng));
      double sum = 0.0;
      for (const auto& [k, v] : e) sum += v * v;
      worst = std::max(worst, std::abs(sum - 1.0));
      most = std::max(most, static_cast<int>(e.size()));
    }
    s.at_most("partition_of_squares", "partition of unity of squares", worst, tol_or(c, 1e-12),
              {{"samples", samples}, {"max_overlapping_bumps", most}});
    const MultiplicityAudit m = cov.multiplicity({1.0, 2.0, 4.0}, 2000, rng);
    double ratio = 0.0;
    for (size_t i = 0; i < m.C.size(); ++i)
      ratio = std::max(ratio, m.multiplicity[i] / std::pow(m.M * m.C[i], m.Q));
    s.at_most("multiplicity_bound", "bounded covering multiplicity", ratio, 1.0 + 1e-12,
              {{"C", m.C}, {"multiplicity", m.multiplicity}, {"M", m.M}, {"Q", m.Q}, {"samples", m.samples}});
    s.holds("multiplicity_monotone", "bounded covering multiplicity", m.monotone);
    s.info("multiplicity_constant", "bounded covering multiplicity", m.M);
  });
  return s;
}

// ---- riesz -----------------------------------------------------------------

std::vector<MatrixField> riesz_corpus(int n1) {
  if (n1 == 2) return norm_bound_corpus();
  MatrixField diag;
  diag.name = "diagonal";
  diag.n1 = n1;
  diag.eval = [n1](const Vec& x) {
    Mat m = Mat::Identity(n1, n1);
    for (int i = 0; i < n1; ++i) m(i, i) += 0.3 * std::sin(x(i) + i);
    return m;
  };
  return {MatrixField::constant(Mat::Identity(n1, n1), "identity"),
          MatrixField::constant(2.0 * Mat::Identity(n1, n1), "2 Id"), diag};
}

Section riesz(const RunConfig& c) {
  const std::string file = group_or(c, "heisenberg1.grp");
  const int N = c.grid > 0 ? c.grid : 7;
  const double L = c.extent > 0 ? c.extent : 2.0;
  Json in = base_inputs(c);
  in["group"] = file;
  in["grid"] = N;
  in["extent"] = L;
  in["cap"] = c.cap;
  Section s("riesz", in);
  guarded(s, "riesz", [&] {
    const auto g = load(file);
    const Lattice lat(g, N, L, c.cap);
    const LaplacianContext ctx(lat);
    const OperatorAudit a = audit_operator(ctx.delta);
    s.at_most("laplacian_symmetry", "sub-Laplacian is self-adjoint", a.symmetry_error, 1e-12);
    s.at_least("laplacian_psd", "sub-Laplacian is nonnegative", a.lambda_min, -1e-10,
               {{"lambda_max", a.lambda_max}, {"unknowns", lat.n()}});
    const double proj_tol = tol_or(c, 1e-8);
    for (const auto& w : riesz_corpus(g->n1())) {
      const NormBoundResult r = verify_norm_bounds(lat, ctx, w);
      const std::string tag = "[" + w.name + "]";
      s.at_most("half_power_bound" + tag, "sub-Laplacian comparison, half power", r.half_norm,
                r.half_bound * (1.0 + 1e-8));
      s.at_most("quarter_power_bound" + tag, "sub-Laplacian comparison, quarter power", r.quarter_norm,
                r.quarter_bound * (1.0 + 1e-8));
      s.at_least("twisted_laplacian_psd" + tag, "twisted sub-Laplacian is nonnegative", r.lw_lambda_min, -1e-10,
                 {{"symmetry_error", r.lw_symmetry}});
      s.at_most("riesz_projection" + tag, "quasi-Riesz transforms resolve the identity", r.projection_residual,
                proj_tol, {{"riesz_norm", r.riesz_norm}});
    }
    // Quadrature against the eigendecomposition on a variable field.
    const auto corpus = riesz_corpus(g->n1());
    const Mat Lw = Mat(lat.twisted_laplacian(corpus.back()));
    InvSqrtInfo info;
    const Mat q = inv_sqrt(Lw, &info);
    const Mat e = inv_sqrt_eig(Lw);
    s.at_most("inv_sqrt_quadrature", "inverse square root by quadrature", (q - e).norm() / e.norm(), 1e-6,
              {{"nodes", info.nodes}, {"lambda_min", info.lambda_min}, {"lambda_max", info.lambda_max}});
    const ModulusRatio mr = modulus_ratio(lat, ctx, [](const Vec& x) { return std::exp(-x.squaredNorm()); });
    s.info("multiplier_modulus_ratio", "multiplier bound by sup and Sobolev norms", mr.ratio,
           {{"lhs", mr.lhs}, {"sobolev", mr.sobolev}, {"sup", mr.sup}});
  });
  return s;
}

// ---- heat ------------------------------------------------------------------

Section heat(const RunConfig& c) {
  const std::string file = group_or(c, "abelian2.grp");
  const int N = c.grid > 0 ? c.grid : 64;
  const double L = c.extent > 0 ? c.extent : 3.2;
  Json in = base_inputs(c);
  in["group"] = file;
  in["grid"] = N;
  in["extent"] = L;
  in["cap"] = c.cap;
  Section s("heat", in);
  guarded(s, "heat", [&] {
    const auto g = load(file);
    const Lattice lat(g, N, L, c.cap);
    const bool abelian = g->alg().step() == 1;
    const int Q = g->alg().homogeneous_dimension();
    std::vector<double> centre;
    for (double t : {0.05, 0.1, 0.2}) {
      const HeatResult h = heat_profile(lat, t);
      centre.push_back(h.centre_scaled);
      const Json d = {{"t", t}, {"boundary_mass", h.boundary}, {"centre_scaled", h.centre_scaled}};
      if (abelian)
        s.at_most("gaussian_comparison[t=" + std::to_string(t).substr(0, 4) + "]", "heat kernel of the Laplacian",
                  h.gaussian_error, tol_or(c, 2e-2), d);
      else
        s.info("heat_profile[t=" + std::to_string(t).substr(0, 4) + "]", "heat kernel of the sub-Laplacian",
               h.centre_scaled, d);
    }
    const auto [lo, hi] = std::minmax_element(centre.begin(), centre.end());
    double mean = 0.0;
    for (double v : centre) mean += v / centre.size();
    s.at_most("centre_scaling", "heat kernel scaling h_t(0) t^{Q/2}", (*hi - *lo) / mean, 3e-2,
              {{"values", centre}, {"Q", Q}});
    const int n1 = g->n1();
    std::vector<std::pair<std::string, Mat>> blocks;
    Mat d1 = Mat::Identity(n1, n1), s1 = Mat::Identity(n1, n1);
    d1(0, 0) = 1.25;
    if (n1 > 1) {
      d1(1, 1) = 0.8;
      s1(0, 1) = 0.3;
    }
    blocks.emplace_back("diagonal", d1);
    if (n1 > 1) blocks.emplace_back("shear", s1);
    for (const auto& [name, B] : blocks) {
      const Mat A = extend_first_block(g->alg(), B);
      const double err = heat_automorphism_error(lat, A, 0.1);
      if (abelian)
        s.at_most("automorphism_identity[" + name + "]", "heat semigroup under strata automorphisms", err, 5e-2,
                  {{"t", 0.1}});
      else
        s.info("automorphism_identity[" + name + "]", "heat semigroup under strata automorphisms", err,
               {{"t", 0.1}, {"note", "tolerance calibrated on abelian grids only"}});
    }
  });
  return s;
}

// ---- approx ----------------------------------------------------------------

Section approx(const RunConfig& c) {
  const std::string file = group_or(c, "heisenberg1.grp");
  const int N = c.grid > 0 ? c.grid : 7;
  const double L = c.extent > 0 ? c.extent : 1.5;
  Json in = base_inputs(c);
  in["group"] = file;
  in["grid"] = N;
  in["extent"] = L;
  in["eps"] = c.eps;
  in["cap"] = c.cap;
  Section s("approx", in);
  guarded(s, "approx", [&] {
    const auto g = load(file);
    if (g->n1() < 2) fail("BadConfig", "the approximation field needs a first stratum of dimension >= 2");
    const MatrixField a = bump_perturbation(g);
    Rng frng(c.seed);
    const FieldConstants fc = field_constants(*g, a, 400, frng);
    s.info("field_constants", "mean value constant of the field", fc.C_w,
           {{"w1inf", fc.w1inf}, {"C", fc.C}, {"sup_w", fc.sup_w}, {"sup_inv", fc.sup_inv}, {"eps_w", fc.eps_w}});
    std::vector<double> ladder;
    if (c.eps > 0) ladder = {c.eps};
    else ladder = {fc.eps_w / 2, fc.eps_w / 4};
    const Lattice lat(g, N, L, c.cap);
    Rng rng(c.seed + 1);
    std::vector<double> deviation;
    const double tol = tol_or(c, 1e-12);
    for (double eps : ladder) {
      const std::string tag = "[eps=" + std::to_string(eps).substr(0, 6) + "]";
      const ApproximationReport r = approximation_family(lat, a, eps, fc, rng);
      const Json d = {{"eps", eps}, {"centers", r.centers}, {"evaluations", r.evaluations}};
      s.at_most("agrees_near_center" + tag, "local constant approximation, agreement", r.agree_residual, tol, d);
      s.at_most("constant_far_away" + tag, "local constant approximation, constancy", r.constant_residual, tol, d);
      s.at_most("deviation_bound" + tag, "local constant approximation, deviation", r.sup_deviation,
                r.deviation_bound, d);
      s.at_most("norm_bound" + tag, "local constant approximation, norms", r.sup_approx, r.bound_approx);
      s.at_most("inverse_norm_bound" + tag, "local constant approximation, norms", r.sup_approx_inv,
                r.bound_approx_inv);
      s.info("sobolev_proxy" + tag, "local constant approximation, Sobolev seminorm", r.sobolev_proxy);
      const PatchedSums p = patched_riesz_sums(lat, a, eps, 0, fc);
      deviation.push_back(p.deviation);
      s.info("patched_deviation" + tag, "patched quasi-Riesz sums", p.deviation,
             {{"centers", p.centers}, {"active", p.active}});
    }
    bool nonincreasing = true;
    for (size_t i = 1; i < deviation.size(); ++i) nonincreasing = nonincreasing && deviation[i] <= deviation[i - 1];
    s.holds("patched_deviation_nonincreasing", "patched quasi-Riesz sums", nonincreasing,
            {{"eps", ladder}, {"deviation", deviation}});
  });
  return s;
}

// ---- symbol ----------------------------------------------------------------

Json cplx_json(cplx z) { return Json::array({z.real(), z.imag()}); }

Json symbol_json(const SymbolExpr& e) {
  Json out = Json::array();
  for (const auto& [k, z] : e.terms())
    out.push_back({{"coef", cplx_json(z)}, {"scalars", k.scalars}, {"riesz", word_str(k.riesz)}});
  return out;
}

Json element_json(const FormalElement& e) {
  Json out = Json::array();
  for (const auto& [w, z] : e.terms()) out.push_back({{"coef", cplx_json(z)}, {"word", word_str(w)}});
  return out;
}

std::vector<Letter> letters_of(const std::vector<std::pair<std::string, FormalElement>>& exprs) {
  std::set<Letter> seen;
  for (const auto& [n, e] : exprs)
    for (const auto& [w, z] : e.terms()) seen.insert(w.begin(), w.end());
  return {seen.begin(), seen.end()};
}

Section symbol_cmd(const RunConfig& c) {
  const std::string file = c.args.empty() ? "symbols.sym" : c.args[0];
  Json in = base_inputs(c);
  in["symbols"] = file;
  Section s("symbol", in);
  guarded(s, "symbol", [&] {
    const SymbolFile sf = parse_symbol_file(fixture_path(file));
    Alphabet& alph = *sf.alphabet;
    bool adj_ok = true, lift_ok = true, mult_ok = true;
    for (const auto& [name, e] : sf.exprs) {
      const SymbolExpr sym = symbol(e);
      s.info("symbol[" + name + "]", "principal symbol", static_cast<double>(sym.terms().size()),
             {{"element", element_json(e)}, {"symbol", symbol_json(sym)}, {"in_kernel", kernel_test(e)}});
      adj_ok = adj_ok && symbol(e.adjoint()) == sym.adjoint();
      lift_ok = lift_ok && symbol(lift(sym)) == sym;
      for (const auto& [n2, f] : sf.exprs) mult_ok = mult_ok && symbol(e * f) == sym * symbol(f);
    }
    s.holds("file_star_compatible", "symbol is a *-homomorphism", adj_ok, {{"exprs", sf.exprs.size()}});
    s.holds("file_multiplicative", "symbol is a *-homomorphism", mult_ok);
    s.holds("file_lift", "symbol is onto", lift_ok);

    Rng rng(c.seed);
    const auto letters = letters_of(sf.exprs);
    int bad_add = 0, bad_mul = 0, bad_adj = 0, bad_lift = 0, bad_kernel = 0;
    const int trials = 200;
    for (int i = 0; i < trials; ++i) {
      const FormalElement a = random_element(letters, 4, 6, rng), b = random_element(letters, 4, 6, rng);
      bad_add += !(symbol(a + b) == symbol(a) + symbol(b));
      bad_mul += !(symbol(a * b) == symbol(a) * symbol(b));
      bad_adj += !(symbol(a.adjoint()) == symbol(a).adjoint());
      bad_lift += !(symbol(lift(symbol(a))) == symbol(a));
      // a - lift(symbol(a)) carries no symbol.
      bad_kernel += !kernel_test(a - lift(symbol(a)));
    }
    const Json d = {{"trials", trials}, {"letters", letters.size()}};
    s.at_most("random_additive", "symbol is a *-homomorphism", bad_add, 0.0, d);
    s.at_most("random_multiplicative", "symbol is a *-homomorphism", bad_mul, 0.0, d);
    s.at_most("random_star", "symbol is a *-homomorphism", bad_adj, 0.0, d);
    s.at_most("random_lift", "symbol is onto", bad_lift, 0.0, d);
    s.at_most("random_kernel", "kernel of the symbol", bad_kernel, 0.0, d);

    // Equivariance: conjugation by phi o psi against conjugation in two steps.
    const Group& g = alph.group();
    Rng prng(c.seed + 7);
    const auto pts = sample_points(g, prng, 40);
    const auto phi = CertifiedDiffeo::certify(g, parse_map_spec(g.alg(), "automorphism 2 1 0 | 0 1 0 | 0 0 2"), pts);
    const auto psi = CertifiedDiffeo::certify(g, parse_map_spec(g.alg(), "translation 0.3 -0.2 0.1"), pts);
    const auto both = phi.compose(psi);
    double eq = 0.0, letter_route = 0.0, weight = 0.0;
    for (const auto& [name, e] : sf.exprs) {
      if (name != "sandwich" && name != "mixed") continue;
      const SymbolSection one = conjugate_by_diffeo(e, alph, both);
      const SymbolSection two = transport(conjugate_by_diffeo(e, alph, psi), phi);
      const FormalElement stepwise =
          conjugate_element(conjugate_element(e, alph, psi, "psi"), alph, phi, "phi");
      const SymbolSection via_letters = section(symbol(stepwise), alph);
      for (int i = 0; i < 10; ++i) {
        const Vec y = both(pts[i]);
        weight = std::max(weight, one(y).weight());
        eq = std::max(eq, fiber_distance(one(y), two(y)));
        letter_route = std::max(letter_route, fiber_distance(one(y), via_letters(y)));
      }
    }
    s.at_most("equivariance_composition", "symbol equivariance under G-diffeomorphisms", eq, 1e-10,
              {{"max_weight", weight}});
    s.at_most("equivariance_letters", "symbol equivariance under G-diffeomorphisms", letter_route, 1e-10,
              {{"max_weight", weight}});
    s.at_least("equivariance_nontrivial", "plumbing", weight, 1e-3);

    // Globalize over the two-chart atlas.
    const auto atlas = std::make_shared<const ChartAtlas>(parse_atlas_file(fixture_path("two_chart.atlas")));
    Alphabet& ga = alph;
    ga.add_function("u1bump", box_bump((Vec(3) << -0.5, 0, 0).finished(), 1.0),
                    Box{(Vec(3) << -1.5, -1, -1).finished(), (Vec(3) << 0.5, 1, 1).finished()});
    ga.add_function("u2bump", box_bump((Vec(3) << 1.5, 0.5, 0).finished(), 0.8),
                    Box{(Vec(3) << 0.7, -0.3, -0.8).finished(), (Vec(3) << 2.3, 1.3, 0.8).finished()});
    auto word = [](std::vector<Letter> w, cplx z = 1.0) { return FormalElement::word(std::move(w), z); };
    const Letter m1 = Letter::mult("u1bump"), m2 = Letter::mult("u2bump");
    const std::vector<ChartElement> pieces = {
        {0, word({m1, Letter::riesz(0, "A"), m1}) + word({m1, Letter::compact(), m1}, 3.0)},
        {1, word({m2, Letter::riesz(1, "B"), Letter::riesz_adj(0, "A"), m2}, cplx(0.5, -1.0))},
    };
    const std::vector<ScalarFn> partition = {
        [](const Vec& p) { return smooth_cutoff(p(0), -0.5, 1.5); },
        [](const Vec& p) { return 1.0 - smooth_cutoff(p(0), -0.5, 1.5); },
    };
    Rng grng(c.seed + 11);
    const BundleSection sec = globalize(atlas, pieces, partition, ga, grng);
    s.at_most("globalize_compatibility", "globalized symbol is a bundle section", sec.compatibility(100, grng),
              1e-12, {{"atlas", "two_chart.atlas"}});

    const auto echo = localization_echo(256, 8.0, [](double x) { return 1.5 + 0.5 * std::tanh(x); }, 0.3,
                                        {0.8, 0.4, 0.2});
    s.holds("localization_echo", "localized quasi-Riesz transform tends to the frozen one",
            echo[1] < echo[0] && echo[2] < echo[1], {{"eps", {0.8, 0.4, 0.2}}, {"deviation", echo}});
  });
  return s;
}

// ---- dispatch --------------------------------------------------------------

const std::vector<std::pair<std::string, SectionFn>>& table() {
  static const std::vector<std::pair<std::string, SectionFn>> t = {
      {"verify-group", verify_group}, {"fields", fields}, {"check-diffeo", check_diffeo},
      {"check-atlas", check_atlas},   {"covering", covering}, {"riesz", riesz},
      {"heat", heat},                 {"approx", approx},     {"symbol", symbol_cmd},
  };
  return t;
}

SectionFn lookup(const std::string& name) {
  for (const auto& [n, f] : table())
    if (n == name) return f;
  return nullptr;
}

void report_all(const RunConfig& c, Report& r) {
  RunConfig base;
  base.seed = c.seed;
  base.cap = c.cap;
  auto with = [&](std::vector<std::string> args, std::string group = {}) {
    RunConfig x = base;
    x.args = std::move(args);
    x.group = std::move(group);
    return x;
  };
  for (const char* grp : {"heisenberg1.grp", "engel.grp", "abelian2.grp"}) r.add(verify_group(with({grp})));
  for (const char* grp : {"heisenberg1.grp", "engel.grp"}) r.add(fields(with({grp})));
  r.add(check_diffeo(with({})));
  for (const char* at : {"two_chart.atlas", "three_chart.atlas", "shear_chart.atlas"}) r.add(check_atlas(with({at})));
  r.add(covering(with({})));
  r.add(riesz(with({})));
  r.add(heat(with({})));
  r.add(approx(with({})));
  r.add(symbol_cmd(with({})));
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [n, f] : table()) v.push_back(n);
    v.push_back("report");
    return v;
  }();
  return names;
}

void validate_config(const RunConfig& c) {
  const auto& names = subcommands();
  if (std::find(names.begin(), names.end(), c.command) == names.end())
    fail("BadConfig", "unknown subcommand '" + c.command + "'");
  if (c.tol < 0.0 || std::isnan(c.tol)) fail("BadConfig", "tolerance must be positive");
  if (c.cap <= 0) fail("BadConfig", "cap must be positive");
  if (c.grid < 0 || (c.grid > 0 && c.grid < 3)) fail("BadConfig", "grid must be at least 3");
  if (c.extent < 0.0 || c.eps < 0.0) fail("BadConfig", "extent and eps must be positive");
  if (c.command == "report" && !c.all && c.args.empty())
    fail("BadConfig", "report needs --all or a list of subcommands");
}

RunResult run(const RunConfig& c) {
  validate_config(c);
  Report r(c.command, c.seed);
  if (c.command == "report") {
    if (c.all) {
      report_all(c, r);
    } else {
      for (const auto& name : c.args) {
        const SectionFn f = lookup(name);
        if (!f) fail("BadConfig", "unknown subcommand '" + name + "' in report");
        RunConfig x = c;
        x.command = name;
        x.args.clear();
        r.add(f(x));
      }
    }
  } else {
    r.add(lookup(c.command)(c));
  }
  const std::string text = r.to_json().dump(2) + "\n";
  if (!c.out.empty()) write_atomic(c.out, text);
  else std::cout << text;
  const int code = r.exit_code();
  return {std::move(r), code};
}

}  // namespace carnot
