#include "carnot/manifold_symbol.hpp"

#include <cmath>

namespace carnot {

namespace {

bool is_identity(const SmoothMap& h) {
  const auto& comps = h.polynomial_components();
  if (!comps) return false;
  for (int i = 0; i < static_cast<int>(comps->size()); ++i) {
    Polynomial d = (*comps)[i] - Polynomial::variable(h.dim(), i);
    d.prune();
    if (!d.is_zero()) return false;
  }
  return true;
}

bool box_inside(const Box& inner, const Box& outer) {
  return outer.contains(inner.lo) && outer.contains(inner.hi);
}

// First and last letters must be multipliers with declared supports.
void check_ends(const Word& w, const Alphabet& alph,
                const std::function<bool(const std::string&, const Box&)>& inside, const std::string& where) {
  auto ok = [&](const Letter& l) {
    if (l.kind != Letter::Kind::Mult) return false;
    const auto& s = alph.function(l.name).support;
    return s.has_value() && inside(l.name, *s);
  };
  if (w.empty() || !ok(w.front()) || !ok(w.back()))
    fail("SupportLeak", "word '" + word_str(w) + "' is not supported in " + where);
}

// Transfer of a scalar name through chart c: push (model -> group) or pull.
std::string transfer(const std::string& name, const Chart& c, bool push, Alphabet& alph) {
  if (is_identity(c.h)) return name;
  const std::string undo = std::string(push ? "<" : ">") + c.name;
  if (name.size() > undo.size() && name.compare(name.size() - undo.size(), undo.size(), undo) == 0)
    return name.substr(0, name.size() - undo.size());
  const std::string out = name + (push ? ">" : "<") + c.name;
  if (alph.has_function(out)) return out;
  const ScalarHandle h = alph.function(name);
  const SmoothMap m = push ? c.h.inverse() : c.h;
  std::optional<Box> supp;
  if (h.support) supp = sampled_image(push ? c.h : c.h.inverse(), *h.support);
  alph.add_function(out, [f = h.f, m](const Vec& x) { return f(m(x)); }, supp);
  return out;
}

FormalElement transfer_element(const FormalElement& e, const Chart& c, bool push, Alphabet& alph) {
  FormalElement r;
  for (const auto& [w, coef] : e.terms()) {
    Word v = w;
    for (auto& l : v)
      if (l.kind == Letter::Kind::Mult) l.name = transfer(l.name, c, push, alph);
    r.add(v, coef);
  }
  return r;
}

}  // namespace

FormalElement rest(const ChartAtlas& atlas, const ChartElement& t, Alphabet& alph) {
  const Chart& c = atlas.charts().at(t.chart);
  for (const auto& [w, coef] : t.e.terms())
    check_ends(w, alph, [&](const std::string&, const Box& b) { return box_inside(b, c.domain); },
               "chart " + c.name);
  return transfer_element(t.e, c, true, alph);
}

ChartElement ext(const ChartAtlas& atlas, int chart, const FormalElement& e, Alphabet& alph) {
  const Chart& c = atlas.charts().at(chart);
  const SmoothMap inv = c.h.inverse();
  // Names pushed through this chart are checked on their original support;
  // re-imaging the pushed bounding box would inflate it.
  const std::string pushed = ">" + c.name;
  auto inside = [&](const std::string& name, const Box& b) {
    if (name.size() > pushed.size() && name.compare(name.size() - pushed.size(), pushed.size(), pushed) == 0) {
      const auto& orig = alph.function(name.substr(0, name.size() - pushed.size())).support;
      if (orig) return box_inside(*orig, c.domain);
    }
    return box_inside(sampled_image(inv, b), c.domain);
  };
  for (const auto& [w, coef] : e.terms()) check_ends(w, alph, inside, "the image of chart " + c.name);
  return {chart, transfer_element(e, c, false, alph)};
}

SymbolSection local_symbol(const ChartAtlas& atlas, const ChartElement& t, Alphabet& alph) {
  const SymbolExpr s = symbol(rest(atlas, t, alph));
  const SmoothMap h = atlas.charts().at(t.chart).h;
  return [s, h, &alph](const Vec& p) { return evaluate(s, alph, h(p)); };
}

FiberElement transition_action(const ChartAtlas& atlas, int i, int j, const Vec& p, const FiberElement& f) {
  if (i == j || f.terms().empty()) return f;
  const Vec x = atlas.charts()[i].h(p);
  return f.acted(admissibility_matrix(atlas.group(), atlas.transition(i, j), x));
}

double BundleSection::compatibility(int samples, Rng& rng) const {
  double worst = 0.0;
  for (const auto& [a, b] : atlas_->overlaps())
    for (const auto& [i, j] : {std::pair{a, b}, std::pair{b, a}})
      for (const auto& p : atlas_->overlap_samples(i, j, -1, samples, rng))
        worst = std::max(worst, fiber_distance(F_[j](p), transition_action(*atlas_, i, j, p, F_[i](p))));
  return worst;
}

double BundleSection::norm_proxy(int samples, Rng& rng) const {
  double worst = 0.0;
  for (int i = 0; i < atlas_->size(); ++i)
    for (int s = 0; s < samples; ++s) worst = std::max(worst, F_[i](atlas_->charts()[i].domain.sample(rng)).weight());
  return worst;
}

BundleSection globalize(std::shared_ptr<const ChartAtlas> atlas, const std::vector<ChartElement>& pieces,
                        const std::vector<ScalarFn>& partition, Alphabet& alph, Rng& rng,
                        const GlobalizeOptions& opt) {
  const int n = atlas->size();
  if (static_cast<int>(partition.size()) != n) fail("PartitionGap", "one partition function per chart is required");
  for (int k = 0; k < n; ++k)
    for (int s = 0; s < opt.samples; ++s) {
      const Vec p = atlas->charts()[k].domain.sample(rng);
      double sum = 0.0;
      for (int l = 0; l < n; ++l) {
        const double v = partition[l](p);
        if (v != 0.0 && !atlas->charts()[l].domain.contains(p))
          fail("PartitionGap", "partition function " + std::to_string(l) + " is not subordinate to its chart");
        sum += v;
      }
      if (std::abs(sum - 1.0) > opt.partition_tol)
        fail("PartitionGap", "partition sums to " + std::to_string(sum) + " at a sample");
    }

  std::vector<SymbolSection> local;
  for (const auto& t : pieces) local.push_back(local_symbol(*atlas, t, alph));
  std::vector<int> home;
  for (const auto& t : pieces) home.push_back(t.chart);

  std::vector<SymbolSection> F;
  for (int j = 0; j < n; ++j)
    F.push_back([atlas, local, home, partition, j, n](const Vec& p) {
      FiberElement out;
      for (int k = 0; k < n; ++k) {
        const double phi = partition[k](p);
        if (phi == 0.0) continue;
        FiberElement in_k;
        for (size_t i = 0; i < local.size(); ++i) {
          if (!atlas->charts()[home[i]].domain.contains(p)) continue;
          in_k = in_k + transition_action(*atlas, home[i], k, p, local[i](p));
        }
        out = out + transition_action(*atlas, k, j, p, in_k).scaled(phi);
      }
      return out;
    });
  BundleSection section(atlas, std::move(F));
  const double r = section.compatibility(opt.samples / 4 + 1, rng);
  if (r > opt.compat_tol)
    fail("IncompatibleSection", "compatibility residual " + std::to_string(r));
  return section;
}

}  // namespace carnot
