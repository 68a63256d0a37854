#include "carnot/symbol.hpp"

#include "carnot/automorphism.hpp"

#include <algorithm>
#include <cmath>

namespace carnot {

Alphabet::Alphabet(std::shared_ptr<const Group> g) : g_(std::move(g)) {}

void Alphabet::add_function(const std::string& name, ScalarFn f, std::optional<Box> support) {
  functions_[name] = ScalarHandle{name, std::move(f), std::move(support)};
}

void Alphabet::add_automorphism(const std::string& name, const Mat& first_block) {
  if (first_block.rows() != g_->n1() || first_block.cols() != g_->n1())
    fail("NotAdmissible", "automorphism " + name + " needs an n1 x n1 first block");
  StrataAutomorphism::from_first_block(g_->alg(), first_block);
  autos_[name] = first_block;
}

void Alphabet::add_field(const std::string& name, MatFn a) {
  for (const auto& x : probes) {
    const Mat B = a(x);
    if (B.rows() != g_->n1() || B.cols() != g_->n1())
      fail("NotAdmissible", "field " + name + " needs n1 x n1 values");
    StrataAutomorphism::from_first_block(g_->alg(), B);
  }
  fields_[name] = std::move(a);
}

bool Alphabet::has_letter_matrix(const std::string& name) const {
  return autos_.count(name) > 0 || fields_.count(name) > 0;
}

const ScalarHandle& Alphabet::function(const std::string& name) const {
  auto it = functions_.find(name);
  if (it == functions_.end()) fail("UnknownName", "no scalar function named " + name);
  return it->second;
}

Mat Alphabet::letter_matrix(const std::string& name, const Vec& x) const {
  if (auto it = autos_.find(name); it != autos_.end()) return it->second;
  if (auto it = fields_.find(name); it != fields_.end()) return it->second(x);
  fail("UnknownName", "no automorphism named " + name);
}

Letter Letter::adjoint() const {
  switch (kind) {
    case Kind::Riesz: return riesz_adj(k, name);
    case Kind::RieszAdj: return riesz(k, name);
    default: return *this;
  }
}

std::string Letter::str() const {
  switch (kind) {
    case Kind::Mult: return name;
    case Kind::Riesz: return "R" + std::to_string(k + 1) + "[" + name + "]";
    case Kind::RieszAdj: return "R" + std::to_string(k + 1) + "*[" + name + "]";
    case Kind::Compact: return "K";
  }
  return "?";
}

std::string word_str(const Word& w) {
  if (w.empty()) return "1";
  std::string s;
  for (const auto& l : w) s += (s.empty() ? "" : " ") + l.str();
  return s;
}

// ---- formal elements ----

FormalElement FormalElement::word(Word w, cplx c) {
  FormalElement e;
  e.add(w, c);
  return e;
}

void FormalElement::add(const Word& w, cplx c) {
  if (c == 0.0) return;
  auto [it, fresh] = terms_.emplace(w, c);
  if (fresh) return;
  it->second += c;
  if (it->second == 0.0) terms_.erase(it);
}

FormalElement FormalElement::operator+(const FormalElement& o) const {
  FormalElement r = *this;
  for (const auto& [w, c] : o.terms_) r.add(w, c);
  return r;
}

FormalElement FormalElement::operator-(const FormalElement& o) const { return *this + o.scaled(-1.0); }

FormalElement FormalElement::operator*(const FormalElement& o) const {
  FormalElement r;
  for (const auto& [a, ca] : terms_)
    for (const auto& [b, cb] : o.terms_) {
      Word w = a;
      w.insert(w.end(), b.begin(), b.end());
      r.add(w, ca * cb);
    }
  return r;
}

FormalElement FormalElement::scaled(cplx c) const {
  FormalElement r;
  for (const auto& [w, v] : terms_) r.add(w, v * c);
  return r;
}

FormalElement FormalElement::adjoint() const {
  FormalElement r;
  for (const auto& [w, c] : terms_) {
    Word v;
    for (auto it = w.rbegin(); it != w.rend(); ++it) v.push_back(it->adjoint());
    r.add(v, std::conj(c));
  }
  return r;
}

// ---- symbols ----

SymbolExpr SymbolExpr::unit() { return term({}, 1.0); }

SymbolExpr SymbolExpr::term(SymbolKey key, cplx c) {
  SymbolExpr s;
  s.add(key, c);
  return s;
}

void SymbolExpr::add(const SymbolKey& key, cplx c) {
  if (c == 0.0) return;
  auto [it, fresh] = terms_.emplace(key, c);
  if (fresh) return;
  it->second += c;
  if (it->second == 0.0) terms_.erase(it);
}

SymbolExpr SymbolExpr::operator+(const SymbolExpr& o) const {
  SymbolExpr r = *this;
  for (const auto& [k, c] : o.terms_) r.add(k, c);
  return r;
}

SymbolExpr SymbolExpr::operator-(const SymbolExpr& o) const { return *this + o.scaled(-1.0); }

SymbolExpr SymbolExpr::operator*(const SymbolExpr& o) const {
  SymbolExpr r;
  for (const auto& [a, ca] : terms_)
    for (const auto& [b, cb] : o.terms_) {
      SymbolKey k;
      std::merge(a.scalars.begin(), a.scalars.end(), b.scalars.begin(), b.scalars.end(),
                 std::back_inserter(k.scalars));
      k.riesz = a.riesz;
      k.riesz.insert(k.riesz.end(), b.riesz.begin(), b.riesz.end());
      r.add(k, ca * cb);
    }
  return r;
}

SymbolExpr SymbolExpr::scaled(cplx c) const {
  SymbolExpr r;
  for (const auto& [k, v] : terms_) r.add(k, v * c);
  return r;
}

SymbolExpr SymbolExpr::adjoint() const {
  SymbolExpr r;
  for (const auto& [k, c] : terms_) {
    SymbolKey a{k.scalars, {}};
    for (auto it = k.riesz.rbegin(); it != k.riesz.rend(); ++it) a.riesz.push_back(it->adjoint());
    r.add(a, std::conj(c));
  }
  return r;
}

SymbolExpr symbol(const FormalElement& e) {
  SymbolExpr s;
  for (const auto& [w, c] : e.terms()) {
    SymbolKey key;
    bool compact = false;
    for (const auto& l : w) {
      if (l.kind == Letter::Kind::Compact) compact = true;
      else if (l.kind == Letter::Kind::Mult) key.scalars.push_back(l.name);
      else key.riesz.push_back(l);
    }
    if (compact) continue;
    std::sort(key.scalars.begin(), key.scalars.end());
    s.add(key, c);
  }
  return s;
}

FormalElement lift(const SymbolExpr& s) {
  FormalElement e;
  for (const auto& [k, c] : s.terms()) {
    Word w;
    const size_t n = std::max(k.scalars.size(), k.riesz.size());
    for (size_t i = 0; i < n; ++i) {
      if (i < k.scalars.size()) w.push_back(Letter::mult(k.scalars[i]));
      if (i < k.riesz.size()) w.push_back(k.riesz[i]);
    }
    e.add(w, c);
  }
  return e;
}

bool kernel_test(const FormalElement& e) { return symbol(e).is_zero(); }

bool probe_equal(const SymbolExpr& a, const SymbolExpr& b, const Alphabet& alph, double tol) {
  // Riesz word -> scalar part as a list of (monomial, coefficient).
  std::map<Word, std::vector<std::pair<const std::vector<std::string>*, cplx>>> parts;
  for (const auto& [k, c] : a.terms()) parts[k.riesz].emplace_back(&k.scalars, c);
  for (const auto& [k, c] : b.terms()) parts[k.riesz].emplace_back(&k.scalars, -c);
  for (const auto& [w, list] : parts)
    for (const auto& x : alph.probes) {
      cplx v = 0.0;
      double scale = 0.0;
      for (const auto& [mono, c] : list) {
        cplx t = c;
        for (const auto& f : *mono) t *= alph.function(f).f(x);
        v += t;
        scale += std::abs(t);
      }
      if (std::abs(v) > tol * std::max(1.0, scale)) return false;
    }
  return true;
}

FormalElement random_element(const std::vector<Letter>& letters, int terms, int max_len, Rng& rng) {
  FormalElement e;
  if (letters.empty()) return e;
  for (int t = 0; t < terms; ++t) {
    const int len = static_cast<int>(rng() % (max_len + 1));
    Word w;
    for (int i = 0; i < len; ++i) w.push_back(letters[rng() % letters.size()]);
    const double re = static_cast<double>(static_cast<int>(rng() % 7) - 3);
    const double im = static_cast<double>(static_cast<int>(rng() % 5) - 2);
    e.add(w, cplx(re, im));
  }
  return e;
}

// ---- fibers ----

namespace {

bool same_pattern(const FiberWord& a, const FiberWord& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i].k != b[i].k || a[i].adj != b[i].adj) return false;
  return true;
}

double letter_gap(const FiberWord& a, const FiberWord& b) {
  double g = 0.0;
  for (size_t i = 0; i < a.size(); ++i) g = std::max(g, (a[i].A - b[i].A).cwiseAbs().maxCoeff());
  return g;
}

}  // namespace

void FiberElement::add(const FiberWord& w, cplx c, double merge_tol) {
  if (c == 0.0) return;
  for (auto it = terms_.begin(); it != terms_.end(); ++it)
    if (same_pattern(it->first, w) && letter_gap(it->first, w) <= merge_tol) {
      it->second += c;
      if (it->second == 0.0) terms_.erase(it);
      return;
    }
  terms_.emplace_back(w, c);
}

bool FiberElement::is_zero(double tol) const {
  for (const auto& [w, c] : terms_)
    if (std::abs(c) > tol) return false;
  return true;
}

FiberElement FiberElement::operator+(const FiberElement& o) const {
  FiberElement r = *this;
  for (const auto& [w, c] : o.terms_) r.add(w, c);
  return r;
}

FiberElement FiberElement::scaled(cplx c) const {
  FiberElement r;
  for (const auto& [w, v] : terms_) r.add(w, v * c);
  return r;
}

FiberElement FiberElement::acted(const Mat& H) const {
  FiberElement r;
  for (auto [w, c] : terms_) {
    for (auto& l : w) l.A = H.topLeftCorner(l.A.rows(), l.A.rows()) * l.A;
    r.add(w, c);
  }
  return r;
}

double FiberElement::weight() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::abs(t.second);
  return s;
}

double fiber_distance(const FiberElement& a, const FiberElement& b) {
  std::vector<bool> used(b.terms().size(), false);
  double worst = 0.0;
  for (const auto& [w, c] : a.terms()) {
    int best = -1;
    double gap = 0.0;
    for (size_t j = 0; j < b.terms().size(); ++j) {
      if (used[j] || !same_pattern(w, b.terms()[j].first)) continue;
      const double g = letter_gap(w, b.terms()[j].first);
      if (best < 0 || g < gap) {
        best = static_cast<int>(j);
        gap = g;
      }
    }
    if (best < 0) {
      worst = std::max(worst, std::abs(c));
      continue;
    }
    used[best] = true;
    worst = std::max(worst, std::abs(c - b.terms()[best].second) + std::abs(c) * gap);
  }
  for (size_t j = 0; j < b.terms().size(); ++j)
    if (!used[j]) worst = std::max(worst, std::abs(b.terms()[j].second));
  return worst;
}

FiberElement evaluate(const SymbolExpr& s, const Alphabet& alph, const Vec& x) {
  FiberElement r;
  for (const auto& [k, c] : s.terms()) {
    cplx v = c;
    for (const auto& f : k.scalars) v *= alph.function(f).f(x);
    FiberWord w;
    for (const auto& l : k.riesz)
      w.push_back({l.k, l.kind == Letter::Kind::RieszAdj, alph.letter_matrix(l.name, x)});
    r.add(w, v);
  }
  return r;
}

SymbolSection section(const SymbolExpr& s, const Alphabet& alph) {
  return [s, &alph](const Vec& x) { return evaluate(s, alph, x); };
}

SymbolSection symbol_of_sandwich(const Alphabet& alph, const std::string& psi, const std::string& a, int k) {
  const ScalarFn f = alph.function(psi).f;
  if (!alph.has_letter_matrix(a)) fail("UnknownName", "no automorphism named " + a);
  return [f, a, k, &alph](const Vec& x) {
    FiberElement r;
    const double p = f(x);
    r.add({FiberLetter{k, false, alph.letter_matrix(a, x)}}, p * p);
    return r;
  };
}

SymbolSection transport(const SymbolSection& s, const CertifiedDiffeo& phi) {
  return [s, phi](const Vec& y) {
    const Vec x = phi.inverse(y);
    return s(x).acted(phi.H(x));
  };
}

Box sampled_image(const SmoothMap& phi, const Box& b) {
  const int d = b.dim();
  Box out{Vec::Constant(d, INFINITY), Vec::Constant(d, -INFINITY)};
  std::vector<int> idx(d, 0);
  while (true) {
    Vec x(d);
    for (int i = 0; i < d; ++i) x(i) = b.lo(i) + (b.hi(i) - b.lo(i)) * idx[i] / 4.0;
    const Vec y = phi(x);
    out.lo = out.lo.cwiseMin(y);
    out.hi = out.hi.cwiseMax(y);
    int i = 0;
    while (i < d && ++idx[i] == 5) idx[i++] = 0;
    if (i == d) break;
  }
  return out;
}

SymbolSection conjugate_by_diffeo(const FormalElement& e, const Alphabet& alph, const CertifiedDiffeo& phi) {
  for (const auto& [w, c] : e.terms()) {
    bool compact = false, supported = false;
    for (const auto& l : w) {
      compact = compact || l.kind == Letter::Kind::Compact;
      supported = supported || (l.kind == Letter::Kind::Mult && alph.function(l.name).support.has_value());
    }
    if (!compact && !supported)
      fail("UnsupportedElement", "word '" + word_str(w) + "' has no compactly supported multiplier");
  }
  return transport(section(symbol(e), alph), phi);
}

FormalElement conjugate_element(const FormalElement& e, Alphabet& alph, const CertifiedDiffeo& phi,
                                const std::string& tag) {
  FormalElement r;
  for (const auto& [w, c] : e.terms()) {
    Word v;
    for (const auto& l : w) {
      Letter m = l;
      if (l.kind == Letter::Kind::Mult) {
        m.name = l.name + "~" + tag;
        if (!alph.has_function(m.name)) {
          const ScalarHandle h = alph.function(l.name);
          std::optional<Box> supp;
          if (h.support) supp = sampled_image(phi.map(), *h.support);
          alph.add_function(m.name, [f = h.f, phi](const Vec& y) { return f(phi.inverse(y)); }, supp);
        }
      } else if (l.kind != Letter::Kind::Compact) {
        m.name = tag + "." + l.name;
        if (!alph.has_letter_matrix(m.name)) {
          const int n1 = alph.group().n1();
          const std::string base = l.name;
          alph.add_field(m.name, [&alph, phi, base, n1](const Vec& y) {
            const Vec x = phi.inverse(y);
            return Mat(phi.H(x).topLeftCorner(n1, n1) * alph.letter_matrix(base, x));
          });
        }
      }
      v.push_back(m);
    }
    r.add(v, c);
  }
  return r;
}

}  // namespace carnot
