#pragma once
/// Free *-algebra of words in multipliers and quasi-Riesz transforms, and
/// the principal symbol onto (scalar functions) (x) (Riesz words).
///
/// Letters only carry names; the Alphabet resolves them to functions,
/// constant automorphisms (first blocks) or automorphism-valued fields.
/// Canonical forms are therefore exact. Pointwise evaluation produces
/// FiberElements whose letters carry matrices.

#include "carnot/diffeo.hpp"

#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace carnot {

using cplx = std::complex<double>;
using MatFn = std::function<Mat(const Vec&)>;

struct ScalarHandle {
  std::string name;
  ScalarFn f;
  std::optional<Box> support;  ///< f vanishes outside; unbounded when empty
};

class Alphabet {
 public:
  explicit Alphabet(std::shared_ptr<const Group> g);

  const Group& group() const { return *g_; }
  std::shared_ptr<const Group> group_ptr() const { return g_; }

  void add_function(const std::string& name, ScalarFn f, std::optional<Box> support = std::nullopt);
  /// First block of a strata automorphism. Throws NotAdmissible.
  void add_automorphism(const std::string& name, const Mat& first_block);
  /// First-block valued field, checked at the probes. Throws NotAdmissible.
  void add_field(const std::string& name, MatFn a);

  bool has_function(const std::string& name) const { return functions_.count(name) > 0; }
  bool has_letter_matrix(const std::string& name) const;
  bool is_field(const std::string& name) const { return fields_.count(name) > 0; }
  /// Throws UnknownName.
  const ScalarHandle& function(const std::string& name) const;
  /// Constant automorphism, or the field value at x.
  Mat letter_matrix(const std::string& name, const Vec& x) const;
  const std::map<std::string, Mat>& automorphisms() const { return autos_; }

  std::vector<Vec> probes;

 private:
  std::shared_ptr<const Group> g_;
  std::map<std::string, ScalarHandle> functions_;
  std::map<std::string, Mat> autos_;
  std::map<std::string, MatFn> fields_;
};

struct Letter {
  enum class Kind { Mult, Riesz, RieszAdj, Compact };
  Kind kind = Kind::Compact;
  int k = 0;         ///< first-stratum index, 0-based
  std::string name;  ///< function or automorphism name

  static Letter mult(std::string f) { return {Kind::Mult, 0, std::move(f)}; }
  static Letter riesz(int k, std::string a) { return {Kind::Riesz, k, std::move(a)}; }
  static Letter riesz_adj(int k, std::string a) { return {Kind::RieszAdj, k, std::move(a)}; }
  static Letter compact() { return {Kind::Compact, 0, {}}; }

  Letter adjoint() const;
  std::string str() const;
  auto operator<=>(const Letter&) const = default;
  bool operator==(const Letter&) const = default;
};

using Word = std::vector<Letter>;
std::string word_str(const Word& w);

/// Finite combination of words; zero coefficients are pruned.
class FormalElement {
 public:
  FormalElement() = default;
  static FormalElement word(Word w, cplx c = 1.0);
  static FormalElement letter(Letter l) { return word({std::move(l)}); }
  static FormalElement unit() { return word({}); }

  const std::map<Word, cplx>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  void add(const Word& w, cplx c);

  FormalElement operator+(const FormalElement& o) const;
  FormalElement operator-(const FormalElement& o) const;
  FormalElement operator*(const FormalElement& o) const;
  FormalElement scaled(cplx c) const;
  FormalElement adjoint() const;
  bool operator==(const FormalElement& o) const { return terms_ == o.terms_; }

 private:
  std::map<Word, cplx> terms_;
};

/// f (x) g with f a product of scalar handles (sorted, since they commute)
/// and g a word in Riesz letters.
struct SymbolKey {
  std::vector<std::string> scalars;
  Word riesz;
  auto operator<=>(const SymbolKey&) const = default;
  bool operator==(const SymbolKey&) const = default;
};

class SymbolExpr {
 public:
  SymbolExpr() = default;
  static SymbolExpr unit();
  static SymbolExpr term(SymbolKey key, cplx c = 1.0);

  const std::map<SymbolKey, cplx>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  void add(const SymbolKey& key, cplx c);

  SymbolExpr operator+(const SymbolExpr& o) const;
  SymbolExpr operator-(const SymbolExpr& o) const;
  SymbolExpr operator*(const SymbolExpr& o) const;
  SymbolExpr scaled(cplx c) const;
  SymbolExpr adjoint() const;
  bool operator==(const SymbolExpr& o) const { return terms_ == o.terms_; }

 private:
  std::map<SymbolKey, cplx> terms_;
};

/// Each word maps to (product of its multipliers) (x) (its Riesz letters in
/// order); words with a compact marker map to 0.
SymbolExpr symbol(const FormalElement& e);
/// Interleaves multiplier and Riesz letters so that symbol(lift(s)) = s.
FormalElement lift(const SymbolExpr& s);
/// True iff the symbol vanishes in the free model.
bool kernel_test(const FormalElement& e);

/// Equality of canonical Riesz parts with scalar parts compared at the
/// alphabet probes.
bool probe_equal(const SymbolExpr& a, const SymbolExpr& b, const Alphabet& alph, double tol = 1e-12);

/// Random element: up to `terms` words of length <= max_len over the given
/// letters, Gaussian integer coefficients.
FormalElement random_element(const std::vector<Letter>& letters, int terms, int max_len, Rng& rng);

struct FiberLetter {
  int k = 0;
  bool adj = false;
  Mat A;  ///< first block
};
using FiberWord = std::vector<FiberLetter>;

/// Value of a symbol at a point: words in constant Riesz letters.
class FiberElement {
 public:
  /// Merges words whose matrices agree within `merge_tol`.
  void add(const FiberWord& w, cplx c, double merge_tol = 1e-9);
  const std::vector<std::pair<FiberWord, cplx>>& terms() const { return terms_; }
  bool is_zero(double tol = 0.0) const;
  FiberElement operator+(const FiberElement& o) const;
  FiberElement scaled(cplx c) const;
  /// (k, A) -> (k, H A) on every letter, H cut to its leading n1 x n1 block.
  FiberElement acted(const Mat& H) const;
  /// Sum of |c|.
  double weight() const;

 private:
  std::vector<std::pair<FiberWord, cplx>> terms_;
};

/// Greedy matching of words with identical (k, adj) patterns: the max over
/// terms of |c - c'| + |c| max|A - A'|, unmatched terms contributing |c|.
double fiber_distance(const FiberElement& a, const FiberElement& b);

FiberElement evaluate(const SymbolExpr& s, const Alphabet& alph, const Vec& x);

using SymbolSection = std::function<FiberElement(const Vec&)>;
SymbolSection section(const SymbolExpr& s, const Alphabet& alph);

/// x -> psi(x)^2 (x) R^{a(x)}_k, assembled directly from the formula.
SymbolSection symbol_of_sandwich(const Alphabet& alph, const std::string& psi, const std::string& a, int k);

/// Bounding box of phi over a 5^d grid of the box; used to track supports.
Box sampled_image(const SmoothMap& phi, const Box& b);

/// y -> pi_{H(Phi^{-1}y)}(s(Phi^{-1} y)).
SymbolSection transport(const SymbolSection& s, const CertifiedDiffeo& phi);
/// transport(section(symbol(e)), phi). Throws UnsupportedElement when a
/// noncompact word carries no compactly supported multiplier.
SymbolSection conjugate_by_diffeo(const FormalElement& e, const Alphabet& alph, const CertifiedDiffeo& phi);
/// Letter route: Mult(f) -> Mult(f o Phi^{-1}) and (k, A) -> (k, H(Phi^{-1}.) A),
/// registering the new handles in `alph`.
FormalElement conjugate_element(const FormalElement& e, Alphabet& alph, const CertifiedDiffeo& phi,
                                const std::string& tag);

}  // namespace carnot
