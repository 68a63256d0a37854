#include "carnot/polynomial.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace carnot {

Polynomial Polynomial::constant(int nvars, double c) {
  Polynomial p(nvars);
  p.add_term(Exponents(nvars, 0), c);
  return p;
}

Polynomial Polynomial::variable(int nvars, int i) {
  Exponents e(nvars, 0);
  e[i] = 1;
  Polynomial p(nvars);
  p.add_term(e, 1.0);
  return p;
}

Polynomial Polynomial::monomial(const Exponents& e, double c) {
  Polynomial p(static_cast<int>(e.size()));
  p.add_term(e, c);
  return p;
}

void Polynomial::add_term(const Exponents& e, double c) {
  if (c == 0.0) return;
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    terms_.emplace(e, c);
    return;
  }
  it->second += c;
  if (it->second == 0.0) terms_.erase(it);
}

void Polynomial::prune(double tol) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (std::abs(it->second) <= tol)
      it = terms_.erase(it);
    else
      ++it;
  }
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial r = *this;
  r += o;
  return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (n_ == 0) n_ = o.n_;
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o * -1.0; }

Polynomial Polynomial::operator*(double s) const {
  Polynomial r(n_);
  if (s == 0.0) return r;
  for (const auto& [e, c] : terms_) r.terms_.emplace(e, c * s);
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial r(std::max(n_, o.n_));
  for (const auto& [e1, c1] : terms_) {
    for (const auto& [e2, c2] : o.terms_) {
      Exponents e(e1.size());
      for (size_t i = 0; i < e1.size(); ++i) e[i] = e1[i] + e2[i];
      r.add_term(e, c1 * c2);
    }
  }
  return r;
}

Polynomial Polynomial::derivative(int i) const {
  Polynomial r(n_);
  for (const auto& [e, c] : terms_) {
    if (e[i] == 0) continue;
    Exponents f = e;
    f[i] -= 1;
    r.add_term(f, c * e[i]);
  }
  return r;
}

double Polynomial::operator()(const Vec& x) const {
  double s = 0.0;
  for (const auto& [e, c] : terms_) {
    double m = c;
    for (size_t i = 0; i < e.size(); ++i)
      for (int k = 0; k < e[i]; ++k) m *= x(static_cast<Eigen::Index>(i));
    s += m;
  }
  return s;
}

Vec Polynomial::gradient(const Vec& x) const {
  Vec g(n_);
  for (int i = 0; i < n_; ++i) g(i) = derivative(i)(x);
  return g;
}

std::optional<int> Polynomial::weighted_degree(const std::vector<int>& weights) const {
  std::optional<int> deg;
  for (const auto& [e, c] : terms_) {
    int w = 0;
    for (size_t i = 0; i < e.size(); ++i) w += weights[i] * e[i];
    if (deg && *deg != w) return std::nullopt;
    deg = w;
  }
  return deg;
}

int Polynomial::total_degree() const {
  int deg = 0;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (int k : e) s += k;
    deg = std::max(deg, s);
  }
  return deg;
}

std::string Polynomial::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(12);
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << c;
    for (size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      os << "*x" << (i + 1);
      if (e[i] > 1) os << "^" << e[i];
    }
  }
  return os.str();
}

Vec evaluate(const PolyVec& p, const Vec& x) {
  Vec v(static_cast<Eigen::Index>(p.size()));
  for (size_t i = 0; i < p.size(); ++i) v(static_cast<Eigen::Index>(i)) = p[i](x);
  return v;
}

Polynomial substitute(const Polynomial& f, const PolyVec& x) {
  if (static_cast<int>(x.size()) != f.nvars()) fail("DimensionMismatch", "substitution needs one polynomial per variable");
  const int d = x.empty() ? 0 : x[0].nvars();
  Polynomial out(d);
  for (const auto& [e, c] : f.terms()) {
    Polynomial t = Polynomial::constant(d, c);
    for (size_t i = 0; i < e.size(); ++i)
      for (int p = 0; p < e[i]; ++p) t = t * x[i];
    out += t;
  }
  return out;
}

}  // namespace carnot

namespace carnot {
namespace {

class ExprParser {
 public:
  ExprParser(const std::string& s, int n) : s_(s), n_(n) {}

  Polynomial parse() {
    Polynomial p = expr();
    skip();
    if (pos_ != s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void error(const std::string& m) const {
    fail("SyntaxError", "in polynomial '" + s_ + "' at " + std::to_string(pos_) + ": " + m);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  Polynomial expr() {
    Polynomial p = term();
    for (;;) {
      if (eat('+'))
        p += term();
      else if (eat('-'))
        p = p - term();
      else
        return p;
    }
  }
  Polynomial term() {
    Polynomial p = power();
    for (;;) {
      if (eat('*')) {
        p = p * power();
      } else if (eat('/')) {
        const Polynomial q = power();
        if (q.total_degree() != 0 || q.is_zero()) error("division by a non-constant");
        p = p * (1.0 / q(Vec::Zero(n_)));
      } else {
        return p;
      }
    }
  }
  Polynomial power() {
    Polynomial b = unary();
    if (!eat('^')) return b;
    skip();
    size_t used = 0;
    int e = 0;
    try {
      e = std::stoi(s_.substr(pos_), &used);
    } catch (...) {
      error("expected an exponent");
    }
    if (e < 0) error("negative exponent");
    pos_ += used;
    Polynomial r = Polynomial::constant(n_, 1.0);
    for (int i = 0; i < e; ++i) r = r * b;
    return r;
  }
  Polynomial unary() {
    if (eat('-')) return unary() * -1.0;
    if (eat('+')) return unary();
    return primary();
  }
  Polynomial primary() {
    skip();
    if (eat('(')) {
      Polynomial p = expr();
      if (!eat(')')) error("missing ')'");
      return p;
    }
    if (pos_ < s_.size() && s_[pos_] == 'x') {
      ++pos_;
      size_t used = 0;
      int i = 0;
      try {
        i = std::stoi(s_.substr(pos_), &used);
      } catch (...) {
        error("expected a variable index");
      }
      if (i < 1 || i > n_) error("variable x" + std::to_string(i) + " out of range");
      pos_ += used;
      return Polynomial::variable(n_, i - 1);
    }
    size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s_.substr(pos_), &used);
    } catch (...) {
      error("expected a number, variable or '('");
    }
    pos_ += used;
    return Polynomial::constant(n_, v);
  }

  const std::string& s_;
  int n_;
  size_t pos_ = 0;
};

}  // namespace

Polynomial parse_polynomial(const std::string& text, int nvars) {
  Polynomial p = ExprParser(text, nvars).parse();
  if (p.nvars() == 0) p = Polynomial(nvars);
  return p;
}

PolyVec parse_polyvec(const std::string& text, int nvars) {
  PolyVec out;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, ';')) out.push_back(parse_polynomial(part, nvars));
  if (static_cast<int>(out.size()) != nvars)
    fail("SyntaxError", "expected " + std::to_string(nvars) + " components in '" + text + "'");
  return out;
}

}  // namespace carnot
