#include "carnot/symbol_file.hpp"

#include "carnot/group_file.hpp"
#include "carnot/polynomial.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace carnot {

ScalarFn box_bump(const Vec& c, double r) {
  return [c, r](const Vec& x) {
    double v = 1.0;
    for (int i = 0; i < c.size() && v != 0.0; ++i) v *= smooth_cutoff(std::abs(x(i) - c(i)) / r, 0.5, 1.0);
    return v;
  };
}

namespace {

struct SexprParser {
  const std::string& s;
  const Alphabet& alph;
  size_t pos = 0;

  [[noreturn]] void error(const std::string& m) const {
    fail("SyntaxError", "offset " + std::to_string(pos) + ": " + m);
  }
  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  std::string atom() {
    skip();
    const size_t a = pos;
    while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos])) && s[pos] != '(' && s[pos] != ')') ++pos;
    if (a == pos) error("expected an atom");
    return s.substr(a, pos - a);
  }
  void expect(char c) {
    skip();
    if (pos >= s.size() || s[pos] != c) error(std::string("expected '") + c + "'");
    ++pos;
  }
  bool peek(char c) {
    skip();
    return pos < s.size() && s[pos] == c;
  }

  FormalElement scalar_atom(const std::string& a) {
    if (a == "I") return FormalElement::unit().scaled(cplx(0.0, 1.0));
    try {
      size_t used = 0;
      const double v = std::stod(a, &used);
      if (used == a.size()) return FormalElement::unit().scaled(v);
    } catch (const std::exception&) {
    }
    error("unexpected atom '" + a + "'");
  }

  int index() {
    const std::string a = atom();
    try {
      size_t used = 0;
      const int k = std::stoi(a, &used);
      if (used == a.size() && k >= 1 && k <= alph.group().n1()) return k - 1;
    } catch (const std::exception&) {
    }
    error("Riesz index '" + a + "' outside 1.." + std::to_string(alph.group().n1()));
  }

  FormalElement expr() {
    if (!peek('(')) return scalar_atom(atom());
    expect('(');
    const std::string op = atom();
    FormalElement r;
    if (op == "+" || op == "-" || op == "*") {
      std::vector<FormalElement> args;
      while (!peek(')')) args.push_back(expr());
      if (args.empty()) error("'" + op + "' needs arguments");
      r = args[0];
      if (op == "-" && args.size() == 1) r = r.scaled(-1.0);
      for (size_t i = 1; i < args.size(); ++i)
        r = op == "+" ? r + args[i] : op == "-" ? r - args[i] : r * args[i];
    } else if (op == "adj") {
      r = expr().adjoint();
    } else if (op == "mult") {
      const std::string f = atom();
      alph.function(f);
      r = FormalElement::letter(Letter::mult(f));
    } else if (op == "riesz" || op == "riesz*") {
      const int k = index();
      const std::string a = atom();
      if (!alph.has_letter_matrix(a)) fail("UnknownName", "no automorphism named " + a);
      r = FormalElement::letter(op == "riesz" ? Letter::riesz(k, a) : Letter::riesz_adj(k, a));
    } else if (op == "compact") {
      r = FormalElement::letter(Letter::compact());
    } else {
      error("unknown operator '" + op + "'");
    }
    expect(')');
    return r;
  }
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

}  // namespace

FormalElement parse_sexpr(const std::string& text, const Alphabet& alph) {
  SexprParser p{text, alph};
  FormalElement e = p.expr();
  p.skip();
  if (p.pos != text.size()) p.error("trailing input");
  return e;
}

SymbolFile parse_symbol_text(const std::string& text, const std::string& base_dir) {
  SymbolFile out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto syntax = [&](const std::string& m) { fail("SyntaxError", "line " + std::to_string(lineno) + ": " + m); };
  auto need_group = [&] {
    if (!out.alphabet) syntax("group line required first");
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto p = line.find('#'); p != std::string::npos) line.resize(p);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    std::string rest;
    std::getline(ls, rest);
    try {
      if (key == "group") {
        std::string file;
        if (!(std::istringstream(rest) >> file)) syntax("group needs a file");
        std::filesystem::path p(file);
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        out.alphabet = std::make_shared<Alphabet>(std::make_shared<const Group>(load_group(p.string())));
      } else if (key == "probe") {
        need_group();
        std::istringstream vs(rest);
        std::vector<double> v;
        double t;
        while (vs >> t) v.push_back(t);
        if (static_cast<int>(v.size()) != out.alphabet->group().dim()) syntax("probe needs one value per coordinate");
        out.alphabet->probes.push_back(Eigen::Map<Vec>(v.data(), v.size()));
      } else if (key == "function") {
        need_group();
        std::istringstream fs(rest);
        std::string name, kind;
        if (!(fs >> name >> kind)) syntax("function needs a name and a kind");
        const int d = out.alphabet->group().dim();
        if (kind == "bump") {
          std::vector<double> v;
          double t;
          while (fs >> t) v.push_back(t);
          if (static_cast<int>(v.size()) != d + 1 || !(v[d] > 0.0)) syntax("bump needs a center and a positive radius");
          Vec c = Eigen::Map<Vec>(v.data(), d);
          const double r = v[d];
          out.alphabet->add_function(name, box_bump(c, r),
                                     Box{c.array() - r, c.array() + r});
        } else if (kind == "poly") {
          std::string body;
          std::getline(fs, body);
          const Polynomial p = parse_polynomial(body, d);
          out.alphabet->add_function(name, [p](const Vec& x) { return p(x); });
        } else {
          syntax("unknown function kind '" + kind + "'");
        }
      } else if (key == "automorphism" || key == "field") {
        need_group();
        std::istringstream fs(rest);
        std::string name;
        if (!(fs >> name)) syntax(key + " needs a name");
        std::string body;
        std::getline(fs, body);
        const int n1 = out.alphabet->group().n1(), d = out.alphabet->group().dim();
        const auto rows = split(body, '|');
        if (static_cast<int>(rows.size()) != n1) syntax(key + " needs " + std::to_string(n1) + " rows");
        if (key == "automorphism") {
          Mat B(n1, n1);
          for (int i = 0; i < n1; ++i) {
            std::istringstream rs(rows[i]);
            for (int j = 0; j < n1; ++j)
              if (!(rs >> B(i, j))) syntax("automorphism row " + std::to_string(i + 1) + " is short");
          }
          out.alphabet->add_automorphism(name, B);
        } else {
          std::vector<Polynomial> entries;
          for (int i = 0; i < n1; ++i) {
            const auto cols = split(rows[i], ';');
            if (static_cast<int>(cols.size()) != n1) syntax("field row " + std::to_string(i + 1) + " needs " + std::to_string(n1) + " entries");
            for (const auto& c : cols) entries.push_back(parse_polynomial(c, d));
          }
          out.alphabet->add_field(name, [entries, n1](const Vec& x) {
            Mat B(n1, n1);
            for (int i = 0; i < n1; ++i)
              for (int j = 0; j < n1; ++j) B(i, j) = entries[i * n1 + j](x);
            return B;
          });
        }
      } else if (key == "expr") {
        need_group();
        std::istringstream es(rest);
        std::string name;
        if (!(es >> name)) syntax("expr needs a name");
        std::string body;
        std::getline(es, body);
        const int start = lineno;
        auto depth = [](const std::string& b) {
          int d = 0;
          for (char c : b) d += c == '(' ? 1 : c == ')' ? -1 : 0;
          return d;
        };
        while (depth(body) > 0 && std::getline(in, line)) {
          ++lineno;
          if (auto p = line.find('#'); p != std::string::npos) line.resize(p);
          body += " " + line;
        }
        if (depth(body) != 0) {
          lineno = start;
          syntax("unbalanced parentheses in expr " + name);
        }
        out.exprs.emplace_back(name, parse_sexpr(body, *out.alphabet));
      } else {
        syntax("unknown keyword '" + key + "'");
      }
    } catch (const Error& e) {
      if (e.kind() == "SyntaxError" && std::string(e.what()).find("line ") == std::string::npos) syntax(e.what());
      throw;
    }
  }
  if (!out.alphabet) fail("SyntaxError", "symbol file has no group line");
  return out;
}

SymbolFile parse_symbol_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail("IoError", "cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_symbol_text(ss.str(), std::filesystem::path(path).parent_path().string());
}

}  // namespace carnot
