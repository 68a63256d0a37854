#include "carnot/group_file.hpp"

#include <fstream>
#include <regex>
#include <sstream>

namespace carnot {
namespace {

[[noreturn]] void syntax(int line, const std::string& msg) {
  fail("SyntaxError", "line " + std::to_string(line) + ": " + msg);
}

std::string strip_comment(const std::string& s) {
  const auto p = s.find('#');
  return p == std::string::npos ? s : s.substr(0, p);
}

bool parse_int(const std::string& tok, int& out) {
  try {
    size_t used = 0;
    out = std::stoi(tok, &used);
    return used == tok.size();
  } catch (...) {
    return false;
  }
}

}  // namespace

RawAlgebra parse_group_text(const std::string& text) {
  RawAlgebra raw;
  bool have_dim = false, have_strata = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  static const std::regex bracket_re(
      R"(^\s*bracket\s+(-?\d+)\s+(-?\d+)\s*->\s*\{([^}]*)\}\s*$)");
  static const std::regex entry_re(R"(^\s*(-?\d+)\s*:\s*([-+0-9.eE/]+)\s*$)");
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = strip_comment(line);
    std::istringstream ls(body);
    std::string key;
    if (!(ls >> key)) continue;
    if (key == "dimension") {
      std::string tok, extra;
      if (!(ls >> tok) || !parse_int(tok, raw.dimension) || (ls >> extra) || raw.dimension <= 0)
        syntax(lineno, "expected `dimension <positive integer>`");
      have_dim = true;
    } else if (key == "strata") {
      std::string rest;
      std::getline(ls, rest);
      for (char& ch : rest)
        if (ch == '[' || ch == ']' || ch == ',') ch = ' ';
      std::istringstream rs(rest);
      std::string tok;
      while (rs >> tok) {
        int n = 0;
        if (!parse_int(tok, n) || n <= 0) syntax(lineno, "stratum dimensions must be positive integers");
        raw.strata.push_back(n);
      }
      if (raw.strata.empty()) syntax(lineno, "empty strata list");
      have_strata = true;
    } else if (key == "bracket") {
      std::smatch m;
      if (!std::regex_match(body, m, bracket_re))
        syntax(lineno, "expected `bracket i j -> {k:coeff, ...}`");
      const int i = std::stoi(m[1]) - 1, j = std::stoi(m[2]) - 1;
      if (!have_dim) syntax(lineno, "bracket before dimension");
      if (i < 0 || j < 0 || i >= raw.dimension || j >= raw.dimension)
        fail("IndexOutOfRange", "line " + std::to_string(lineno) + ": bracket index outside [1," +
                                    std::to_string(raw.dimension) + "]");
      if (raw.brackets.count({i, j}))
        fail("DuplicateBracket", "line " + std::to_string(lineno) + ": bracket " +
                                     std::to_string(i + 1) + " " + std::to_string(j + 1) +
                                     " given twice");
      auto& row = raw.brackets[{i, j}];
      std::string entries = m[3];
      std::istringstream es(entries);
      std::string item;
      while (std::getline(es, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        std::smatch em;
        if (!std::regex_match(item, em, entry_re)) syntax(lineno, "bad entry `" + item + "`");
        const int k = std::stoi(em[1]) - 1;
        if (k < 0 || k >= raw.dimension)
          fail("IndexOutOfRange", "line " + std::to_string(lineno) + ": target index outside [1," +
                                      std::to_string(raw.dimension) + "]");
        std::string val = em[2];
        double v = 0.0;
        const auto slash = val.find('/');
        try {
          v = slash == std::string::npos
                  ? std::stod(val)
                  : std::stod(val.substr(0, slash)) / std::stod(val.substr(slash + 1));
        } catch (...) {
          syntax(lineno, "bad coefficient `" + val + "`");
        }
        if (row.count(k)) syntax(lineno, "target repeated");
        row[k] = v;
      }
    } else {
      syntax(lineno, "unknown keyword `" + key + "`");
    }
  }
  if (!have_dim) syntax(lineno, "missing `dimension`");
  if (!have_strata) syntax(lineno, "missing `strata`");
  return raw;
}

RawAlgebra parse_group_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail("IoError", "cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_group_text(ss.str());
}

StratifiedAlgebra load_group(const std::string& path) {
  return StratifiedAlgebra::validate(parse_group_file(path));
}

}  // namespace carnot
