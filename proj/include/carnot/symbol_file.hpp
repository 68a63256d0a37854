#pragma once
/// Expression files for the symbol engine.
///
///     group heisenberg1.grp                  # relative to the file
///     probe 0.1 0.2 0.3                      # scalar probes, repeatable
///     function psi bump 0 0 0 1.5            # prod of cutoffs, support c +- r
///     function f poly 1 + x1^2               # polynomial, unbounded support
///     automorphism A 2 1 | 0 1               # first block, rows split by '|'
///     field a 1 + 0.1*x1 ; 0 | 0 ; 1         # polynomial first-block field
///     expr e1 (* (mult psi) (riesz 1 A) (mult psi))
///
/// Expressions: (+ e ...), (- e ...), (* e ...), (adj e), (mult f),
/// (riesz k A), (riesz* k A), (compact), numbers and I for the imaginary
/// unit. An expr may continue over lines until its parentheses balance.

#include "carnot/symbol.hpp"

#include <memory>
#include <string>
#include <vector>

namespace carnot {

struct SymbolFile {
  std::shared_ptr<Alphabet> alphabet;
  std::vector<std::pair<std::string, FormalElement>> exprs;
};

/// Throws SyntaxError (with line) and UnknownName.
FormalElement parse_sexpr(const std::string& text, const Alphabet& alph);
SymbolFile parse_symbol_text(const std::string& text, const std::string& base_dir);
SymbolFile parse_symbol_file(const std::string& path);

/// f(x) = prod_i s((x_i - c_i)/r) with s = smooth_cutoff(|.|, 0.5, 1).
ScalarFn box_bump(const Vec& c, double r);

}  // namespace carnot
