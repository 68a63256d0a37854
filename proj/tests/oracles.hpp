#pragma once
// Independent references shared by the unit tests and the acceptance binary.

#include "carnot/common.hpp"

#include <string>
#include <vector>

namespace oracle {

using carnot::Mat;
using carnot::Vec;

// Engel algebra as 4x4 nilpotent matrices: X1 = E12 + E23 + E34, X2 = E34,
// X3 = [X1,X2] = E24, X4 = [X1,X3] = E14.
inline Mat engel_matrix(const Vec& x) {
  Mat m = Mat::Zero(4, 4);
  m(0, 1) = m(1, 2) = x(0);
  m(2, 3) = x(0) + x(1);
  m(1, 3) = x(2);
  m(0, 3) = x(3);
  return m;
}

inline Vec engel_coords(const Mat& m) {
  Vec x(4);
  x << m(0, 1), m(2, 3) - m(0, 1), m(1, 3), m(0, 3);
  return x;
}

// Finite series; exact for nilpotent arguments of order <= 4.
inline Mat nil_exp(const Mat& a) {
  const Mat I = Mat::Identity(a.rows(), a.cols());
  return I + a + a * a / 2.0 + a * a * a / 6.0;
}

inline Mat unipotent_log(const Mat& v) {
  const Mat n = v - Mat::Identity(v.rows(), v.cols());
  return n - n * n / 2.0 + n * n * n / 3.0;
}

// log(exp X exp Y) in Engel coordinates.
inline Vec engel_product(const Vec& x, const Vec& y) {
  return engel_coords(unipotent_log(nil_exp(engel_matrix(x)) * nil_exp(engel_matrix(y))));
}

// Mutated group files and the violation class each must produce first.
struct Mutation {
  std::string text, kind;
};

inline std::vector<Mutation> mutated_groups() {
  return {
      {"dimension 3\nstrata 2 1\nbracket 1 2 -> {1:1}\n", "GradingViolation"},
      {"dimension 5\nstrata 3 1 1\nbracket 1 2 -> {4:1}\nbracket 1 4 -> {5:1}\nbracket 2 3 -> {4:1}\n"
       "bracket 3 4 -> {5:2}\n",
       "JacobiViolation"},
      {"dimension 3\nstrata 2 1\n", "NotGenerated"},
      {"dimension 3\nstrata 2 1\nbracket 1 2 -> {3:1}\nbracket 2 1 -> {3:1}\n", "AntisymmetryViolation"},
      {"dimension 4\nstrata 2 1\nbracket 1 2 -> {3:1}\n", "StrataMismatch"},
  };
}

// Closed-form Gaussian on R^d: (4 pi t)^{-d/2} exp(-|x|^2 / 4t).
inline double gaussian(const Vec& x, double t) {
  return std::pow(4.0 * M_PI * t, -0.5 * x.size()) * std::exp(-x.squaredNorm() / (4.0 * t));
}

}  // namespace oracle
