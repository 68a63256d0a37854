#include "carnot/automorphism.hpp"

#include <cmath>
#include <sstream>

namespace carnot {

AutomorphismCheck check_strata_automorphism(const StratifiedAlgebra& alg, const Mat& A, double tol) {
  AutomorphismCheck c;
  const int d = alg.dim();
  if (A.rows() != d || A.cols() != d) {
    c.ok = false;
    c.invertible = false;
    c.violations.push_back("matrix is not " + std::to_string(d) + "x" + std::to_string(d));
    return c;
  }
  const double scale = 1.0 + A.cwiseAbs().maxCoeff();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (alg.order(i) != alg.order(j) && std::abs(A(i, j)) > c.block_residual) {
        c.block_residual = std::abs(A(i, j));
        if (c.block_residual > tol * scale) {
          std::ostringstream os;
          os << "off-block entry (" << i + 1 << "," << j + 1 << ") = " << A(i, j);
          c.violations.push_back(os.str());
        }
      }
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const Vec ei = Vec::Unit(d, i), ej = Vec::Unit(d, j);
      const Vec lhs = A * alg.bracket(ei, ej);
      const Vec rhs = alg.bracket(A * ei, A * ej);
      const double r = (lhs - rhs).lpNorm<Eigen::Infinity>() / (scale * scale);
      c.bracket_residual = std::max(c.bracket_residual, r);
      if (r > tol) {
        std::ostringstream os;
        os << "bracket of (" << i + 1 << "," << j + 1 << ") not preserved, residual " << r;
        c.violations.push_back(os.str());
      }
    }
  Eigen::JacobiSVD<Mat> svd(A);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) <= tol * s(0)) {
    c.invertible = false;
    c.violations.push_back("singular matrix");
  }
  c.ok = c.violations.empty();
  return c;
}

Mat extend_first_block(const StratifiedAlgebra& alg, const Mat& B, double* residual) {
  const int d = alg.dim(), n1 = alg.n1();
  Mat A = Mat::Zero(d, d);
  A.topLeftCorner(n1, n1) = B;
  double worst = 0.0;
  for (int s = 2; s <= alg.step(); ++s) {
    const int off = alg.stratum_offset(s), ns = alg.strata()[s - 1];
    const int poff = alg.stratum_offset(s - 1), np = alg.strata()[s - 2];
    Mat P(ns, n1 * np), Q(ns, n1 * np);
    for (int a = 0; a < n1; ++a)
      for (int b = 0; b < np; ++b) {
        const Vec ea = Vec::Unit(d, a), eb = Vec::Unit(d, poff + b);
        P.col(a * np + b) = alg.bracket(ea, eb).segment(off, ns);
        Q.col(a * np + b) = alg.bracket(A * ea, A * eb).segment(off, ns);
      }
    // A_s P = Q in the least-squares sense.
    const Mat As = P.transpose().completeOrthogonalDecomposition().solve(Q.transpose()).transpose();
    A.block(off, off, ns, ns) = As;
    const double scale = 1.0 + Q.cwiseAbs().maxCoeff();
    worst = std::max(worst, (As * P - Q).cwiseAbs().maxCoeff() / scale);
  }
  if (residual) *residual = worst;
  return A;
}

StrataAutomorphism StrataAutomorphism::from_matrix(const StratifiedAlgebra& alg, const Mat& A, double tol) {
  const auto c = check_strata_automorphism(alg, A, tol);
  if (!c.ok) fail("NotAutomorphism", c.violations.front());
  StrataAutomorphism r;
  r.m_ = A;
  r.n1_ = alg.n1();
  return r;
}

StrataAutomorphism StrataAutomorphism::from_first_block(const StratifiedAlgebra& alg, const Mat& B,
                                                        double tol) {
  double res = 0.0;
  const Mat A = extend_first_block(alg, B, &res);
  if (res > tol) fail("NotAdmissible", "first block does not extend to an automorphism");
  const auto c = check_strata_automorphism(alg, A, tol);
  if (!c.ok) fail("NotAdmissible", c.violations.front());
  StrataAutomorphism r;
  r.m_ = A;
  r.n1_ = alg.n1();
  return r;
}

Mat StrataAutomorphism::block(const StratifiedAlgebra& alg, int s) const {
  const int off = alg.stratum_offset(s), ns = alg.strata()[s - 1];
  return m_.block(off, off, ns, ns);
}

}  // namespace carnot
