#pragma once
/// Strata-preserving automorphisms: block-diagonal matrices in Jacobian
/// coordinates that commute with the bracket.

#include "carnot/algebra.hpp"

#include <string>
#include <vector>

namespace carnot {

struct AutomorphismCheck {
  bool ok = true;
  bool invertible = true;
  double block_residual = 0.0;    ///< largest entry outside the strata blocks
  double bracket_residual = 0.0;  ///< max |A[e_i,e_j] - [Ae_i,Ae_j]|, scaled
  std::vector<std::string> violations;
};

AutomorphismCheck check_strata_automorphism(const StratifiedAlgebra& alg, const Mat& A,
                                            double tol = 1e-10);

/// Extends an n1 x n1 first block to the unique graded map with
/// A[e_a, e_b] = [A e_a, A e_b]. `residual` receives the worst
/// inconsistency of that linear system (zero iff the extension exists).
Mat extend_first_block(const StratifiedAlgebra& alg, const Mat& B, double* residual = nullptr);

class StrataAutomorphism {
 public:
  /// Throws NotAutomorphism.
  static StrataAutomorphism from_matrix(const StratifiedAlgebra& alg, const Mat& A,
                                        double tol = 1e-10);
  /// Throws NotAdmissible when the block does not extend.
  static StrataAutomorphism from_first_block(const StratifiedAlgebra& alg, const Mat& B,
                                             double tol = 1e-8);

  const Mat& matrix() const { return m_; }
  Mat first_block() const { return m_.topLeftCorner(n1_, n1_); }
  /// Diagonal block of stratum s (1-based).
  Mat block(const StratifiedAlgebra& alg, int s) const;

 private:
  Mat m_;
  int n1_ = 0;
};

}  // namespace carnot
