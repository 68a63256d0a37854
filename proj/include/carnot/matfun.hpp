#pragma once
/// Dense matrix functions: symmetric eigensystems and singular values via
/// LAPACK, the inverse square root by quadrature, matrix exp/log series and
/// the action of a sparse semigroup on a vector.

#include "carnot/common.hpp"

#include <functional>

namespace carnot {

struct SymEig {
  Vec values;   ///< ascending
  Mat vectors;  ///< orthonormal columns
};

/// Throws NotSymmetric when |A - A^T| exceeds 1e-10 relative.
SymEig sym_eig(const Mat& A);
Vec sym_eigvals(const Mat& A);
/// V f(Lambda) V^T.
Mat sym_fun(const SymEig& e, const std::function<double(double)>& f);
Mat sym_fun(const Mat& A, const std::function<double(double)>& f);

/// Nonincreasing singular values.
Vec singular_values(const Mat& A);
double spectral_norm(const Mat& A);

struct GaussRule {
  Vec nodes, weights;  ///< on [-1, 1]
};
GaussRule gauss_legendre(int n);

struct InvSqrtInfo {
  int nodes = 0;
  double lambda_min = 0.0, lambda_max = 0.0;
  double scalar_error = 0.0;  ///< worst relative error of the rule on the spectral interval
};

/// T^{-1/2} = (2/pi) int_0^inf (T + t^2)^{-1} dt with t = sqrt(lbar) ((1+u)/(1-u))^2
/// and Gauss-Legendre in u; lbar is the geometric mean of the extreme
/// eigenvalue estimates. The rule is checked on the scalar integral at the
/// interval ends and refined up to 256 nodes. Throws NotPositiveDefinite.
Mat inv_sqrt(const Mat& T, InvSqrtInfo* info = nullptr);
/// Same rule applied to a scalar; used for the per-call validation.
double inv_sqrt_scalar(double lambda, double lbar, int nodes);

/// Validated rule for spectra inside [lmin, lmax]: T^{-1/2} ~ sum W_i (T + t_i^2)^{-1}.
struct InvSqrtRule {
  Vec t, W;
  InvSqrtInfo info;
};
InvSqrtRule inv_sqrt_rule(double lmin, double lmax);
/// Reference through the eigendecomposition. Throws NotPositiveDefinite.
Mat inv_sqrt_eig(const Mat& T);

/// Bracket [0.9 lmin, 1.1 lmax] of an SPD spectrum by power and inverse iteration.
std::pair<double, double> extreme_eigenvalues(const Mat& T, int iters = 60);

/// exp by scaling and squaring of the Taylor series.
Mat expm(const Mat& X);
/// log V = sum (-1)^{k+1} (V-1)^k / k; requires |V - 1|_2 <= 1/2, otherwise
/// throws EpsilonTooLarge.
Mat logm_series(const Mat& V);

/// exp(-t A) v for a sparse A with nonnegative spectrum, by Taylor steps of
/// size at most 1/|A|_1.
Vec expm_action(const SpMat& A, const Vec& v, double t);

}  // namespace carnot
