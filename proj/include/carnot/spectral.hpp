#pragma once
/// Matrix-level audits on a lattice: the sub-Laplacian comparison bounds,
/// heat semigroups, translation and dilation invariance, singular value
/// profiles and conjugation by diffeomorphisms.

#include "carnot/lattice.hpp"
#include "carnot/matfun.hpp"

#include <vector>

namespace carnot {

struct OperatorAudit {
  double symmetry_error = 0.0;  ///< max |T - T^T|
  double lambda_min = 0.0, lambda_max = 0.0;
};
OperatorAudit audit_operator(const SpMat& T);

/// Shared spectral data of Delta for a series of norm-bound checks.
struct LaplacianContext {
  SpMat delta;
  Mat delta_half;  ///< Delta^{1/2}
  std::vector<Vec> cells;
  explicit LaplacianContext(const Lattice& lat);
};

struct NormBoundResult {
  std::string field;
  double half_norm = 0.0;     ///< |Delta^{1/2} L_w^{-1/2}|
  double half_bound = 0.0;    ///< sup |w^{-1}|
  double quarter_norm = 0.0;  ///< |Delta^{1/4} L_w^{-1/4}|
  double quarter_bound = 0.0; ///< sup |w^{-1}|^{1/2}
  double lw_lambda_min = 0.0;
  double lw_symmetry = 0.0;
  double projection_residual = 0.0;  ///< |sum_k R_k^T R_k - 1|
  double riesz_norm = 0.0;           ///< max_k |R^w_k|
  bool half_ok = false, quarter_ok = false;
};
/// Relative slack `tol` on both bounds.
NormBoundResult verify_norm_bounds(const Lattice& lat, const LaplacianContext& ctx,
                                   const MatrixField& w, double tol = 1e-8);

/// |Delta^{1/2} M_f Delta^{-1/2}| against |f|_inf + homogeneous Sobolev
/// W^{1,Q} norm on the lattice; the constant is not specified, so only the
/// ratio is reported.
struct ModulusRatio {
  double lhs = 0.0, sobolev = 0.0, sup = 0.0, ratio = 0.0;
};
ModulusRatio modulus_ratio(const Lattice& lat, const LaplacianContext& ctx, const ScalarFn& f);

/// exp(-t L) delta_0 with delta_0 = e_origin / h^d.
Vec heat_kernel(const Lattice& lat, const SpMat& L, double t);
/// Fraction of l1 mass within two cells of the boundary.
double boundary_mass(const Lattice& lat, const Vec& u);

struct HeatResult {
  double t = 0.0;
  double gaussian_error = -1.0;  ///< relative l2 error, abelian groups only
  double centre_scaled = 0.0;    ///< h_t(0) t^{Q/2}
  double boundary = 0.0;
};
/// Throws BoundaryContamination when more than 1e-3 of the mass sits at the boundary.
HeatResult heat_profile(const Lattice& lat, double t);

/// Relative l2 error between exp(-t L_A) delta_0 and |det A^{-1}| u(t, A^{-1} x),
/// with u interpolated by tensor cubics.
double heat_automorphism_error(const Lattice& lat, const Mat& A, double t);

/// max |lambda_x M_f - M_{lambda_x f} lambda_x| on the node grid.
double translation_conjugation_error(const Lattice& lat, const Vec& x, const ScalarFn& f);

/// On the line: relative error between R f and sqrt(r) (R g)(r x), g = r^{-1/2} f(./r),
/// over |x| < window. One entry per (N, L).
std::vector<double> riesz_dilation_errors(const std::vector<std::pair<int, double>>& grids,
                                          const ScalarFn& f, double r = 2.0, double window = 2.0);

/// max |K(-x) + K(x)| / max |K| for K = R delta_0 on a symmetric line grid (odd N).
double riesz_kernel_antisymmetry(int N, double L);

/// Worst |K(r x) r^Q / K(x) - 1| over cells in the annulus inner <= |x| <= outer
/// where |K(x)| is at least 5% of its max there; K = R_1 delta_0 on R^2.
double riesz_kernel_scaling(int N, double L, double r, double inner, double outer);

struct SingularValueProfile {
  Vec mu;  ///< nonincreasing
  double decay_ratio = 0.0;  ///< mu(n/4)/mu(0)
  double schatten(double p) const;
  double weak_schatten(double p) const;
  bool nonincreasing() const;
};
/// Throws CapExceeded for matrices with more than `cap` columns or rows.
SingularValueProfile compactness_profile(const Mat& T, int cap = 5000);

/// U_Phi f = Jdet^{1/2} (I f) o Phi with I the cubic interpolant; node x node.
SpMat conjugation_operator(const Lattice& lat, const SmoothMap& phi);

struct MultiplierConjugation {
  double residual = 0.0;  ///< max |M_f U g - U M_{f o Phi^{-1}} g|
  double bound = 0.0;     ///< pointwise interpolation-error bound, maximized
  bool within = false;
};
MultiplierConjugation multiplier_conjugation(const Lattice& lat, const SmoothMap& phi,
                                             const ScalarFn& f, const ScalarFn& g);

/// max over points of |U^{-1} X_k U g - Phi_*(X_k) g - a_k g| / (1 + |rhs|),
/// continuum evaluation by central differences.
double conjugated_field_residual(const Group& g, const SmoothMap& phi, int k, const ScalarFn& test,
                                 const std::vector<Vec>& pts);

/// |(A^{1/2} - B^{1/2}) A^{-1/2}| / |B^{-1/4} (B - A) A^{-3/4}| over random SPD pairs.
struct SqrtDifferenceRatio {
  double max_ratio = 0.0;
  double mean_ratio = 0.0;
  int pairs = 0;
};
SqrtDifferenceRatio sqrt_difference_ratio(int pairs, int size, std::uint64_t seed);

/// On the line with scalar field a: |M_chi (R^a - R^{a(x0)}) M_chi| for the
/// window chi = 1 on |x - x0| <= eps, 0 off 2 eps.
std::vector<double> localization_echo(int N, double L, const std::function<double(double)>& a,
                                      double x0, const std::vector<double>& eps);

}  // namespace carnot
