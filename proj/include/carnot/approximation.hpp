#pragma once
/// Local constant approximations of matrix fields and the patched Riesz
/// sums built from them over a dilated covering.

#include "carnot/covering.hpp"
#include "carnot/lattice.hpp"

#include <memory>
#include <vector>

namespace carnot {

/// Constants of a field w that is constant outside rho <= constancy_radius.
struct FieldConstants {
  double w1inf = 0.0;   ///< sum over k,j,l of sup |X_l w_kj|
  double sup_w = 0.0;   ///< sup |w(x)|_2
  double sup_inv = 0.0; ///< sup |w(x)^{-1}|_2
  double C = 0.0;       ///< measured mean value constant
  double C_w = 0.0;     ///< max(C,1) w1inf sup_inv
  double eps_w = 0.0;   ///< 1/(2 C_w), infinite for constant fields
  int samples = 0;
};

/// Sup norms over random points of the ball rho <= 1.05 radius plus one point
/// outside it. C is the largest |w(x)-w(y)|_2 / (w1inf rho(y^{-1}x)) over
/// random pairs at scales from 1e-3 to twice the radius.
FieldConstants field_constants(const Group& g, const MatrixField& w, int samples, Rng& rng);

/// (X_l w)(x) by central differences along t -> x exp(t e_l).
Mat field_derivative(const Group& g, const MatrixField& w, int l, const Vec& x);

/// theta(delta_{1/eps}(gamma^{-1}x)) with theta = 1 on B(o,1) and 0 off B(o,2).
double patch_cutoff(const Group& g, const Vec& gamma, double eps, const Vec& x);

/// w^gamma_eps(x) = Exp(theta xi) w(gamma) with xi = log(w(x) w(gamma)^{-1}).
/// Throws EpsilonTooLarge when the log series radius is violated at x.
Mat approximant(const Group& g, const MatrixField& w, const Vec& gamma, double eps, const Vec& x);
MatrixField approximant_field(std::shared_ptr<const Group> g, const MatrixField& w, const Vec& gamma,
                              double eps);

struct ApproximationReport {
  double eps = 0.0;
  int centers = 0;
  int evaluations = 0;
  double agree_residual = 0.0;     ///< (1) on lattice points in B(gamma, eps)
  double constant_residual = 0.0;  ///< (2) on lattice points outside B(gamma, 2 eps)
  double sup_deviation = 0.0;      ///< (3) sup |w^gamma - w(gamma)|_2
  double deviation_bound = 0.0;    ///< 6 |w| C_w eps
  double sobolev_proxy = 0.0;      ///< (4) sup_gamma of a Monte Carlo W^{1,Q} seminorm
  double sup_approx = 0.0;         ///< (5) sup |w^gamma|_2
  double sup_approx_inv = 0.0;     ///< (5) sup |(w^gamma)^{-1}|_2
  double bound_approx = 0.0;       ///< e |w|
  double bound_approx_inv = 0.0;   ///< e |w^{-1}|

  bool pass(double tol = 1e-12) const {
    return agree_residual <= tol && constant_residual <= tol && sup_deviation <= deviation_bound &&
           sup_approx <= bound_approx && sup_approx_inv <= bound_approx_inv;
  }
};

/// Audits the family over every covering center whose 2 eps ball meets the
/// lattice. Throws EpsilonTooLarge when eps > eps_w / 2.
ApproximationReport approximation_family(const Lattice& lat, const MatrixField& w, double eps,
                                         const FieldConstants& fc, Rng& rng, int sobolev_samples = 48);

struct PatchedOptions {
  /// Assemble A and R in full instead of only their difference.
  bool full = false;
  /// Restrict the sums to these centers.
  const std::vector<CoveringSystem::Key>* only = nullptr;
};

struct PatchedSums {
  double eps = 0.0;
  int k = 0;
  int centers = 0;  ///< centers whose bump meets both nodes and cells
  int active = 0;   ///< centers where a^gamma_eps differs from a(gamma) on some cell
  Mat A, R;         ///< cells x nodes, only with PatchedOptions::full
  Mat difference;   ///< A - R
  double deviation = 0.0;
};

/// A = sum M_eta R^{a^gamma_eps}_k M_eta and R = sum M_eta R^{a(gamma)}_k M_eta
/// over the covering at scale eps. Without `full`, centers where a^gamma_eps and
/// a(gamma) coincide on every cell are skipped since their terms cancel.
PatchedSums patched_riesz_sums(const Lattice& lat, const MatrixField& a, double eps, int k,
                               const FieldConstants& fc, const PatchedOptions& opt = {});

}  // namespace carnot
