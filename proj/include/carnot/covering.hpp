#pragma once
/// Dilated lattice coverings with a square partition of unity.
///
/// The base net is the coordinate lattice Z^d. Every point lies within
/// gauge distance 0.95 of a lattice point (round coordinates stratum by
/// stratum), and distinct lattice points are at distance >= 1, so the raw
/// bumps below are 1 at their own center and 0 at every other center.

#include "carnot/fields.hpp"

#include <map>
#include <memory>
#include <vector>

namespace carnot {

struct MultiplicityAudit {
  std::vector<double> C;         ///< tested radii multipliers
  std::vector<int> multiplicity;  ///< max #{gamma : rho(gamma^{-1}x) < C eps} over samples
  double M = 0.0;                 ///< smallest M with multiplicity <= (M C)^Q for every C
  int Q = 0;
  int samples = 0;
  bool monotone = true;
};

class CoveringSystem {
 public:
  using Key = std::vector<long>;

  /// Throws EmptyBox.
  static CoveringSystem build(std::shared_ptr<const Group> g, double eps, const Box& extent);

  double eps() const { return eps_; }
  const Box& extent() const { return extent_; }
  const Group& group() const { return *g_; }

  /// delta_eps(gamma) for a base lattice point.
  Vec center(const Key& k) const;
  /// Base lattice points gamma with rho(gamma^{-1} delta_eps^{-1} x) < R.
  std::vector<Key> near(const Vec& x, double R) const;
  /// (gamma, eta^gamma_eps(x)) for every bump that is nonzero at x.
  std::vector<std::pair<Key, double>> eta(const Vec& x) const;
  double eta(const Key& k, const Vec& x) const;
  /// Centers whose bumps are nonzero somewhere on the probe points.
  std::vector<Key> centers(const std::vector<Vec>& probes) const;

  MultiplicityAudit multiplicity(const std::vector<double>& C, int samples, Rng& rng) const;

  /// Unnormalized profile as a function of the base-scale gauge distance.
  static double profile(double r) { return smooth_cutoff(r, 0.5, 0.95); }
  static constexpr double support_radius = 0.95;

 private:
  std::shared_ptr<const Group> g_;
  double eps_ = 1.0;
  Box extent_;
};

}  // namespace carnot
