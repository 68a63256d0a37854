#pragma once
/// G-diffeomorphism certification by sampling, the admissibility matrix
/// H^Phi(x), and localization of a diffeomorphism near a point.

#include "carnot/automorphism.hpp"
#include "carnot/fields.hpp"

#include <string>
#include <vector>

namespace carnot {

/// Euclidean coordinates of X_1(x),...,X_{n1}(x); they span F(x).
std::vector<Vec> F_basis(const Group& g, const Vec& x);

struct DiffeoReport {
  std::string name;
  int samples = 0;
  double tol = 0.0;
  /// Worst normalized higher-layer component of Phi_*(X_k) in the frame at Phi(x).
  double residual_pushforward = 0.0;
  /// Worst normalized distance of J_Phi(x) h_k(x) from F(Phi(x)).
  double residual_subspace = 0.0;
  bool pass_pushforward = false;
  bool pass_subspace = false;
  Vec worst_point;

  bool pass() const { return pass_pushforward && pass_subspace; }
  bool agree() const { return pass_pushforward == pass_subspace; }
};

/// Evaluates both characterizations at every sample. Throws
/// InverseUnavailable when phi has no inverse.
DiffeoReport check_G_diffeomorphism(const Group& g, const SmoothMap& phi,
                                    const std::vector<Vec>& samples, double tol = 1e-7);

/// Random sample points with first-stratum coordinates in [-s,s].
std::vector<Vec> sample_points(const Group& g, Rng& rng, int n, double s = 1.0);

/// E(Phi(x))^{-1} J_Phi(x) E(x), the Jacobian written in the left-invariant
/// frames at both ends. Its first block is (X_j Phi_i(x)).
Mat frame_jacobian(const Group& g, const SmoothMap& phi, const Vec& x);

/// First block (X_j Phi_i(x))_{i,j <= n1}.
Mat horizontal_jacobian(const Group& g, const SmoothMap& phi, const Vec& x);

/// H^Phi(x): the horizontal Jacobian extended through the brackets.
/// Throws NotAdmissible when the extension or automorphism check fails.
Mat admissibility_matrix(const Group& g, const SmoothMap& phi, const Vec& x, double tol = 1e-8);

/// A map that passed check_G_diffeomorphism, with H^Phi on demand.
class CertifiedDiffeo {
 public:
  /// Throws NotCertified when either criterion fails.
  static CertifiedDiffeo certify(const Group& g, const SmoothMap& phi,
                                 const std::vector<Vec>& samples, double tol = 1e-7);

  const SmoothMap& map() const { return map_; }
  const DiffeoReport& report() const { return report_; }
  Mat H(const Vec& x) const { return admissibility_matrix(*g_, map_, x); }
  Vec operator()(const Vec& x) const { return map_(x); }
  Vec inverse(const Vec& y) const { return map_.inverse()(y); }
  /// Phi o Psi, certified on psi's samples.
  CertifiedDiffeo compose(const CertifiedDiffeo& psi) const;

 private:
  std::shared_ptr<const Group> g_;
  SmoothMap map_;
  DiffeoReport report_;
  std::vector<Vec> samples_;
};

struct LocalizedDiffeo {
  SmoothMap map;  ///< equals phi on B(xi, r1), affine outside B(xi, r2)
  Vec xi;
  double r1 = 0.0, r2 = 0.0;
  int halvings = 0;
  double min_det_ratio = 0.0;  ///< min det J over samples / det J_phi(xi)
};

/// Phi_xi = psi Phi + (1 - psi) T with T the tangent affine map at xi and
/// psi = 1 on B(xi, r), 0 off B(xi, 2r). r starts at r0 and is halved until
/// det J stays at least half of det J_phi(xi) on samples. Throws
/// DegenerateJacobian when det J_phi(xi) vanishes or no radius works.
LocalizedDiffeo localize_diffeomorphism(const Group& g, const SmoothMap& phi, const Vec& xi,
                                        Rng& rng, double r0 = 1.0, int samples = 200);

}  // namespace carnot
