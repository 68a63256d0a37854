#pragma once
/// Grid discretization of L_2(G) on [-L, L]^d with Dirichlet truncation.
///
/// Nodes: x_i = (i - c) h per axis, i = 0..N-1, c = N/2 (floor), h = L/c.
/// Derivatives are forward differences f(p+e_m) - f(p) over h, landing on
/// an output grid of (N+1)^d cells p in {-1..N-1}^d with f extended by zero.
/// Cells are located at node(p) + h/2 in every axis and every multiplier
/// acting after a derivative is sampled there. Both grids carry the counting
/// measure times h^d, so adjoints are transposes.

#include "carnot/fields.hpp"

#include <memory>
#include <vector>

namespace carnot {

/// n1 x n1 matrix-valued function; constant outside the ball rho <= radius.
struct MatrixField {
  std::string name;
  int n1 = 0;
  std::function<Mat(const Vec&)> eval;
  double constancy_radius = 0.0;

  Mat operator()(const Vec& x) const { return eval(x); }
  static MatrixField constant(const Mat& A, std::string name = "constant");
};

class Lattice {
 public:
  /// Throws CapExceeded when N^d > cap, BadGrid when N < 3.
  Lattice(std::shared_ptr<const Group> g, int N, double L, int cap = 5000);

  const Group& group() const { return *g_; }
  std::shared_ptr<const Group> group_ptr() const { return g_; }
  int dim() const { return d_; }
  int N() const { return N_; }
  double L() const { return L_; }
  double h() const { return h_; }
  int cap() const { return cap_; }
  int n() const { return n_; }   ///< nodes
  int m() const { return m_; }   ///< cells
  double cell_volume() const { return std::pow(h_, d_); }
  /// Index of the origin node.
  int origin() const;

  std::vector<int> node_multi(int idx) const;
  int node_index(const std::vector<int>& multi) const;  ///< -1 outside
  Vec node(int idx) const;
  Vec cell(int idx) const;
  const std::vector<Vec>& nodes() const { return nodes_; }
  const std::vector<Vec>& cells() const { return cells_; }

  Vec sample(const ScalarFn& f) const;       ///< at nodes
  Vec sample_cells(const ScalarFn& f) const;  ///< at cells
  SpMat mult(const ScalarFn& f) const;
  SpMat mult_cells(const ScalarFn& f) const;

  /// Forward difference along axis a: cells x nodes.
  SpMat partial(int a) const;
  /// X_k = sum_m (Z_k)_m(cell) d_m.
  SpMat field(int k) const;
  /// X^w_k = sum_j M_{w_jk} X_j.
  SpMat twisted_field(const MatrixField& w, int k) const;
  std::vector<SpMat> twisted_fields(const MatrixField& w) const;
  /// sum_k X_k^T X_k.
  SpMat sub_laplacian() const;
  SpMat twisted_laplacian(const MatrixField& w) const;

  /// Node-to-node matrix of lambda_x f(y) = f(x^{-1} y). Throws
  /// NonRepresentableShift unless x^{-1} maps nodes onto nodes.
  SpMat left_translation(const Vec& x) const;

  /// Tensor cubic (Keys) interpolation weights of node data at a point;
  /// nodes outside the grid read as zero.
  std::vector<std::pair<int, double>> interpolation_weights(const Vec& x) const;
  double interpolate(const Vec& values, const Vec& x) const;

  /// Throws CapExceeded when dense routines would exceed the cap.
  void require_dense() const;

 private:
  std::shared_ptr<const Group> g_;
  int d_, N_, c_, n_, m_, cap_;
  double L_, h_;
  std::vector<Vec> nodes_, cells_;
};

/// Largest |w(x)|_2 and |w(x)^{-1}|_2 over the given points.
double sup_norm(const MatrixField& w, const std::vector<Vec>& pts);
double sup_inverse_norm(const MatrixField& w, const std::vector<Vec>& pts);

/// R^w_k = X^w_k L_w^{-1/2} for every k, sharing one inverse square root.
struct RieszFamily {
  SpMat Lw;
  Mat inv_sqrt_Lw;
  std::vector<Mat> R;  ///< cells x nodes
};
/// Uses the eigendecomposition unless `quadrature` is set. Throws
/// CapExceeded and NotPositiveDefinite.
RieszFamily quasi_riesz(const Lattice& lat, const MatrixField& w, bool quadrature = false);

/// T^{-1/2} v for sparse SPD T by the same quadrature as inv_sqrt, with a
/// sparse factorization per node.
Vec inv_sqrt_apply(const SpMat& T, const Vec& v);

}  // namespace carnot
