#pragma once
/// Coordinate atlases whose charts land in the group, their transitions and
/// the cocycle audit of the admissibility matrices.
///
/// Atlas files:
///
///     group heisenberg1.grp          # relative to the atlas file
///     chart U1
///       domain -2 2 -2 2 -3 3        # lo/hi per axis of the model space
///       map identity
///     chart U2
///       domain -1 3 -2 2 -3 3
///       map automorphism 2 1 0 | 0 1 0 | 0 0 2   # rows
///       map translation 1 0 0        # further map lines compose on the left
///     overlap U1 U2                  # optional box: overlap U1 U2 box ...
///
/// Map kinds: identity, automorphism (rows split by '|'), linear,
/// translation, dilation r, polynomial "c1 ; c2 ; ..." in x1..xd.

#include "carnot/diffeo.hpp"

#include <memory>
#include <string>
#include <vector>

namespace carnot {

struct Chart {
  std::string name;
  Box domain;   ///< U_i in the model space
  SmoothMap h;  ///< U_i -> G, with inverse
};

class ChartAtlas {
 public:
  ChartAtlas(std::shared_ptr<const Group> g, std::vector<Chart> charts,
             std::vector<std::pair<int, int>> overlaps, std::vector<Box> overlap_boxes);

  const Group& group() const { return *g_; }
  std::shared_ptr<const Group> group_ptr() const { return g_; }
  const std::vector<Chart>& charts() const { return charts_; }
  int size() const { return static_cast<int>(charts_.size()); }
  int index(const std::string& name) const;

  /// Phi_{i,j} = h_j o h_i^{-1}, defined on h_i(U_i n U_j).
  SmoothMap transition(int i, int j) const;
  /// Sampling box of U_i n U_j in the model space (declared or intersection).
  Box overlap(int i, int j) const;
  const std::vector<std::pair<int, int>>& overlaps() const { return overlaps_; }
  /// Model-space points in U_i n U_j (n U_k when k >= 0).
  std::vector<Vec> overlap_samples(int i, int j, int k, int n, Rng& rng) const;

 private:
  std::shared_ptr<const Group> g_;
  std::vector<Chart> charts_;
  std::vector<std::pair<int, int>> overlaps_;
  std::vector<Box> boxes_;
};

ChartAtlas parse_atlas_text(const std::string& text, const std::string& base_dir);
ChartAtlas parse_atlas_file(const std::string& path);
/// Map specification shared by atlas files and the CLI.
SmoothMap parse_map_spec(const StratifiedAlgebra& alg, const std::string& spec);

struct TransitionAudit {
  int i = 0, j = 0;
  DiffeoReport diffeo;
};

struct AtlasReport {
  std::vector<TransitionAudit> transitions;
  double pairwise_residual = 0.0;  ///< max |H_ji H_ij - I|_2 on first blocks
  double triple_residual = 0.0;
  int pairwise_samples = 0;
  int triple_samples = 0;
  int triples = 0;
  double tol = 0.0;
  std::vector<std::string> failures;
  bool pass() const { return failures.empty(); }
};

AtlasReport verify_atlas(const ChartAtlas& atlas, int samples, Rng& rng, double tol = 1e-8);

}  // namespace carnot
