#pragma once
/// Bundled fixtures: file locations and the in-code corpora shared by the
/// CLI and the acceptance suite.

#include "carnot/lattice.hpp"
#include "carnot/smooth_map.hpp"

#include <memory>
#include <string>
#include <vector>

namespace carnot {

/// Directory of the bundled fixture files (CARNOT_FIXTURE_DIR at build time,
/// overridable through the environment variable of the same name).
std::string fixture_dir();
/// fixture_dir()/name unless name already names an existing file.
std::string fixture_path(const std::string& name);

struct LabeledMap {
  SmoothMap map;
  bool g_diffeo = false;  ///< expected verdict
};

/// Maps on the first Heisenberg group: translations, a dilation, strata
/// automorphisms, compositions and a contact shear, next to right
/// translations and linear or polynomial maps that break the first layer.
std::vector<LabeledMap> diffeo_corpus(const StratifiedAlgebra& heisenberg1);

/// Matrix fields with 2 x 2 first blocks, constant multiples of the
/// identity first.
std::vector<MatrixField> norm_bound_corpus();

/// a(x) = I + s cut(rho(x)/R) B with B = [0.6 0.8; -0.4 0.2], cut = 1 at 0
/// and 0 from 1 on, so a is constant outside rho <= R.
MatrixField bump_perturbation(std::shared_ptr<const Group> g, double s = 0.05, double R = 3.0);

}  // namespace carnot
