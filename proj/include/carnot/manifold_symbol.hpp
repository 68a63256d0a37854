#pragma once
/// Chart transfer of formal elements and the assembly of bundle sections
/// from chart-local symbols over an atlas.
///
/// A ChartElement is a formal element whose multipliers are functions on the
/// model space, living in chart i. Rest moves it to the group through h_i,
/// Ext moves a group element back. Scalar names record the transfer as
/// "f>U1" (f o h_1^{-1}) and "g<U1" (g o h_1); a transfer that undoes the
/// previous one pops the suffix, so Ext(Rest(e)) is canonically e.

#include "carnot/atlas.hpp"
#include "carnot/symbol.hpp"

#include <memory>
#include <vector>

namespace carnot {

struct ChartElement {
  int chart = 0;
  FormalElement e;
};

/// A word is supported in a region when its first and last letters are
/// multipliers with declared supports inside it. Throws SupportLeak.
FormalElement rest(const ChartAtlas& atlas, const ChartElement& t, Alphabet& alph);
/// Throws SupportLeak when the pulled-back supports leave U_i.
ChartElement ext(const ChartAtlas& atlas, int chart, const FormalElement& e, Alphabet& alph);

/// Theta_i of the local symbol: p -> sym(Rest(T))(h_i(p)) in chart i's trivialization.
SymbolSection local_symbol(const ChartAtlas& atlas, const ChartElement& t, Alphabet& alph);

/// pi_{i,j}(p): letters (k, A) -> (k, H^{Phi_ij}(h_i(p)) A).
FiberElement transition_action(const ChartAtlas& atlas, int i, int j, const Vec& p, const FiberElement& f);

class BundleSection {
 public:
  BundleSection(std::shared_ptr<const ChartAtlas> atlas, std::vector<SymbolSection> F)
      : atlas_(std::move(atlas)), F_(std::move(F)) {}

  const ChartAtlas& atlas() const { return *atlas_; }
  FiberElement operator()(int chart, const Vec& p) const { return F_.at(chart)(p); }
  /// Max over declared overlaps (both orders) of fiber_distance(F_j, pi_ij F_i).
  double compatibility(int samples, Rng& rng) const;
  /// Max total coefficient weight over chart samples.
  double norm_proxy(int samples, Rng& rng) const;

 private:
  std::shared_ptr<const ChartAtlas> atlas_;
  std::vector<SymbolSection> F_;
};

struct GlobalizeOptions {
  int samples = 200;
  double partition_tol = 1e-10;
  double compat_tol = 1e-8;
};

/// F_j(p) = sum_k phi_k(p) pi_{k,j}(p) sum_i pi_{i,k}(p) s_i(p), with s_i the
/// local symbol of piece i. Throws PartitionGap when sum phi_k != 1 or a phi_k
/// is nonzero off U_k at a sample, IncompatibleSection when the assembled
/// section fails compatibility.
BundleSection globalize(std::shared_ptr<const ChartAtlas> atlas, const std::vector<ChartElement>& pieces,
                        const std::vector<ScalarFn>& partition, Alphabet& alph, Rng& rng,
                        const GlobalizeOptions& opt = {});

}  // namespace carnot
