#pragma once
// Bounded complexes of cellular sheaves on a stratified poset: one cochain
// complex per cell, one chain map per covering relation, functorial.
// All stalks share one degree window [lo, lo+width) so cellwise operations
// stay aligned.

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "persheaf/linalg.hpp"
#include "persheaf/poset.hpp"

namespace persheaf {

struct SheafData {
  PosetPtr base;
  int lo = 0;
  int width = 1;  // >= 1
  // dims[cell][i], diff[cell][i] : degree lo+i -> lo+i+1 (width-1 entries)
  std::vector<std::vector<int>> dims;
  std::vector<std::vector<RatMatrix>> diff;
  // res[cover][i] : A(face)^{lo+i} -> A(coface)^{lo+i} (width entries)
  std::vector<std::vector<RatMatrix>> res;
  uint64_t uid = 0;
};

class SheafComplex {
 public:
  SheafComplex() = default;
  explicit SheafComplex(std::shared_ptr<const SheafData> d) : data_(std::move(d)) {}

  const SheafData& data() const { return *data_; }
  const PosetPtr& base() const { return data_->base; }
  uint64_t uid() const { return data_->uid; }
  int lo() const { return data_->lo; }
  int hi() const { return data_->lo + data_->width - 1; }
  int width() const { return data_->width; }
  int dim_at(int cell, int k) const;
  RatMatrix diff_at(int cell, int k) const;
  RatMatrix res_at(int cover, int k) const;
  CochainComplex stalk(int cell) const;
  bool engaged() const { return static_cast<bool>(data_); }

 private:
  std::shared_ptr<const SheafData> data_;
};

// Cellwise maps commuting with all restrictions; components share the window
// [lo, lo+width) of whichever sheaf is wider.
struct SheafMap {
  SheafComplex source, target;
  int lo = 0;
  int width = 1;
  std::vector<std::vector<RatMatrix>> comp;  // [cell][i]

  RatMatrix comp_at(int cell, int k) const;
  void validate() const;  // throws on a broken square
};

SheafComplex make_sheaf(PosetPtr base, int lo, int width,
                        std::vector<std::vector<int>> dims,
                        std::vector<std::vector<RatMatrix>> diff,
                        std::vector<std::vector<RatMatrix>> res);

std::vector<ValidationIssue> validate_sheaf(const SheafComplex& a);

struct ConstructibilityWitness {
  int cover;
  int degree;
  std::string detail;
};
struct ConstructibilityReport {
  bool pass = true;
  std::vector<ConstructibilityWitness> witnesses;
};
// Local constancy of cohomology along strata: every within-stratum covering
// relation induces isomorphisms on stalk cohomology.
ConstructibilityReport check_constructible(const SheafComplex& a);

SheafComplex zero_sheaf(PosetPtr p);
SheafComplex constant_sheaf(PosetPtr p, int n_shift, int rank = 1);
// Stalk c on the down-set z, zero outside.
SheafComplex skyscraper(PosetPtr p, const CellSet& z, const CochainComplex& c);
SheafComplex shift_sheaf(const SheafComplex& a, int n);
SheafComplex direct_sum(const SheafComplex& a, const SheafComplex& b);
SheafComplex cone_of(const SheafMap& f);
SheafComplex truncate_leq(const SheafComplex& a, int k);

SheafMap zero_sheaf_map(const SheafComplex& a, const SheafComplex& b);
SheafMap scalar_sheaf_map(const SheafComplex& a, const Rat& v);

// Sheaf on the induced sub-poset of the up-set v (cells matched by id).
SheafComplex restrict_sheaf(const SheafComplex& a, PosetPtr subposet);

// Derived pushforward along the open inclusion of a's base into p: the stalk
// at x is the sections complex of a over U_x ∩ V, restrictions are the nerve
// projections. a's base must be the induced sub-poset of the up-set v ⊆ p.
SheafComplex pushforward_open(const SheafComplex& a, PosetPtr p, const CellSet& v);

// Unit map constant(p, n) -> pushforward_open(constant on v, p): each stalk
// generator goes to the constant 0-cochain over U_x ∩ V.
SheafMap constant_to_pushforward_unit(PosetPtr p, const CellSet& v, int n_shift);

// Iterated pushforward/truncation across the dimension filtration, seeded by
// a trivial rank-r local system in degree -n on the open stratum. p must have
// pairwise distinct stratum dimensions (merge first).
SheafComplex deligne_ic(PosetPtr p, int rank = 1);

// Deterministic generator of constructible complexes (pieces: shifted
// constants, skyscrapers on closed unions of strata, pushforwards from the
// open filtration, rank-1 intersection complexes; combined by sums, cones,
// shifts). size = number of elementary pieces; size 0 gives the zero sheaf.
SheafComplex random_constructible(PosetPtr p, uint64_t seed, int size);

// Same sheaf data transplanted onto another poset with identical cells and
// covers (strata may differ, e.g. after merge_strata_by_dimension).
SheafComplex rebase_sheaf(const SheafComplex& a, PosetPtr p);

}  // namespace persheaf
