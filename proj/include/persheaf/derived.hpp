#pragma once
// Derived-functor computations on the nerve: sections over opens, stalks,
// costalks, sections supported on closed sets, hypercohomology, canonical
// restriction maps, and the excision long exact sequence.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "persheaf/linalg.hpp"
#include "persheaf/poset.hpp"
#include "persheaf/sheaf.hpp"

namespace persheaf {

// Strict chains x_0 < ... < x_p inside a fixed cell set, grouped by length
// and sorted lexicographically by cell index within each group.
struct ChainTable {
  std::vector<std::vector<std::vector<int>>> by_len;  // [p][i] = chain of p+1 cells
  int max_p() const { return static_cast<int>(by_len.size()) - 1; }
  int find(int p, const std::vector<int>& chain) const;  // -1 if absent
};

// Cached per (poset uid, V).
std::shared_ptr<const ChainTable> chains_for(const StratifiedPoset& p, const CellSet& v);

// Layout of the nerve total complex: for each degree, the list of
// (p, chain position, q) blocks in canonical order with offsets.
struct SectionsBlock {
  int p;
  int chain;  // index into ChainTable::by_len[p]
  int q;
  int dim;
  int offset;
};
struct SectionsLayout {
  int lo = 0;                       // lowest total degree
  std::vector<std::vector<SectionsBlock>> blocks;  // per degree
  std::vector<int> dims;
  int degree_count() const { return static_cast<int>(dims.size()); }
};

// Total complex of C^{p,q} = ⊕_{chains x_0<...<x_p in V, min ∈ Z} A^q(x_p).
// Z = V gives RΓ(V; A); general down-sets Z give the sections supported on Z,
// i.e. the kernel of RΓ(V) -> RΓ(V \ Z).
CochainComplex sections_complex_supported(const SheafComplex& a, const CellSet& v,
                                          const CellSet& z,
                                          SectionsLayout* layout_out = nullptr);
CochainComplex sections_complex(const SheafComplex& a, const CellSet& v,
                                SectionsLayout* layout_out = nullptr);

CohomologyTable stalk_cohomology(const SheafComplex& a, int x);
// Kernel-complex model of the costalk: chains starting at x.
CochainComplex costalk_complex(const SheafComplex& a, int x);
CohomologyTable costalk_cohomology(const SheafComplex& a, int x);
// Costalk shifted by cell_dim(x): the costalk at a point inside the open cell.
CohomologyTable point_costalk_cohomology(const SheafComplex& a, int x);

// Stalk at x of the sections supported on the down-set z: H^k = H^k_z(U_x; A).
CochainComplex supported_sections(const SheafComplex& a, int x, const CellSet& z);
CohomologyTable supported_sections_cohomology(const SheafComplex& a, int x,
                                              const CellSet& z);

// Per-cell tables of the shriek restriction to a stratum:
// stalk at x ∈ S is supported_sections(x, closure(S)).
std::map<int, CohomologyTable> shriek_restriction_table(const SheafComplex& a,
                                                        int stratum);

CohomologyTable hypercohomology(const SheafComplex& a, const CellSet& v);
CohomologyTable hypercohomology(const SheafComplex& a);  // whole space

// Degreewise projection of nerve complexes for V ⊆ W (a strict surjection).
ChainMap restriction_map(const SheafComplex& a, const CellSet& v, const CellSet& w);

struct ExcisionSlot {
  int degree;
  bool exact_middle;      // at H^k of the Z-supported term
  bool exact_boundary;    // at H^k(quotient) -> H^{k+1}(Z'-supported term)
};
struct ExcisionReport {
  bool pass = true;
  bool composite_zero = true;
  std::vector<ExcisionSlot> slots;
  std::string detail;
};
// Long exact sequence of 0 -> Γ_{Z'} -> Γ_Z -> Γ_{Z∖Z'} on V∖Z' -> 0 over
// V = U_x (or the whole space), verified by rank bookkeeping.
ExcisionReport excision_les_check(const SheafComplex& a, std::optional<int> x,
                                  const CellSet& z_small, const CellSet& z_big);

struct VanishingReport {
  bool hypothesis_holds = true;
  bool conclusion_holds = true;
  bool pass = true;
  int witness_degree = 0;  // meaningful when a side fails
};
// If every stalk over V vanishes in degrees < k, sections over V vanish there too.
VanishingReport vanishing_propagation_check(const SheafComplex& a, const CellSet& v,
                                            int k);

// Bounded memo caches (chain tables and supported-section cohomology).
void set_memo_limit(std::size_t entries);
std::size_t memo_limit();
void clear_memo();

}  // namespace persheaf
