#pragma once
// Middle-perversity support and cosupport conditions in three equivalent
// characterizations, plus the equivalence and restriction verifiers.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "persheaf/derived.hpp"
#include "persheaf/sheaf.hpp"

namespace persheaf {

// Degrees scanned by every "for all k" condition; all tables provably vanish
// outside [lo - #strata - 1, hi + max cell dim + 1].
std::pair<int, int> perversity_scan_window(const SheafComplex& a);

// supp^k: closure of the cells with nonzero stalk H^k.
CellSet supp_set(const SheafComplex& a, int k);
// cosupp^k: closure of the cells whose point costalk (poset costalk shifted
// by cell_dim) is nonzero in degree k.
CellSet cosupp_set(const SheafComplex& a, int k);

struct PerversityWitness {
  std::string condition;  // "S1", "C1", "S2", "C2", "newS", "newC"
  std::string place;      // cell, stratum, or filtration level
  int degree = 0;
  int dimension = 0;  // offending dimension (set or cohomology)
};

struct ConditionVerdict {
  bool pass = true;
  std::vector<PerversityWitness> witnesses;
};

// Each checker refuses non-constructible input (std::invalid_argument):
// the conditions are only meaningful when stalk cohomology is locally
// constant along strata.
ConditionVerdict check_S1(const SheafComplex& a);  // dim supp^{-k} <= k
ConditionVerdict check_C1(const SheafComplex& a);  // dim cosupp^k <= k
ConditionVerdict check_S2(const SheafComplex& a);  // stalks vanish above -pdim(S)
ConditionVerdict check_C2(const SheafComplex& a);  // shriek stalks vanish below -pdim(S)
ConditionVerdict check_new_support(const SheafComplex& a);    // on U^m, above -m
ConditionVerdict check_new_cosupport(const SheafComplex& a);  // on L^m, below -m

struct PerversityReport {
  bool constructible = true;
  bool geometric = false;
  bool applicable = true;  // false when the method's precondition fails
  std::string notice;      // set when not applicable
  std::string method;
  int k_lo = 0, k_hi = 0;
  bool pass = false;
  std::map<std::string, ConditionVerdict> verdicts;
  std::map<int, std::vector<std::string>> supp;    // nonempty sets only
  std::map<int, std::vector<std::string>> cosupp;
};
// method: "stalkwise" (S1/C1; needs the geometric flag), "stratum" (S2/C2),
// "filtration" (newS/newC), or "all".
PerversityReport perversity_report(const SheafComplex& a, const std::string& method);

struct LemmaReport {
  bool constructible = true;
  bool support_agrees = true;   // verdict(S2) == verdict(newS)
  bool cosupport_agrees = true; // verdict(C2) == verdict(newC)
  bool pass = true;
  ConditionVerdict s2, new_s, c2, new_c;  // computed on the merged base
};
// Merges strata by dimension, then checks both equivalences of verdicts.
LemmaReport verify_lemma_equivalence(const SheafComplex& a);

struct PropositionRow {
  int degree = 0;
  int dim_whole = 0;    // dim ℍ^k(X)
  int dim_open = 0;     // dim ℍ^k(U^{m+1})
  int rank = 0;         // rank of the induced map
  bool iso_required = false;
  bool inj_required = false;
  bool ok = true;
};
struct PropositionReport {
  bool hypothesis_ok = true;  // constructible and C2 passes
  bool pass = true;
  int m = 0;
  std::vector<PropositionRow> rows;
  std::string detail;
};
// Restriction to U^{m+1} is iso on ℍ^k for k <= -m-2 and injective at -m-1,
// provided the cosupport condition holds.
PropositionReport verify_proposition(const SheafComplex& a, int m);

struct RemarkReport {
  bool applicable = true;   // geometric flag present
  bool containment = true;  // cosupp^k ⊆ L^k for all k
  bool c2_pass = true;
  bool agree = true;        // containment verdict equals C2 verdict
  bool pass = true;
  std::vector<PerversityWitness> witnesses;
};
RemarkReport verify_remark_containment(const SheafComplex& a);

}  // namespace persheaf
