#pragma once
// Versioned JSON document carrying a stratified poset and optionally a sheaf
// complex on it, plus the JSON renderings of the report types. Parsing is
// strict: unknown fields are rejected, all rationals are exact strings.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "persheaf/perversity.hpp"
#include "persheaf/poset.hpp"
#include "persheaf/sheaf.hpp"

namespace persheaf {

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Parsed but not yet validated content. The poset is finalized; its validity
// and the sheaf's mathematical coherence are checked separately so callers
// can distinguish malformed files from invalid ones.
struct Document {
  StratifiedPoset poset;
  bool has_sheaf = false;
  int lo = 0;
  int width = 1;
  // keyed by cell id / cover position; absent entries mean zero
  std::map<std::string, std::map<int, int>> dims;
  std::map<std::string, std::map<int, RatMatrix>> diff;
  std::vector<std::map<int, RatMatrix>> res;
};

Document parse_document(const std::string& text);  // throws ParseError

// Assembles the sheaf on an already-validated base.
SheafComplex sheaf_from_document(const Document& d, PosetPtr base);

// Canonical dump: fixed key order, cells and covers in poset order, nonzero
// entries only, two-space indent, trailing newline. Byte-stable.
std::string dump_document(const StratifiedPoset& p, const SheafComplex* a);

// Report renderings (canonical JSON, byte-stable).
std::string issues_json(const std::vector<ValidationIssue>& poset_issues,
                        const std::vector<ValidationIssue>& sheaf_issues,
                        const ConstructibilityReport* constructibility);
std::string perversity_report_json(const PerversityReport& r);
std::string lemma_report_json(const LemmaReport& r);
std::string proposition_report_json(const PropositionReport& r);

std::string perversity_report_text(const PerversityReport& r);
std::string lemma_report_text(const LemmaReport& r);
std::string proposition_report_text(const PropositionReport& r);

}  // namespace persheaf
