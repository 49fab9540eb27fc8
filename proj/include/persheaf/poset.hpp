#pragma once
// Finite stratified face posets. Open sets are up-sets (Alexandrov topology);
// U_x = { y : y >= x } is the minimal open set of a cell.

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace persheaf {

struct Cell {
  std::string id;
  int cell_dim = 0;
  std::string stratum;
};

struct Stratum {
  std::string id;
  int pdim = 0;
};

// Bitset over the cells of one poset.
class CellSet {
 public:
  CellSet() = default;
  explicit CellSet(int n) : n_(n), bits_((n + 63) / 64, 0) {}
  int size() const { return n_; }
  bool test(int i) const { return (bits_[i >> 6] >> (i & 63)) & 1; }
  void set(int i) { bits_[i >> 6] |= (uint64_t{1} << (i & 63)); }
  void reset(int i) { bits_[i >> 6] &= ~(uint64_t{1} << (i & 63)); }
  int count() const;
  bool empty() const { return count() == 0; }
  bool contains(const CellSet& o) const;  // o ⊆ *this
  CellSet intersect(const CellSet& o) const;
  CellSet unite(const CellSet& o) const;
  CellSet minus(const CellSet& o) const;
  bool operator==(const CellSet& o) const { return n_ == o.n_ && bits_ == o.bits_; }
  bool operator<(const CellSet& o) const;  // for map keys
  const std::vector<uint64_t>& words() const { return bits_; }

 private:
  int n_ = 0;
  std::vector<uint64_t> bits_;
};

struct ValidationIssue {
  std::string kind;
  std::string detail;
};

class StratifiedPoset {
 public:
  // Data as given; call finalize() once before use.
  std::vector<Cell> cells;
  std::vector<Stratum> strata;
  std::vector<std::pair<int, int>> covers;  // (face index, coface index)
  bool geometric = false;

  // Resolves indices and computes the order; safe on invalid data (validation
  // then reports instead of using the order).
  void finalize();
  std::vector<ValidationIssue> validate() const;
  bool is_valid() const;

  uint64_t uid() const { return uid_; }
  int cell_count() const { return static_cast<int>(cells.size()); }
  int cell_index(const std::string& id) const;  // -1 if unknown
  int stratum_index(const std::string& id) const;
  int stratum_of(int cell) const { return cell_stratum_.at(cell); }
  int pdim_of_cell(int cell) const { return strata[cell_stratum_.at(cell)].pdim; }
  int max_pdim() const;
  int max_cell_dim() const;
  bool order_ok() const { return order_ok_; }

  bool leq(int a, int b) const;  // a <= b
  CellSet up_set(int x) const;   // U_x
  CellSet down_set(int x) const;
  CellSet all_cells() const;
  CellSet empty_set() const { return CellSet(cell_count()); }
  CellSet closure(const CellSet& a) const;
  bool is_up_set(const CellSet& a) const;
  bool is_down_set(const CellSet& a) const;
  CellSet filtration_upper(int m) const;  // cells in strata of pdim >= m
  CellSet filtration_lower(int m) const;  // pdim <= m
  int set_dimension(const CellSet& a) const;  // max pdim met; -1 on empty
  std::vector<std::string> ids_of(const CellSet& a) const;
  CellSet set_of_ids(const std::vector<std::string>& ids) const;

 private:
  uint64_t uid_ = 0;
  bool finalized_ = false;
  bool order_ok_ = false;
  std::vector<int> cell_stratum_;
  std::vector<CellSet> up_, down_;
  friend StratifiedPoset merge_strata_by_dimension(const StratifiedPoset& p);
};

using PosetPtr = std::shared_ptr<const StratifiedPoset>;

// One stratum per pdim; merged strata are named "d<pdim>".
StratifiedPoset merge_strata_by_dimension(const StratifiedPoset& p);

// Sub-poset induced on an up-set V (cell ids preserved; strata table kept).
StratifiedPoset induced_subposet(const StratifiedPoset& p, const CellSet& v);

PosetPtr finalize_shared(StratifiedPoset p);  // finalize + require validity

}  // namespace persheaf
