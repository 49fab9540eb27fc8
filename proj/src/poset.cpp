#include "persheaf/poset.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <set>
#include <stdexcept>

namespace persheaf {

namespace {
std::atomic<uint64_t> next_uid{1};
}

int CellSet::count() const {
  int n = 0;
  for (uint64_t w : bits_) n += std::popcount(w);
  return n;
}

bool CellSet::contains(const CellSet& o) const {
  for (size_t i = 0; i < bits_.size(); ++i)
    if ((o.bits_[i] & ~bits_[i]) != 0) return false;
  return true;
}

CellSet CellSet::intersect(const CellSet& o) const {
  CellSet out(n_);
  for (size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = bits_[i] & o.bits_[i];
  return out;
}

CellSet CellSet::unite(const CellSet& o) const {
  CellSet out(n_);
  for (size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = bits_[i] | o.bits_[i];
  return out;
}

CellSet CellSet::minus(const CellSet& o) const {
  CellSet out(n_);
  for (size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = bits_[i] & ~o.bits_[i];
  return out;
}

bool CellSet::operator<(const CellSet& o) const {
  if (n_ != o.n_) return n_ < o.n_;
  return bits_ < o.bits_;
}

void StratifiedPoset::finalize() {
  uid_ = next_uid.fetch_add(1);
  finalized_ = true;
  int n = cell_count();
  cell_stratum_.assign(n, -1);
  std::map<std::string, int> sidx;
  for (size_t i = 0; i < strata.size(); ++i) sidx.emplace(strata[i].id, static_cast<int>(i));
  for (int i = 0; i < n; ++i) {
    auto it = sidx.find(cells[i].stratum);
    if (it != sidx.end()) cell_stratum_[i] = it->second;
  }

  // Topological check over covers, then reachability.
  order_ok_ = true;
  std::vector<std::vector<int>> above(n);
  for (const auto& [f, c] : covers) {
    if (f < 0 || f >= n || c < 0 || c >= n || f == c) {
      order_ok_ = false;
      return;
    }
    above[f].push_back(c);
  }
  std::vector<int> indeg(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j : above[i]) ++indeg[j];
  std::vector<int> topo;
  for (int i = 0; i < n; ++i)
    if (indeg[i] == 0) topo.push_back(i);
  for (size_t h = 0; h < topo.size(); ++h)
    for (int j : above[topo[h]])
      if (--indeg[j] == 0) topo.push_back(j);
  if (static_cast<int>(topo.size()) != n) {
    order_ok_ = false;
    return;
  }

  up_.assign(n, CellSet(n));
  down_.assign(n, CellSet(n));
  for (int i = 0; i < n; ++i) up_[i].set(i);
  // Process in reverse topological order so U_x = {x} ∪ ⋃ U_y over covers x ⋖ y.
  for (auto it = topo.rbegin(); it != topo.rend(); ++it)
    for (int j : above[*it]) up_[*it] = up_[*it].unite(up_[j]);
  for (int x = 0; x < n; ++x) {
    down_[x].set(x);
    for (int y = 0; y < n; ++y)
      if (up_[y].test(x)) down_[x].set(y);
  }
}

std::vector<ValidationIssue> StratifiedPoset::validate() const {
  std::vector<ValidationIssue> issues;
  if (!finalized_) {
    issues.push_back({"internal", "poset not finalized"});
    return issues;
  }
  std::set<std::string> seen;
  for (const auto& c : cells)
    if (!seen.insert(c.id).second)
      issues.push_back({"duplicate-cell", "cell id repeated: " + c.id});
  std::set<std::string> sseen;
  for (const auto& s : strata) {
    if (!sseen.insert(s.id).second)
      issues.push_back({"duplicate-stratum", "stratum id repeated: " + s.id});
    if (s.pdim < 0)
      issues.push_back({"negative-pdim", "stratum " + s.id + " has pdim < 0"});
  }
  for (int i = 0; i < cell_count(); ++i)
    if (cell_stratum_[i] < 0)
      issues.push_back({"unknown-stratum",
                        "cell " + cells[i].id + " names missing stratum " + cells[i].stratum});
  for (const auto& [f, c] : covers) {
    if (f < 0 || f >= cell_count() || c < 0 || c >= cell_count()) {
      issues.push_back({"bad-cover", "cover references a missing cell"});
      continue;
    }
    if (cells[f].cell_dim >= cells[c].cell_dim)
      issues.push_back({"cover-dimension",
                        "cover " + cells[f].id + " < " + cells[c].id +
                            " does not increase cell_dim"});
  }
  if (!order_ok_) {
    issues.push_back({"order-cycle", "covering relations contain a cycle"});
    return issues;  // order-dependent checks below need the order
  }
  if (std::any_of(issues.begin(), issues.end(),
                  [](const auto& i) { return i.kind == "unknown-stratum"; }))
    return issues;

  // Frontier condition: y < x in distinct strata forces pdim(stratum y) < pdim(stratum x).
  for (int x = 0; x < cell_count(); ++x)
    for (int y = 0; y < cell_count(); ++y) {
      if (x == y || !leq(y, x)) continue;
      if (cell_stratum_[y] == cell_stratum_[x]) continue;
      if (strata[cell_stratum_[y]].pdim >= strata[cell_stratum_[x]].pdim)
        issues.push_back({"frontier",
                          "cell " + cells[y].id + " < " + cells[x].id +
                              " but pdim(" + cells[y].stratum + ") >= pdim(" +
                              cells[x].stratum + ")"});
    }

  if (geometric) {
    for (size_t s = 0; s < strata.size(); ++s) {
      int maxd = -1;
      for (int i = 0; i < cell_count(); ++i)
        if (cell_stratum_[i] == static_cast<int>(s)) maxd = std::max(maxd, cells[i].cell_dim);
      if (maxd >= 0 && maxd != 2 * strata[s].pdim)
        issues.push_back({"geometric",
                          "stratum " + strata[s].id + " has max cell_dim " +
                              std::to_string(maxd) + " != 2*pdim"});
    }
  }
  return issues;
}

bool StratifiedPoset::is_valid() const { return validate().empty(); }

int StratifiedPoset::cell_index(const std::string& id) const {
  for (int i = 0; i < cell_count(); ++i)
    if (cells[i].id == id) return i;
  return -1;
}

int StratifiedPoset::stratum_index(const std::string& id) const {
  for (size_t i = 0; i < strata.size(); ++i)
    if (strata[i].id == id) return static_cast<int>(i);
  return -1;
}

int StratifiedPoset::max_pdim() const {
  int m = 0;
  for (const auto& s : strata) m = std::max(m, s.pdim);
  return m;
}

int StratifiedPoset::max_cell_dim() const {
  int m = 0;
  for (const auto& c : cells) m = std::max(m, c.cell_dim);
  return m;
}

bool StratifiedPoset::leq(int a, int b) const { return up_.at(a).test(b); }

CellSet StratifiedPoset::up_set(int x) const { return up_.at(x); }

CellSet StratifiedPoset::down_set(int x) const { return down_.at(x); }

CellSet StratifiedPoset::all_cells() const {
  CellSet s(cell_count());
  for (int i = 0; i < cell_count(); ++i) s.set(i);
  return s;
}

CellSet StratifiedPoset::closure(const CellSet& a) const {
  CellSet out(cell_count());
  for (int i = 0; i < cell_count(); ++i)
    if (a.test(i)) out = out.unite(down_[i]);
  return out;
}

bool StratifiedPoset::is_up_set(const CellSet& a) const {
  for (int i = 0; i < cell_count(); ++i)
    if (a.test(i) && !a.contains(up_[i])) return false;
  return true;
}

bool StratifiedPoset::is_down_set(const CellSet& a) const {
  for (int i = 0; i < cell_count(); ++i)
    if (a.test(i) && !a.contains(down_[i])) return false;
  return true;
}

CellSet StratifiedPoset::filtration_upper(int m) const {
  CellSet s(cell_count());
  for (int i = 0; i < cell_count(); ++i)
    if (pdim_of_cell(i) >= m) s.set(i);
  if (!is_up_set(s))
    throw std::runtime_error("upper filtration is not open (frontier violation)");
  return s;
}

CellSet StratifiedPoset::filtration_lower(int m) const {
  CellSet s(cell_count());
  for (int i = 0; i < cell_count(); ++i)
    if (pdim_of_cell(i) <= m) s.set(i);
  if (!is_down_set(s))
    throw std::runtime_error("lower filtration is not closed (frontier violation)");
  return s;
}

int StratifiedPoset::set_dimension(const CellSet& a) const {
  int d = -1;
  for (int i = 0; i < cell_count(); ++i)
    if (a.test(i)) d = std::max(d, pdim_of_cell(i));
  return d;
}

std::vector<std::string> StratifiedPoset::ids_of(const CellSet& a) const {
  std::vector<std::string> out;
  for (int i = 0; i < cell_count(); ++i)
    if (a.test(i)) out.push_back(cells[i].id);
  std::sort(out.begin(), out.end());
  return out;
}

CellSet StratifiedPoset::set_of_ids(const std::vector<std::string>& ids) const {
  CellSet s(cell_count());
  for (const auto& id : ids) {
    int i = cell_index(id);
    if (i < 0) throw std::invalid_argument("unknown cell id: " + id);
    s.set(i);
  }
  return s;
}

StratifiedPoset merge_strata_by_dimension(const StratifiedPoset& p) {
  StratifiedPoset out;
  out.geometric = p.geometric;
  out.covers = p.covers;
  std::set<int> pdims;
  for (const auto& s : p.strata) pdims.insert(s.pdim);
  std::map<int, std::string> name;
  for (int d : pdims) {
    name[d] = "d" + std::to_string(d);
    out.strata.push_back({name[d], d});
  }
  out.cells = p.cells;
  for (int i = 0; i < p.cell_count(); ++i)
    out.cells[i].stratum = name.at(p.pdim_of_cell(i));
  out.finalize();
  return out;
}

StratifiedPoset induced_subposet(const StratifiedPoset& p, const CellSet& v) {
  if (!p.is_up_set(v))
    throw std::invalid_argument("induced_subposet expects an up-set");
  StratifiedPoset out;
  out.geometric = p.geometric;
  out.strata = p.strata;
  std::vector<int> newidx(p.cell_count(), -1);
  for (int i = 0; i < p.cell_count(); ++i)
    if (v.test(i)) {
      newidx[i] = static_cast<int>(out.cells.size());
      out.cells.push_back(p.cells[i]);
    }
  for (const auto& [f, c] : p.covers)
    if (newidx[f] >= 0 && newidx[c] >= 0) out.covers.emplace_back(newidx[f], newidx[c]);
  out.finalize();
  return out;
}

PosetPtr finalize_shared(StratifiedPoset p) {
  p.finalize();
  auto issues = p.validate();
  if (!issues.empty())
    throw std::invalid_argument("invalid poset: " + issues.front().kind + ": " +
                                issues.front().detail);
  return std::make_shared<const StratifiedPoset>(std::move(p));
}

}  // namespace persheaf
