#include "persheaf/derived.hpp"

#include <algorithm>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace persheaf {

namespace {

std::size_t initial_memo_limit() {
  if (const char* s = std::getenv("PERSHEAF_MEMO_LIMIT")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(s, &end, 10);
    if (end && *end == '\0') return static_cast<std::size_t>(v);
  }
  return 65536;
}

std::mutex memo_mu;
std::size_t g_memo_limit = initial_memo_limit();
std::map<std::pair<uint64_t, CellSet>, std::shared_ptr<const ChainTable>> g_chain_memo;
std::map<std::tuple<uint64_t, CellSet, CellSet>, CohomologyTable> g_cohom_memo;

}  // namespace

void set_memo_limit(std::size_t entries) {
  std::lock_guard<std::mutex> lock(memo_mu);
  g_memo_limit = entries;
}

std::size_t memo_limit() {
  std::lock_guard<std::mutex> lock(memo_mu);
  return g_memo_limit;
}

void clear_memo() {
  std::lock_guard<std::mutex> lock(memo_mu);
  g_chain_memo.clear();
  g_cohom_memo.clear();
}

int ChainTable::find(int p, const std::vector<int>& chain) const {
  if (p < 0 || p >= static_cast<int>(by_len.size())) return -1;
  const auto& group = by_len[p];
  auto it = std::lower_bound(group.begin(), group.end(), chain);
  if (it == group.end() || *it != chain) return -1;
  return static_cast<int>(it - group.begin());
}

std::shared_ptr<const ChainTable> chains_for(const StratifiedPoset& p, const CellSet& v) {
  if (v.size() != p.cell_count())
    throw std::invalid_argument("chains_for: set sized for a different poset");
  std::pair<uint64_t, CellSet> key{p.uid(), v};
  {
    std::lock_guard<std::mutex> lock(memo_mu);
    auto it = g_chain_memo.find(key);
    if (it != g_chain_memo.end()) return it->second;
  }

  auto tab = std::make_shared<ChainTable>();
  std::vector<int> cells;
  for (int i = 0; i < p.cell_count(); ++i)
    if (v.test(i)) cells.push_back(i);
  if (!cells.empty()) {
    // strict ups within v, ascending: extending lex-sorted chains in this
    // order keeps every group lex-sorted
    std::vector<std::vector<int>> ups(p.cell_count());
    for (int x : cells)
      for (int y : cells)
        if (x != y && p.leq(x, y)) ups[x].push_back(y);
    std::vector<std::vector<int>> cur;
    for (int x : cells) cur.push_back({x});
    while (!cur.empty()) {
      tab->by_len.push_back(cur);
      std::vector<std::vector<int>> next;
      for (const auto& c : cur)
        for (int y : ups[c.back()]) {
          next.push_back(c);
          next.back().push_back(y);
        }
      cur = std::move(next);
    }
  }

  std::lock_guard<std::mutex> lock(memo_mu);
  auto it = g_chain_memo.find(key);
  if (it != g_chain_memo.end()) return it->second;
  // generational eviction: values are pure functions of keys
  if (g_chain_memo.size() >= g_memo_limit) g_chain_memo.clear();
  if (g_memo_limit > 0) g_chain_memo.emplace(key, tab);
  return tab;
}

namespace {

// Per-degree lookup (p, chain, q) -> (offset, dim).
using LayoutIndex = std::vector<std::map<std::tuple<int, int, int>, std::pair<int, int>>>;

LayoutIndex index_layout(const SectionsLayout& lay) {
  LayoutIndex idx(lay.degree_count());
  for (int i = 0; i < lay.degree_count(); ++i)
    for (const auto& b : lay.blocks[i])
      idx[i][{b.p, b.chain, b.q}] = {b.offset, b.dim};
  return idx;
}

// Core nerve assembly. Counts chains in v whose minimum lies in z; callers
// enforce their own openness/closedness contracts on v and z.
CochainComplex build_sections(const SheafComplex& a, const CellSet& v, const CellSet& z,
                              SectionsLayout* layout_out) {
  const auto& p = *a.base();
  if (!v.contains(z)) throw std::logic_error("build_sections: z must sit inside v");
  auto tab = chains_for(p, v);

  std::vector<std::vector<int>> filt(tab->by_len.size());
  int maxp = -1;
  for (size_t pi = 0; pi < tab->by_len.size(); ++pi)
    for (size_t ci = 0; ci < tab->by_len[pi].size(); ++ci)
      if (z.test(tab->by_len[pi][ci][0])) {
        filt[pi].push_back(static_cast<int>(ci));
        maxp = std::max(maxp, static_cast<int>(pi));
      }

  CochainComplex out;
  out.lo = a.lo();
  if (maxp < 0) {
    out.dims = {0};
    if (layout_out) {
      layout_out->lo = out.lo;
      layout_out->blocks = {{}};
      layout_out->dims = {0};
    }
    return out;
  }

  int lo = a.lo();
  int hi = a.hi() + maxp;
  int width = hi - lo + 1;
  SectionsLayout lay;
  lay.lo = lo;
  lay.blocks.resize(width);
  lay.dims.assign(width, 0);
  for (int i = 0; i < width; ++i) {
    int n = lo + i;
    for (int pi = 0; pi <= maxp; ++pi) {
      int q = n - pi;
      if (q < a.lo() || q > a.hi()) continue;
      for (int ci : filt[pi]) {
        int last = tab->by_len[pi][ci].back();
        int dim = a.dim_at(last, q);
        if (dim == 0) continue;
        lay.blocks[i].push_back({pi, ci, q, dim, lay.dims[i]});
        lay.dims[i] += dim;
      }
    }
  }
  LayoutIndex idx = index_layout(lay);

  // restriction along an arbitrary x <= y: compose covers along a fixed
  // greedy path so invalid inputs still get deterministic output
  std::vector<std::vector<std::pair<int, int>>> outcov(p.cell_count());
  for (size_t e = 0; e < p.covers.size(); ++e)
    outcov[p.covers[e].first].push_back({p.covers[e].second, static_cast<int>(e)});
  for (auto& lst : outcov) std::sort(lst.begin(), lst.end());
  std::map<std::pair<int, int>, std::vector<RatMatrix>> res_cache;
  auto res_general = [&](int x, int y) -> const std::vector<RatMatrix>& {
    auto key = std::make_pair(x, y);
    auto it = res_cache.find(key);
    if (it != res_cache.end()) return it->second;
    std::vector<RatMatrix> acc;
    for (int q = a.lo(); q <= a.hi(); ++q) acc.push_back(RatMatrix::identity(a.dim_at(x, q)));
    int cur = x;
    while (cur != y) {
      int step = -1;
      for (auto [m, e] : outcov[cur])
        if (m == y || p.leq(m, y)) {
          step = e;
          break;
        }
      if (step < 0) throw std::logic_error("no cover path between comparable cells");
      for (int qi = 0; qi < a.width(); ++qi)
        acc[qi] = a.res_at(step, a.lo() + qi).times(acc[qi]);
      cur = p.covers[step].second;
    }
    return res_cache.emplace(key, std::move(acc)).first->second;
  };

  out.dims = lay.dims;
  for (int i = 0; i + 1 < width; ++i) {
    RatMatrix d(lay.dims[i + 1], lay.dims[i]);
    // vertical: (-1)^p times the stalk differential, within one chain
    for (const auto& b : lay.blocks[i]) {
      auto it = idx[i + 1].find({b.p, b.chain, b.q + 1});
      if (it == idx[i + 1].end()) continue;
      int toff = it->second.first;
      Rat sign = (b.p % 2 == 0) ? Rat(1) : Rat(-1);
      int last = tab->by_len[b.p][b.chain].back();
      RatMatrix dv = a.diff_at(last, b.q);
      for (int r = 0; r < dv.rows(); ++r)
        for (const auto& [c, val] : dv.row(r)) d.add_to(toff + r, b.offset + c, sign * val);
    }
    // horizontal: alternating face deletions, restriction on the last face
    for (const auto& t : lay.blocks[i + 1]) {
      if (t.p < 1) continue;
      const auto& chain = tab->by_len[t.p][t.chain];
      for (int del = 0; del <= t.p; ++del) {
        std::vector<int> face;
        face.reserve(chain.size() - 1);
        for (int j = 0; j < static_cast<int>(chain.size()); ++j)
          if (j != del) face.push_back(chain[j]);
        if (!z.test(face[0])) continue;
        int fi = tab->find(t.p - 1, face);
        if (fi < 0) throw std::logic_error("face chain missing from table");
        auto it = idx[i].find({t.p - 1, fi, t.q});
        if (it == idx[i].end()) continue;
        auto [soff, sdim] = it->second;
        if (del < t.p) {
          Rat sign = (del % 2 == 0) ? Rat(1) : Rat(-1);
          for (int r = 0; r < sdim; ++r) d.add_to(t.offset + r, soff + r, sign);
        } else {
          Rat sign = (t.p % 2 == 0) ? Rat(1) : Rat(-1);
          const RatMatrix& rm = res_general(chain[t.p - 1], chain[t.p])[t.q - a.lo()];
          for (int r = 0; r < rm.rows(); ++r)
            for (const auto& [c, val] : rm.row(r))
              d.add_to(t.offset + r, soff + c, sign * val);
        }
      }
    }
    out.d.push_back(std::move(d));
  }
  out.validate();
  if (layout_out) *layout_out = std::move(lay);
  return out;
}

// Memoized cohomology of build_sections(a, v, z).
CohomologyTable cohom_memo(const SheafComplex& a, const CellSet& v, const CellSet& z) {
  std::tuple<uint64_t, CellSet, CellSet> key{a.uid(), v, z};
  {
    std::lock_guard<std::mutex> lock(memo_mu);
    auto it = g_cohom_memo.find(key);
    if (it != g_cohom_memo.end()) return it->second;
  }
  CohomologyTable t = cohomology(build_sections(a, v, z, nullptr));
  std::lock_guard<std::mutex> lock(memo_mu);
  if (g_cohom_memo.size() >= g_memo_limit) g_cohom_memo.clear();
  if (g_memo_limit > 0) g_cohom_memo.emplace(key, t);
  return t;
}

}  // namespace

CochainComplex sections_complex_supported(const SheafComplex& a, const CellSet& v,
                                          const CellSet& z, SectionsLayout* layout_out) {
  const auto& p = *a.base();
  if (!p.is_up_set(v)) throw std::invalid_argument("sections: V must be open");
  if (!v.contains(z)) throw std::invalid_argument("sections: Z must sit inside V");
  // Z closed within V: down-sets cut the kernel of RΓ(V) -> RΓ(V \ Z)
  for (int x = 0; x < p.cell_count(); ++x)
    if (z.test(x) && !z.contains(p.down_set(x).intersect(v)))
      throw std::invalid_argument("sections: Z must be closed in V");
  return build_sections(a, v, z, layout_out);
}

CochainComplex sections_complex(const SheafComplex& a, const CellSet& v,
                                SectionsLayout* layout_out) {
  const auto& p = *a.base();
  if (!p.is_up_set(v)) throw std::invalid_argument("sections: V must be open");
  return build_sections(a, v, v, layout_out);
}

CohomologyTable stalk_cohomology(const SheafComplex& a, int x) {
  return cohomology(a.stalk(x));
}

CochainComplex costalk_complex(const SheafComplex& a, int x) {
  CellSet v = a.base()->up_set(x);
  CellSet z = a.base()->empty_set();
  z.set(x);
  return build_sections(a, v, z, nullptr);
}

CohomologyTable costalk_cohomology(const SheafComplex& a, int x) {
  CellSet v = a.base()->up_set(x);
  CellSet z = a.base()->empty_set();
  z.set(x);
  return cohom_memo(a, v, z);
}

CohomologyTable point_costalk_cohomology(const SheafComplex& a, int x) {
  int cd = a.base()->cells[x].cell_dim;
  CohomologyTable raw = costalk_cohomology(a, x);
  CohomologyTable out;
  for (const auto& [k, d] : raw.dims) out.dims[k + cd] = d;
  for (const auto& [k, m] : raw.representatives) out.representatives[k + cd] = m;
  return out;
}

CochainComplex supported_sections(const SheafComplex& a, int x, const CellSet& z) {
  const auto& p = *a.base();
  if (!p.is_down_set(z)) throw std::invalid_argument("supported_sections: Z must be closed");
  CellSet v = p.up_set(x);
  return build_sections(a, v, z.intersect(v), nullptr);
}

CohomologyTable supported_sections_cohomology(const SheafComplex& a, int x,
                                              const CellSet& z) {
  const auto& p = *a.base();
  if (!p.is_down_set(z)) throw std::invalid_argument("supported_sections: Z must be closed");
  CellSet v = p.up_set(x);
  return cohom_memo(a, v, z.intersect(v));
}

std::map<int, CohomologyTable> shriek_restriction_table(const SheafComplex& a,
                                                        int stratum) {
  const auto& p = *a.base();
  CellSet cells = p.empty_set();
  for (int x = 0; x < p.cell_count(); ++x)
    if (p.stratum_of(x) == stratum) cells.set(x);
  CellSet cl = p.closure(cells);
  std::map<int, CohomologyTable> out;
  for (int x = 0; x < p.cell_count(); ++x)
    if (cells.test(x)) out[x] = supported_sections_cohomology(a, x, cl);
  return out;
}

CohomologyTable hypercohomology(const SheafComplex& a, const CellSet& v) {
  const auto& p = *a.base();
  if (!p.is_up_set(v)) throw std::invalid_argument("sections: V must be open");
  return cohom_memo(a, v, v);
}

CohomologyTable hypercohomology(const SheafComplex& a) {
  return hypercohomology(a, a.base()->all_cells());
}

ChainMap restriction_map(const SheafComplex& a, const CellSet& v, const CellSet& w) {
  const auto& p = *a.base();
  if (!p.is_up_set(v) || !p.is_up_set(w))
    throw std::invalid_argument("restriction_map: both sets must be open");
  if (!w.contains(v)) throw std::invalid_argument("restriction_map: V must sit inside W");
  SectionsLayout lw, lv;
  auto cw = std::make_shared<const CochainComplex>(build_sections(a, w, w, &lw));
  auto cv = std::make_shared<const CochainComplex>(build_sections(a, v, v, &lv));
  auto wtab = chains_for(p, w);
  auto vtab = chains_for(p, v);
  LayoutIndex widx = index_layout(lw);

  ChainMap f;
  f.source = cw;
  f.target = cv;
  f.lo = a.lo();
  int width = static_cast<int>(cw->dims.size());
  for (int i = 0; i < width; ++i) {
    RatMatrix m(cv->dim_at(f.lo + i), cw->dim_at(f.lo + i));
    if (i < lv.degree_count()) {
      for (const auto& b : lv.blocks[i]) {
        int wi = wtab->find(b.p, vtab->by_len[b.p][b.chain]);
        if (wi < 0) throw std::logic_error("chain missing from the larger nerve");
        auto it = widx[i].find({b.p, wi, b.q});
        if (it == widx[i].end()) throw std::logic_error("block missing from the larger nerve");
        for (int t = 0; t < b.dim; ++t) m.set(b.offset + t, it->second.first + t, Rat(1));
      }
    }
    f.comp.push_back(std::move(m));
  }
  return f;
}

ExcisionReport excision_les_check(const SheafComplex& a, std::optional<int> x,
                                  const CellSet& z_small, const CellSet& z_big) {
  const auto& p = *a.base();
  ExcisionReport rep;
  if (!p.is_down_set(z_small) || !p.is_down_set(z_big))
    throw std::invalid_argument("excision: Z' and Z must be closed");
  if (!z_big.contains(z_small))
    throw std::invalid_argument("excision: Z' must sit inside Z");
  CellSet v = x ? p.up_set(*x) : p.all_cells();
  CellSet zs = z_small.intersect(v);
  CellSet zb = z_big.intersect(v);
  CellSet zd = zb.minus(zs);

  SectionsLayout l1, l2, l3;
  auto k1 = std::make_shared<const CochainComplex>(build_sections(a, v, zs, &l1));
  auto k2 = std::make_shared<const CochainComplex>(build_sections(a, v, zb, &l2));
  auto k3 = std::make_shared<const CochainComplex>(build_sections(a, v, zd, &l3));
  LayoutIndex i2 = index_layout(l2);
  LayoutIndex i3 = index_layout(l3);

  // all three share one chain table, so blocks match by (p, chain, q)
  auto block_map = [&](const SectionsLayout& from, const LayoutIndex& to,
                       const CochainComplex& csrc, const CochainComplex& ctgt) {
    std::vector<RatMatrix> comps;
    int width = static_cast<int>(csrc.dims.size());
    for (int i = 0; i < width; ++i) {
      RatMatrix m(ctgt.dim_at(a.lo() + i), csrc.dim_at(a.lo() + i));
      if (i < from.degree_count() && i < static_cast<int>(to.size())) {
        for (const auto& b : from.blocks[i]) {
          auto it = to[i].find({b.p, b.chain, b.q});
          if (it == to[i].end()) continue;
          for (int t = 0; t < b.dim; ++t) m.set(it->second.first + t, b.offset + t, Rat(1));
        }
      }
      comps.push_back(std::move(m));
    }
    return comps;
  };

  ChainMap f;  // inclusion of the Z'-supported sections
  f.source = k1;
  f.target = k2;
  f.lo = a.lo();
  f.comp = block_map(l1, i2, *k1, *k2);
  ChainMap g;  // projection onto chains with minimum outside Z'
  g.source = k2;
  g.target = k3;
  g.lo = a.lo();
  g.comp = block_map(l2, i3, *k2, *k3);

  int lo = a.lo();
  int hi = lo;
  hi = std::max(hi, k1->hi());
  hi = std::max(hi, k2->hi());
  hi = std::max(hi, k3->hi());
  for (int k = lo; k <= hi; ++k) {
    RatMatrix comp = g.comp_at(k).times(f.comp_at(k));
    if (!comp.is_zero()) {
      rep.composite_zero = false;
      rep.pass = false;
      rep.detail = "composite not zero at degree " + std::to_string(k);
      break;
    }
  }

  CohomologyTable h1 = cohomology(*k1);
  CohomologyTable h2 = cohomology(*k2);
  CohomologyTable h3 = cohomology(*k3);
  std::map<int, int> rf = induced_h_ranks(f);
  std::map<int, int> rg = induced_h_ranks(g);
  auto rank_of = [](const std::map<int, int>& m, int k) {
    auto it = m.find(k);
    return it == m.end() ? 0 : it->second;
  };
  for (int k = lo - 1; k <= hi; ++k) {
    ExcisionSlot slot;
    slot.degree = k;
    slot.exact_middle = rank_of(rf, k) + rank_of(rg, k) == h2.dim(k);
    slot.exact_boundary =
        h3.dim(k) - rank_of(rg, k) == h1.dim(k + 1) - rank_of(rf, k + 1);
    if (!slot.exact_middle || !slot.exact_boundary) {
      rep.pass = false;
      if (rep.detail.empty()) rep.detail = "exactness fails at degree " + std::to_string(k);
    }
    rep.slots.push_back(slot);
  }
  return rep;
}

VanishingReport vanishing_propagation_check(const SheafComplex& a, const CellSet& v,
                                            int k) {
  const auto& p = *a.base();
  if (!p.is_up_set(v)) throw std::invalid_argument("sections: V must be open");
  VanishingReport rep;
  for (int x = 0; x < p.cell_count() && rep.hypothesis_holds; ++x) {
    if (!v.test(x)) continue;
    CohomologyTable t = stalk_cohomology(a, x);
    for (const auto& [j, d] : t.dims)
      if (j < k && d > 0) {
        rep.hypothesis_holds = false;
        rep.witness_degree = j;
        break;
      }
  }
  CohomologyTable h = hypercohomology(a, v);
  for (const auto& [j, d] : h.dims)
    if (j < k && d > 0) {
      rep.conclusion_holds = false;
      rep.witness_degree = j;
      break;
    }
  rep.pass = !rep.hypothesis_holds || rep.conclusion_holds;
  return rep;
}

}  // namespace persheaf
