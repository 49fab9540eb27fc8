#include "persheaf/sheaf.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <stdexcept>

#include "persheaf/derived.hpp"

namespace persheaf {

namespace {
std::atomic<uint64_t> next_sheaf_uid{1};

std::shared_ptr<const SheafData> seal(SheafData d) {
  d.uid = next_sheaf_uid.fetch_add(1);
  return std::make_shared<const SheafData>(std::move(d));
}
}  // namespace

int SheafComplex::dim_at(int cell, int k) const {
  int i = k - data_->lo;
  if (i < 0 || i >= data_->width) return 0;
  return data_->dims.at(cell).at(i);
}

RatMatrix SheafComplex::diff_at(int cell, int k) const {
  int i = k - data_->lo;
  if (i < 0 || i >= data_->width - 1)
    return RatMatrix(dim_at(cell, k + 1), dim_at(cell, k));
  return data_->diff.at(cell).at(i);
}

RatMatrix SheafComplex::res_at(int cover, int k) const {
  int i = k - data_->lo;
  const auto& [f, c] = data_->base->covers.at(cover);
  if (i < 0 || i >= data_->width) return RatMatrix(dim_at(c, k), dim_at(f, k));
  return data_->res.at(cover).at(i);
}

CochainComplex SheafComplex::stalk(int cell) const {
  CochainComplex out;
  out.lo = data_->lo;
  out.dims = data_->dims.at(cell);
  out.d = data_->diff.at(cell);
  return out;
}

RatMatrix SheafMap::comp_at(int cell, int k) const {
  int i = k - lo;
  if (i < 0 || i >= width)
    return RatMatrix(target.dim_at(cell, k), source.dim_at(cell, k));
  return comp.at(cell).at(i);
}

void SheafMap::validate() const {
  if (source.base()->uid() != target.base()->uid())
    throw std::invalid_argument("sheaf map: base mismatch");
  const auto& p = *source.base();
  for (int x = 0; x < p.cell_count(); ++x) {
    for (int k = lo; k < lo + width; ++k) {
      RatMatrix lhs = target.diff_at(x, k).times(comp_at(x, k));
      RatMatrix rhs = comp_at(x, k + 1).times(source.diff_at(x, k));
      if (!lhs.equals(rhs))
        throw std::runtime_error("sheaf map: not a chain map at cell " + p.cells[x].id +
                                 " degree " + std::to_string(k));
    }
  }
  for (size_t e = 0; e < p.covers.size(); ++e) {
    auto [x, y] = p.covers[e];
    for (int k = lo; k < lo + width; ++k) {
      RatMatrix lhs = target.res_at(static_cast<int>(e), k).times(comp_at(x, k));
      RatMatrix rhs = comp_at(y, k).times(source.res_at(static_cast<int>(e), k));
      if (!lhs.equals(rhs))
        throw std::runtime_error("sheaf map: naturality fails over cover " +
                                 p.cells[x].id + " < " + p.cells[y].id + " degree " +
                                 std::to_string(k));
    }
  }
}

SheafComplex make_sheaf(PosetPtr base, int lo, int width,
                        std::vector<std::vector<int>> dims,
                        std::vector<std::vector<RatMatrix>> diff,
                        std::vector<std::vector<RatMatrix>> res) {
  if (width < 1) throw std::invalid_argument("sheaf window must be nonempty");
  size_t n = base->cells.size();
  if (dims.size() != n || diff.size() != n || res.size() != base->covers.size())
    throw std::invalid_argument("sheaf data sized inconsistently with the poset");
  for (size_t i = 0; i < n; ++i)
    if (static_cast<int>(dims[i].size()) != width ||
        static_cast<int>(diff[i].size()) != width - 1)
      throw std::invalid_argument("stalk data sized inconsistently with the window");
  for (const auto& r : res)
    if (static_cast<int>(r.size()) != width)
      throw std::invalid_argument("restriction data sized inconsistently with the window");
  SheafData d;
  d.base = std::move(base);
  d.lo = lo;
  d.width = width;
  d.dims = std::move(dims);
  d.diff = std::move(diff);
  d.res = std::move(res);
  return SheafComplex(seal(std::move(d)));
}

namespace {

// Smallest common window of two sheaves on the same base.
std::pair<int, int> common_window(const SheafComplex& a, const SheafComplex& b) {
  int lo = std::min(a.lo(), b.lo());
  int hi = std::max(a.hi(), b.hi());
  return {lo, hi - lo + 1};
}

}  // namespace

std::vector<ValidationIssue> validate_sheaf(const SheafComplex& a) {
  std::vector<ValidationIssue> issues;
  const auto& p = *a.base();
  for (int x = 0; x < p.cell_count(); ++x) {
    try {
      a.stalk(x).validate();
    } catch (const std::exception& e) {
      issues.push_back({"stalk", "cell " + p.cells[x].id + ": " + e.what()});
    }
  }
  for (size_t e = 0; e < p.covers.size(); ++e) {
    auto [x, y] = p.covers[e];
    for (int k = a.lo(); k <= a.hi(); ++k) {
      RatMatrix r = a.res_at(static_cast<int>(e), k);
      if (r.rows() != a.dim_at(y, k) || r.cols() != a.dim_at(x, k)) {
        issues.push_back({"restriction-shape",
                          "cover " + p.cells[x].id + " < " + p.cells[y].id +
                              " degree " + std::to_string(k)});
        continue;
      }
      if (k < a.hi()) {
        RatMatrix lhs = a.diff_at(y, k).times(r);
        RatMatrix rhs = a.res_at(static_cast<int>(e), k + 1).times(a.diff_at(x, k));
        if (!lhs.equals(rhs))
          issues.push_back({"restriction-chainmap",
                            "cover " + p.cells[x].id + " < " + p.cells[y].id +
                                " degree " + std::to_string(k)});
      }
    }
  }
  // Diamond condition: all composites along length-2 cover paths x < m < z agree.
  std::map<std::pair<int, int>, std::vector<std::pair<std::string, std::vector<RatMatrix>>>>
      paths;
  for (size_t e1 = 0; e1 < p.covers.size(); ++e1)
    for (size_t e2 = 0; e2 < p.covers.size(); ++e2) {
      if (p.covers[e1].second != p.covers[e2].first) continue;
      int x = p.covers[e1].first, mid = p.covers[e1].second, z = p.covers[e2].second;
      std::vector<RatMatrix> composite;
      for (int k = a.lo(); k <= a.hi(); ++k)
        composite.push_back(
            a.res_at(static_cast<int>(e2), k).times(a.res_at(static_cast<int>(e1), k)));
      paths[{x, z}].push_back({p.cells[mid].id, std::move(composite)});
    }
  for (const auto& [xz, list] : paths) {
    for (size_t i = 1; i < list.size(); ++i) {
      for (size_t k = 0; k < list[0].second.size(); ++k) {
        if (!list[0].second[k].equals(list[i].second[k])) {
          issues.push_back({"diamond",
                            "composites " + p.cells[xz.first].id + " -> " +
                                p.cells[xz.second].id + " differ via " +
                                list[0].first + " and " + list[i].first + " at degree " +
                                std::to_string(a.lo() + static_cast<int>(k))});
          break;
        }
      }
    }
  }
  return issues;
}

ConstructibilityReport check_constructible(const SheafComplex& a) {
  ConstructibilityReport rep;
  const auto& p = *a.base();
  std::vector<CohomologyTable> tables(p.cell_count());
  std::vector<bool> have(p.cell_count(), false);
  auto table_of = [&](int x) -> const CohomologyTable& {
    if (!have[x]) {
      tables[x] = cohomology(a.stalk(x));
      have[x] = true;
    }
    return tables[x];
  };
  for (size_t e = 0; e < p.covers.size(); ++e) {
    auto [x, y] = p.covers[e];
    if (p.stratum_of(x) != p.stratum_of(y)) continue;
    const auto& hx = table_of(x);
    const auto& hy = table_of(y);
    auto src = std::make_shared<const CochainComplex>(a.stalk(x));
    auto tgt = std::make_shared<const CochainComplex>(a.stalk(y));
    ChainMap f;
    f.source = src;
    f.target = tgt;
    f.lo = a.lo();
    for (int k = a.lo(); k <= a.hi(); ++k) f.comp.push_back(a.res_at(static_cast<int>(e), k));
    for (int k = a.lo(); k <= a.hi(); ++k) {
      int want = hx.dim(k);
      if (hy.dim(k) != want || induced_h_rank(f, k) != want) {
        rep.pass = false;
        rep.witnesses.push_back({static_cast<int>(e), k,
                                 "H^" + std::to_string(k) + " not constant along " +
                                     p.cells[x].id + " < " + p.cells[y].id});
      }
    }
  }
  return rep;
}

SheafComplex zero_sheaf(PosetPtr p) {
  int n = p->cell_count();
  std::vector<std::vector<int>> dims(n, {0});
  std::vector<std::vector<RatMatrix>> diff(n);
  std::vector<std::vector<RatMatrix>> res(p->covers.size(), {RatMatrix(0, 0)});
  return make_sheaf(std::move(p), 0, 1, std::move(dims), std::move(diff), std::move(res));
}

SheafComplex constant_sheaf(PosetPtr p, int n_shift, int rank) {
  int n = p->cell_count();
  std::vector<std::vector<int>> dims(n, {rank});
  std::vector<std::vector<RatMatrix>> diff(n);
  std::vector<std::vector<RatMatrix>> res(p->covers.size(), {RatMatrix::identity(rank)});
  return make_sheaf(std::move(p), -n_shift, 1, std::move(dims), std::move(diff),
                    std::move(res));
}

SheafComplex skyscraper(PosetPtr p, const CellSet& z, const CochainComplex& c) {
  if (!p->is_down_set(z)) throw std::invalid_argument("skyscraper support must be closed");
  int width = std::max<int>(1, static_cast<int>(c.dims.size()));
  int lo = c.lo;
  int n = p->cell_count();
  std::vector<int> zero_dims(width, 0);
  std::vector<std::vector<int>> dims(n, zero_dims);
  std::vector<std::vector<RatMatrix>> diff(n);
  for (int x = 0; x < n; ++x) {
    if (z.test(x) && !c.dims.empty()) dims[x] = c.dims;
    for (int i = 0; i + 1 < width; ++i)
      diff[x].push_back(z.test(x) && !c.d.empty() ? c.d[i]
                                                  : RatMatrix(dims[x][i + 1], dims[x][i]));
  }
  std::vector<std::vector<RatMatrix>> res(p->covers.size());
  for (size_t e = 0; e < p->covers.size(); ++e) {
    auto [f, cc] = p->covers[e];
    for (int i = 0; i < width; ++i) {
      if (z.test(f) && z.test(cc))
        res[e].push_back(RatMatrix::identity(dims[f][i]));
      else
        res[e].push_back(RatMatrix(dims[cc][i], dims[f][i]));
    }
  }
  return make_sheaf(std::move(p), lo, width, std::move(dims), std::move(diff),
                    std::move(res));
}

SheafComplex shift_sheaf(const SheafComplex& a, int n) {
  SheafData d;
  d.base = a.base();
  d.lo = a.lo() - n;
  d.width = a.width();
  d.dims = a.data().dims;
  d.diff = a.data().diff;
  d.res = a.data().res;
  if (n % 2 != 0)
    for (auto& cell : d.diff)
      for (auto& m : cell) m = m.scaled(Rat(-1));
  return SheafComplex(seal(std::move(d)));
}

SheafComplex direct_sum(const SheafComplex& a, const SheafComplex& b) {
  if (a.base()->uid() != b.base()->uid())
    throw std::invalid_argument("direct_sum: base mismatch");
  auto [lo, width] = common_window(a, b);
  const auto& p = *a.base();
  std::vector<std::vector<int>> dims(p.cell_count());
  std::vector<std::vector<RatMatrix>> diff(p.cell_count());
  std::vector<std::vector<RatMatrix>> res(p.covers.size());
  auto blockdiag = [](const RatMatrix& m1, const RatMatrix& m2) {
    RatMatrix z12(m1.rows(), m2.cols());
    RatMatrix z21(m2.rows(), m1.cols());
    return RatMatrix::block2x2(m1, z12, z21, m2);
  };
  for (int x = 0; x < p.cell_count(); ++x) {
    for (int i = 0; i < width; ++i) dims[x].push_back(a.dim_at(x, lo + i) + b.dim_at(x, lo + i));
    for (int i = 0; i + 1 < width; ++i)
      diff[x].push_back(blockdiag(a.diff_at(x, lo + i), b.diff_at(x, lo + i)));
  }
  for (size_t e = 0; e < p.covers.size(); ++e)
    for (int i = 0; i < width; ++i)
      res[e].push_back(blockdiag(a.res_at(static_cast<int>(e), lo + i),
                                 b.res_at(static_cast<int>(e), lo + i)));
  return make_sheaf(a.base(), lo, width, std::move(dims), std::move(diff), std::move(res));
}

SheafMap zero_sheaf_map(const SheafComplex& a, const SheafComplex& b) {
  if (a.base()->uid() != b.base()->uid())
    throw std::invalid_argument("sheaf map: base mismatch");
  SheafMap f;
  f.source = a;
  f.target = b;
  auto [lo, width] = common_window(a, b);
  f.lo = lo;
  f.width = width;
  f.comp.resize(a.base()->cell_count());
  for (int x = 0; x < a.base()->cell_count(); ++x)
    for (int i = 0; i < width; ++i)
      f.comp[x].push_back(RatMatrix(b.dim_at(x, lo + i), a.dim_at(x, lo + i)));
  return f;
}

SheafMap scalar_sheaf_map(const SheafComplex& a, const Rat& v) {
  SheafMap f;
  f.source = a;
  f.target = a;
  f.lo = a.lo();
  f.width = a.width();
  f.comp.resize(a.base()->cell_count());
  for (int x = 0; x < a.base()->cell_count(); ++x)
    for (int i = 0; i < f.width; ++i)
      f.comp[x].push_back(RatMatrix::scalar(a.dim_at(x, a.lo() + i), v));
  return f;
}

SheafComplex cone_of(const SheafMap& f) {
  const SheafComplex& s = f.source;
  const SheafComplex& t = f.target;
  const auto& p = *s.base();
  int lo = std::min(t.lo(), s.lo() - 1);
  int hi = std::max(t.hi(), s.hi() - 1);
  int width = hi - lo + 1;
  std::vector<std::vector<int>> dims(p.cell_count());
  std::vector<std::vector<RatMatrix>> diff(p.cell_count());
  std::vector<std::vector<RatMatrix>> res(p.covers.size());
  auto blockdiag = [](const RatMatrix& m1, const RatMatrix& m2) {
    RatMatrix z12(m1.rows(), m2.cols());
    RatMatrix z21(m2.rows(), m1.cols());
    return RatMatrix::block2x2(m1, z12, z21, m2);
  };
  for (int x = 0; x < p.cell_count(); ++x) {
    for (int k = lo; k <= hi; ++k) dims[x].push_back(t.dim_at(x, k) + s.dim_at(x, k + 1));
    for (int k = lo; k < hi; ++k) {
      RatMatrix dt = t.diff_at(x, k);
      RatMatrix fs = f.comp_at(x, k + 1);
      RatMatrix zero(s.dim_at(x, k + 2), t.dim_at(x, k));
      RatMatrix ds = s.diff_at(x, k + 1).scaled(Rat(-1));
      diff[x].push_back(RatMatrix::block2x2(dt, fs, zero, ds));
    }
  }
  for (size_t e = 0; e < p.covers.size(); ++e)
    for (int k = lo; k <= hi; ++k)
      res[e].push_back(blockdiag(t.res_at(static_cast<int>(e), k),
                                 s.res_at(static_cast<int>(e), k + 1)));
  return make_sheaf(s.base(), lo, width, std::move(dims), std::move(diff), std::move(res));
}

SheafComplex truncate_leq(const SheafComplex& a, int k) {
  if (k >= a.hi()) return a;
  if (k < a.lo()) return zero_sheaf(a.base());
  const auto& p = *a.base();
  int lo = a.lo();
  int width = k - lo + 1;
  std::vector<std::vector<int>> dims(p.cell_count());
  std::vector<std::vector<RatMatrix>> diff(p.cell_count());
  std::vector<std::vector<RatMatrix>> res(p.covers.size());
  std::vector<RatMatrix> kernels(p.cell_count());
  for (int x = 0; x < p.cell_count(); ++x) {
    kernels[x] = a.diff_at(x, k).kernel_basis();
    for (int i = 0; i < width - 1; ++i) dims[x].push_back(a.dim_at(x, lo + i));
    dims[x].push_back(kernels[x].cols());
    for (int i = 0; i + 1 < width - 1; ++i) diff[x].push_back(a.diff_at(x, lo + i));
    if (width >= 2)
      diff[x].push_back(RatMatrix::solve_in_span(kernels[x], a.diff_at(x, k - 1)));
  }
  for (size_t e = 0; e < p.covers.size(); ++e) {
    auto [x, y] = p.covers[e];
    for (int i = 0; i < width - 1; ++i) res[e].push_back(a.res_at(static_cast<int>(e), lo + i));
    res[e].push_back(RatMatrix::solve_in_span(
        kernels[y], a.res_at(static_cast<int>(e), k).times(kernels[x])));
  }
  return make_sheaf(a.base(), lo, width, std::move(dims), std::move(diff), std::move(res));
}

SheafComplex restrict_sheaf(const SheafComplex& a, PosetPtr subposet) {
  const auto& p = *a.base();
  const auto& q = *subposet;
  std::vector<int> parent(q.cell_count());
  for (int i = 0; i < q.cell_count(); ++i) {
    parent[i] = p.cell_index(q.cells[i].id);
    if (parent[i] < 0)
      throw std::invalid_argument("restrict_sheaf: cell missing upstream: " + q.cells[i].id);
  }
  std::map<std::pair<int, int>, int> cover_of;
  for (size_t e = 0; e < p.covers.size(); ++e) cover_of[p.covers[e]] = static_cast<int>(e);
  std::vector<std::vector<int>> dims(q.cell_count());
  std::vector<std::vector<RatMatrix>> diff(q.cell_count());
  std::vector<std::vector<RatMatrix>> res(q.covers.size());
  for (int i = 0; i < q.cell_count(); ++i) {
    dims[i] = a.data().dims.at(parent[i]);
    diff[i] = a.data().diff.at(parent[i]);
  }
  for (size_t e = 0; e < q.covers.size(); ++e) {
    auto [f, c] = q.covers[e];
    auto it = cover_of.find({parent[f], parent[c]});
    if (it == cover_of.end())
      throw std::invalid_argument("restrict_sheaf: cover missing upstream");
    res[e] = a.data().res.at(it->second);
  }
  return make_sheaf(std::move(subposet), a.lo(), a.width(), std::move(dims),
                    std::move(diff), std::move(res));
}

SheafComplex rebase_sheaf(const SheafComplex& a, PosetPtr p) {
  const auto& q = *a.base();
  if (p->cell_count() != q.cell_count() || p->covers.size() != q.covers.size())
    throw std::invalid_argument("rebase_sheaf: shape mismatch");
  std::vector<int> old_idx(p->cell_count());
  for (int i = 0; i < p->cell_count(); ++i) {
    old_idx[i] = q.cell_index(p->cells[i].id);
    if (old_idx[i] < 0) throw std::invalid_argument("rebase_sheaf: cells differ");
  }
  std::map<std::pair<int, int>, int> cover_of;
  for (size_t e = 0; e < q.covers.size(); ++e) cover_of[q.covers[e]] = static_cast<int>(e);
  std::vector<std::vector<int>> dims(p->cell_count());
  std::vector<std::vector<RatMatrix>> diff(p->cell_count());
  std::vector<std::vector<RatMatrix>> res(p->covers.size());
  for (int i = 0; i < p->cell_count(); ++i) {
    dims[i] = a.data().dims.at(old_idx[i]);
    diff[i] = a.data().diff.at(old_idx[i]);
  }
  for (size_t e = 0; e < p->covers.size(); ++e) {
    auto [f, c] = p->covers[e];
    auto it = cover_of.find({old_idx[f], old_idx[c]});
    if (it == cover_of.end()) throw std::invalid_argument("rebase_sheaf: covers differ");
    res[e] = a.data().res.at(it->second);
  }
  return make_sheaf(std::move(p), a.lo(), a.width(), std::move(dims), std::move(diff),
                    std::move(res));
}

SheafComplex pushforward_open(const SheafComplex& a, PosetPtr p, const CellSet& v) {
  if (!p->is_up_set(v)) throw std::invalid_argument("pushforward_open: V must be open");
  const auto& sub = *a.base();
  if (sub.cell_count() != v.count())
    throw std::invalid_argument("pushforward_open: sheaf base does not match V");
  std::vector<int> to_sub(p->cell_count(), -1);
  for (int i = 0; i < p->cell_count(); ++i) {
    if (!v.test(i)) continue;
    to_sub[i] = sub.cell_index(p->cells[i].id);
    if (to_sub[i] < 0)
      throw std::invalid_argument("pushforward_open: sheaf base does not match V");
  }

  // Common window: chain length over V bounds the nerve degree everywhere.
  auto vw = chains_for(*p, v);
  int maxp = std::max(0, vw->max_p());
  int lo = a.lo();
  int width = a.width() + maxp;

  int n = p->cell_count();
  std::vector<CellSet> stalk_set(n, CellSet(sub.cell_count()));
  std::vector<SectionsLayout> layouts(n);
  std::vector<CochainComplex> stalks(n);
  for (int x = 0; x < n; ++x) {
    CellSet ux = p->up_set(x).intersect(v);
    CellSet w(sub.cell_count());
    for (int i = 0; i < n; ++i)
      if (ux.test(i)) w.set(to_sub[i]);
    stalk_set[x] = w;
    stalks[x] = sections_complex_supported(a, w, w, &layouts[x]);
  }

  std::vector<std::vector<int>> dims(n);
  std::vector<std::vector<RatMatrix>> diff(n);
  for (int x = 0; x < n; ++x) {
    for (int i = 0; i < width; ++i) dims[x].push_back(stalks[x].dim_at(lo + i));
    for (int i = 0; i + 1 < width; ++i) diff[x].push_back(stalks[x].d_at(lo + i));
  }

  std::vector<std::vector<RatMatrix>> res(p->covers.size());
  for (size_t e = 0; e < p->covers.size(); ++e) {
    auto [x, y] = p->covers[e];
    auto ytab = chains_for(sub, stalk_set[y]);
    auto xtab = chains_for(sub, stalk_set[x]);
    for (int i = 0; i < width; ++i) {
      int k = lo + i;
      RatMatrix proj(stalks[y].dim_at(k), stalks[x].dim_at(k));
      int deg_y = k - layouts[y].lo;
      if (deg_y >= 0 && deg_y < layouts[y].degree_count()) {
        for (const auto& by : layouts[y].blocks[deg_y]) {
          const auto& chain = ytab->by_len[by.p][by.chain];
          int xpos = xtab->find(by.p, chain);
          if (xpos < 0) continue;  // cannot happen: U_y ⊆ U_x
          // locate the matching block in x's layout
          int deg_x = k - layouts[x].lo;
          for (const auto& bx : layouts[x].blocks[deg_x]) {
            if (bx.p == by.p && bx.q == by.q && bx.chain == xpos) {
              for (int t = 0; t < by.dim; ++t)
                proj.set(by.offset + t, bx.offset + t, Rat(1));
              break;
            }
          }
        }
      }
      res[e].push_back(std::move(proj));
    }
  }
  return make_sheaf(std::move(p), lo, width, std::move(dims), std::move(diff),
                    std::move(res));
}

SheafMap constant_to_pushforward_unit(PosetPtr p, const CellSet& v, int n_shift) {
  SheafComplex src = constant_sheaf(p, n_shift);
  auto subposet = std::make_shared<const StratifiedPoset>(induced_subposet(*p, v));
  SheafComplex inner = constant_sheaf(subposet, n_shift);
  SheafComplex tgt = pushforward_open(inner, p, v);
  SheafMap f;
  f.source = src;
  f.target = tgt;
  auto [lo, width] = common_window(src, tgt);
  f.lo = lo;
  f.width = width;
  f.comp.resize(p->cell_count());
  int deg = -n_shift;
  for (int x = 0; x < p->cell_count(); ++x) {
    for (int i = 0; i < width; ++i) {
      RatMatrix m(tgt.dim_at(x, lo + i), src.dim_at(x, lo + i));
      if (lo + i == deg) {
        // the generator maps to the constant 0-cochain: coefficient 1 on
        // every singleton chain, which occupies the leading block
        for (int r = 0; r < m.rows() && r < tgt.dim_at(x, deg); ++r) m.set(r, 0, Rat(1));
      }
      f.comp[x].push_back(std::move(m));
    }
  }
  return f;
}

SheafComplex deligne_ic(PosetPtr p, int rank) {
  std::map<int, std::set<int>> strata_per_pdim;
  for (int x = 0; x < p->cell_count(); ++x)
    strata_per_pdim[p->pdim_of_cell(x)].insert(p->stratum_of(x));
  for (const auto& [d, ss] : strata_per_pdim)
    if (ss.size() > 1)
      throw std::invalid_argument(
          "deligne_ic needs one stratum per dimension (merge first)");
  int n = 0;
  for (int x = 0; x < p->cell_count(); ++x) n = std::max(n, p->pdim_of_cell(x));

  auto top = std::make_shared<const StratifiedPoset>(
      induced_subposet(*p, p->filtration_upper(n)));
  SheafComplex cur = constant_sheaf(top, n, rank);
  for (int m = n - 1; m >= 0; --m) {
    auto nextp = std::make_shared<const StratifiedPoset>(
        induced_subposet(*p, p->filtration_upper(m)));
    CellSet v = nextp->filtration_upper(m + 1);
    cur = truncate_leq(pushforward_open(cur, nextp, v), -m - 1);
  }
  return rebase_sheaf(cur, p);
}

namespace {

// IC complexes reused across generator seeds (deterministic per poset).
SheafComplex cached_ic(const PosetPtr& p) {
  static std::mutex mu;
  static std::map<uint64_t, SheafComplex> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(p->uid());
    if (it != cache.end()) return it->second;
  }
  auto merged = std::make_shared<const StratifiedPoset>(merge_strata_by_dimension(*p));
  SheafComplex ic = rebase_sheaf(deligne_ic(merged), p);
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(p->uid(), ic);
  return ic;
}

}  // namespace

SheafComplex random_constructible(PosetPtr p, uint64_t seed, int size) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL);
  auto rnd = [&](int k) { return static_cast<int>(rng() % static_cast<uint64_t>(k)); };
  if (size <= 0) return zero_sheaf(p);

  int maxpd = 0;
  for (int x = 0; x < p->cell_count(); ++x) maxpd = std::max(maxpd, p->pdim_of_cell(x));
  bool small = p->cell_count() <= 30;

  auto shift_sample = [&]() { return -1 + rnd(maxpd + 3); };

  auto elementary = [&]() -> SheafComplex {
    int kind = rnd(6);
    if (kind == 2) {
      int t = rnd(static_cast<int>(p->strata.size()));
      CellSet cells(p->cell_count());
      for (int x = 0; x < p->cell_count(); ++x)
        if (p->stratum_of(x) == t) cells.set(x);
      int s = shift_sample();
      if (!cells.empty())
        return skyscraper(p, p->closure(cells), CochainComplex::concentrated(-s, 1));
      kind = 0;
    }
    if (kind == 3) {
      int m = rnd(maxpd + 1);
      int s = shift_sample();
      return skyscraper(p, p->filtration_lower(m), CochainComplex::concentrated(-s, 1));
    }
    if (kind == 4 && maxpd >= 1 && small) {
      int m = 1 + rnd(maxpd);
      CellSet v = p->filtration_upper(m);
      if (!v.empty()) {
        auto sub = std::make_shared<const StratifiedPoset>(induced_subposet(*p, v));
        SheafComplex piece =
            pushforward_open(constant_sheaf(sub, shift_sample()), p, v);
        if (check_constructible(piece).pass) return piece;
      }
      kind = 0;
    }
    if (kind == 5 && maxpd >= 1 && small) return cached_ic(p);
    return constant_sheaf(p, shift_sample());
  };

  SheafComplex acc = elementary();
  for (int step = 1; step < size; ++step) {
    SheafComplex piece = elementary();
    switch (rnd(4)) {
      case 0:
        acc = direct_sum(acc, piece);
        break;
      case 1:
        acc = cone_of(zero_sheaf_map(piece, acc));
        break;
      case 2:
        acc = direct_sum(acc, cone_of(scalar_sheaf_map(piece, Rat(1 + rnd(3)))));
        break;
      default: {
        if (maxpd >= 1 && small) {
          int m = 1 + rnd(maxpd);
          CellSet v = p->filtration_upper(m);
          if (!v.empty()) {
            SheafMap unit = constant_to_pushforward_unit(p, v, shift_sample());
            acc = direct_sum(acc, cone_of(unit));
            break;
          }
        }
        acc = direct_sum(acc, piece);
        break;
      }
    }
  }
  if (rnd(4) == 0) acc = shift_sheaf(acc, rnd(3) - 1);
  return acc;
}

}  // namespace persheaf
