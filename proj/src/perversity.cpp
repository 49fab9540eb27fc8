#include "persheaf/perversity.hpp"

#include <algorithm>
#include <stdexcept>

namespace persheaf {

namespace {

void require_constructible(const SheafComplex& a) {
  if (!check_constructible(a).pass)
    throw std::invalid_argument("perversity checks need a constructible complex");
}

int max_pdim_of_cells(const StratifiedPoset& p) {
  int m = 0;
  for (int x = 0; x < p.cell_count(); ++x) m = std::max(m, p.pdim_of_cell(x));
  return m;
}

std::vector<CohomologyTable> all_stalk_tables(const SheafComplex& a) {
  std::vector<CohomologyTable> out;
  for (int x = 0; x < a.base()->cell_count(); ++x) out.push_back(stalk_cohomology(a, x));
  return out;
}

}  // namespace

std::pair<int, int> perversity_scan_window(const SheafComplex& a) {
  const auto& p = *a.base();
  int lo = a.lo() - static_cast<int>(p.strata.size()) - 1;
  int hi = a.hi() + p.max_cell_dim() + 1;
  return {lo, hi};
}

CellSet supp_set(const SheafComplex& a, int k) {
  const auto& p = *a.base();
  CellSet s = p.empty_set();
  for (int x = 0; x < p.cell_count(); ++x)
    if (stalk_cohomology(a, x).dim(k) > 0) s.set(x);
  return p.closure(s);
}

CellSet cosupp_set(const SheafComplex& a, int k) {
  const auto& p = *a.base();
  CellSet s = p.empty_set();
  for (int x = 0; x < p.cell_count(); ++x)
    if (point_costalk_cohomology(a, x).dim(k) > 0) s.set(x);
  return p.closure(s);
}

ConditionVerdict check_S1(const SheafComplex& a) {
  require_constructible(a);
  ConditionVerdict v;
  auto [lo, hi] = perversity_scan_window(a);
  for (int k = lo; k <= hi; ++k) {
    // set_dimension < 0 means the set is empty; empty sets satisfy any bound.
    int d = a.base()->set_dimension(supp_set(a, k));
    if (d >= 0 && d > -k) {
      v.pass = false;
      v.witnesses.push_back({"S1", "supp", k, d});
    }
  }
  return v;
}

ConditionVerdict check_C1(const SheafComplex& a) {
  require_constructible(a);
  ConditionVerdict v;
  auto [lo, hi] = perversity_scan_window(a);
  for (int k = lo; k <= hi; ++k) {
    int d = a.base()->set_dimension(cosupp_set(a, k));
    if (d >= 0 && d > k) {
      v.pass = false;
      v.witnesses.push_back({"C1", "cosupp", k, d});
    }
  }
  return v;
}

ConditionVerdict check_S2(const SheafComplex& a) {
  require_constructible(a);
  ConditionVerdict v;
  const auto& p = *a.base();
  std::vector<CohomologyTable> stalks = all_stalk_tables(a);
  for (size_t si = 0; si < p.strata.size(); ++si) {
    int pd = p.strata[si].pdim;
    for (int x = 0; x < p.cell_count(); ++x) {
      if (p.stratum_of(x) != static_cast<int>(si)) continue;
      for (const auto& [k, d] : stalks[x].dims)
        if (k > -pd) {
          v.pass = false;
          v.witnesses.push_back(
              {"S2", "stratum " + p.strata[si].id + ", cell " + p.cells[x].id, k, d});
        }
    }
  }
  return v;
}

ConditionVerdict check_C2(const SheafComplex& a) {
  require_constructible(a);
  ConditionVerdict v;
  const auto& p = *a.base();
  for (size_t si = 0; si < p.strata.size(); ++si) {
    int pd = p.strata[si].pdim;
    std::map<int, CohomologyTable> tables =
        shriek_restriction_table(a, static_cast<int>(si));
    for (const auto& [x, table] : tables)
      for (const auto& [k, d] : table.dims)
        if (k < -pd) {
          v.pass = false;
          v.witnesses.push_back(
              {"C2", "stratum " + p.strata[si].id + ", cell " + p.cells[x].id, k, d});
        }
  }
  return v;
}

ConditionVerdict check_new_support(const SheafComplex& a) {
  require_constructible(a);
  ConditionVerdict v;
  const auto& p = *a.base();
  std::vector<CohomologyTable> stalks = all_stalk_tables(a);
  int top = max_pdim_of_cells(p);
  for (int m = 0; m <= top; ++m) {
    CellSet u = p.filtration_upper(m);
    for (int x = 0; x < p.cell_count(); ++x) {
      if (!u.test(x)) continue;
      for (const auto& [k, d] : stalks[x].dims)
        if (k > -m) {
          v.pass = false;
          v.witnesses.push_back(
              {"newS", "m=" + std::to_string(m) + ", cell " + p.cells[x].id, k, d});
        }
    }
  }
  return v;
}

ConditionVerdict check_new_cosupport(const SheafComplex& a) {
  require_constructible(a);
  ConditionVerdict v;
  const auto& p = *a.base();
  int top = max_pdim_of_cells(p);
  for (int m = 0; m <= top; ++m) {
    CellSet l = p.filtration_lower(m);
    for (int x = 0; x < p.cell_count(); ++x) {
      if (!l.test(x)) continue;
      CohomologyTable t = supported_sections_cohomology(a, x, l);
      for (const auto& [k, d] : t.dims)
        if (k < -m) {
          v.pass = false;
          v.witnesses.push_back(
              {"newC", "m=" + std::to_string(m) + ", cell " + p.cells[x].id, k, d});
        }
    }
  }
  return v;
}

PerversityReport perversity_report(const SheafComplex& a, const std::string& method) {
  PerversityReport rep;
  rep.method = method;
  rep.geometric = a.base()->geometric;
  rep.constructible = check_constructible(a).pass;
  auto [lo, hi] = perversity_scan_window(a);
  rep.k_lo = lo;
  rep.k_hi = hi;
  if (!rep.constructible) {
    rep.applicable = false;
    rep.notice = "input is not constructible; perversity conditions do not apply";
    return rep;
  }
  if (method == "stalkwise" && !rep.geometric) {
    rep.applicable = false;
    rep.notice =
        "the stalkwise method reads cell costalks as point costalks, which "
        "needs the geometric flag";
    return rep;
  }
  if (method == "stalkwise" || method == "all") {
    rep.verdicts["S1"] = check_S1(a);
    rep.verdicts["C1"] = check_C1(a);
  }
  if (method == "stratum" || method == "all") {
    rep.verdicts["S2"] = check_S2(a);
    rep.verdicts["C2"] = check_C2(a);
  }
  if (method == "filtration" || method == "all") {
    rep.verdicts["newS"] = check_new_support(a);
    rep.verdicts["newC"] = check_new_cosupport(a);
  }
  if (rep.verdicts.empty()) {
    rep.applicable = false;
    rep.notice = "unknown method: " + method;
    return rep;
  }
  rep.pass = true;
  for (const auto& [name, verdict] : rep.verdicts)
    if (!verdict.pass) rep.pass = false;
  for (int k = lo; k <= hi; ++k) {
    CellSet s = supp_set(a, k);
    if (!s.empty()) rep.supp[k] = a.base()->ids_of(s);
    CellSet c = cosupp_set(a, k);
    if (!c.empty()) rep.cosupp[k] = a.base()->ids_of(c);
  }
  return rep;
}

LemmaReport verify_lemma_equivalence(const SheafComplex& a) {
  LemmaReport rep;
  auto merged = std::make_shared<const StratifiedPoset>(
      merge_strata_by_dimension(*a.base()));
  SheafComplex b = rebase_sheaf(a, merged);
  rep.constructible = check_constructible(b).pass;
  if (!rep.constructible) {
    rep.pass = false;
    return rep;
  }
  rep.s2 = check_S2(b);
  rep.new_s = check_new_support(b);
  rep.c2 = check_C2(b);
  rep.new_c = check_new_cosupport(b);
  rep.support_agrees = rep.s2.pass == rep.new_s.pass;
  rep.cosupport_agrees = rep.c2.pass == rep.new_c.pass;
  rep.pass = rep.support_agrees && rep.cosupport_agrees;
  return rep;
}

PropositionReport verify_proposition(const SheafComplex& a, int m) {
  PropositionReport rep;
  rep.m = m;
  if (m < 0) throw std::invalid_argument("verify_proposition: m must be nonnegative");
  if (!check_constructible(a).pass) {
    rep.hypothesis_ok = false;
    rep.pass = false;
    rep.detail = "input is not constructible";
    return rep;
  }
  if (!check_C2(a).pass) {
    rep.hypothesis_ok = false;
    rep.pass = false;
    rep.detail = "cosupport condition fails; proposition hypothesis not satisfied";
    return rep;
  }
  const auto& p = *a.base();
  CellSet v = p.filtration_upper(m + 1);
  ChainMap f = restriction_map(a, v, p.all_cells());
  CohomologyTable hx = hypercohomology(a);
  CohomologyTable hv = hypercohomology(a, v);
  auto [lo, hi] = perversity_scan_window(a);
  (void)hi;
  // only degrees up to -m-1 enter the report; skip the rank work above that
  std::map<int, int> ranks;
  for (int k = lo; k <= -m - 1; ++k) {
    int r = induced_h_rank(f, k);
    if (r != 0) ranks[k] = r;
  }
  auto rank_of = [&](int k) {
    auto it = ranks.find(k);
    return it == ranks.end() ? 0 : it->second;
  };
  for (int k = lo; k <= -m - 1; ++k) {
    PropositionRow row;
    row.degree = k;
    row.dim_whole = hx.dim(k);
    row.dim_open = hv.dim(k);
    row.rank = rank_of(k);
    row.iso_required = k <= -m - 2;
    row.inj_required = k == -m - 1;
    if (row.iso_required)
      row.ok = row.rank == row.dim_whole && row.rank == row.dim_open;
    else
      row.ok = row.rank == row.dim_whole;
    if (!row.ok) {
      rep.pass = false;
      if (rep.detail.empty())
        rep.detail = "rank check fails at degree " + std::to_string(k);
    }
    rep.rows.push_back(row);
  }
  return rep;
}

RemarkReport verify_remark_containment(const SheafComplex& a) {
  RemarkReport rep;
  const auto& p = *a.base();
  if (!p.geometric) {
    rep.applicable = false;
    return rep;
  }
  require_constructible(a);
  auto [lo, hi] = perversity_scan_window(a);
  for (int k = lo; k <= hi; ++k) {
    CellSet s = cosupp_set(a, k);
    CellSet l = k < 0 ? p.empty_set() : p.filtration_lower(k);
    if (!l.contains(s)) {
      rep.containment = false;
      rep.witnesses.push_back({"remark", "cosupp", k, p.set_dimension(s)});
    }
  }
  rep.c2_pass = check_C2(a).pass;
  rep.agree = rep.containment == rep.c2_pass;
  rep.pass = rep.agree;
  return rep;
}

}  // namespace persheaf
