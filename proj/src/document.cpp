#include "persheaf/document.hpp"

#include <json.hpp>

#include <climits>
#include <set>
#include <sstream>
#include <utility>

namespace persheaf {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

const json& need(const json& o, const std::string& where, const char* key) {
  auto it = o.find(key);
  if (it == o.end()) fail(where, std::string("missing field '") + key + "'");
  return *it;
}

void expect_object(const json& v, const std::string& where) {
  if (!v.is_object()) fail(where, "expected an object");
}

void expect_array(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array");
}

void reject_unknown(const json& o, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  for (auto it = o.begin(); it != o.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) known = true;
    if (!known) fail(where, "unknown field '" + it.key() + "'");
  }
}

int need_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where, "expected an integer");
  long long big = v.get<long long>();
  if (big < INT_MIN || big > INT_MAX) fail(where, "integer out of range");
  return static_cast<int>(big);
}

std::string need_string(const json& v, const std::string& where) {
  if (!v.is_string()) fail(where, "expected a string");
  return v.get<std::string>();
}

// Degree keys must be the canonical decimal rendering of an int.
int parse_degree(const std::string& key, const std::string& where) {
  try {
    size_t pos = 0;
    int k = std::stoi(key, &pos);
    if (pos == key.size() && std::to_string(k) == key) return k;
  } catch (const std::exception&) {
  }
  fail(where, "bad degree key '" + key + "'");
}

// Sparse entries [row, col, "p/q"], bounds-checked against the declared shape.
RatMatrix parse_matrix(const json& arr, int rows, int cols, const std::string& where) {
  if (!arr.is_array()) fail(where, "expected an array of [row, col, value] entries");
  RatMatrix m(rows, cols);
  std::set<std::pair<int, int>> seen;
  int idx = 0;
  for (const auto& e : arr) {
    std::string at = where + "[" + std::to_string(idx++) + "]";
    if (!e.is_array() || e.size() != 3) fail(at, "expected [row, col, value]");
    int r = need_int(e[0], at);
    int c = need_int(e[1], at);
    if (r < 0 || r >= rows || c < 0 || c >= cols)
      fail(at, "entry (" + std::to_string(r) + ", " + std::to_string(c) +
                   ") outside a " + std::to_string(rows) + "x" +
                   std::to_string(cols) + " matrix");
    if (!seen.insert({r, c}).second) fail(at, "duplicate entry");
    if (!e[2].is_string()) fail(at, "matrix values are rational strings");
    try {
      m.set(r, c, rat_from_string(e[2].get<std::string>()));
    } catch (const std::exception& ex) {
      fail(at, ex.what());
    }
  }
  return m;
}

json matrix_json(const RatMatrix& m) {
  json out = json::array();
  for (int r = 0; r < m.rows(); ++r)
    for (const auto& [c, v] : m.row(r)) {
      json e = json::array();
      e.push_back(r);
      e.push_back(c);
      e.push_back(rat_to_string(v));
      out.push_back(e);
    }
  return out;
}

json issue_array(const std::vector<ValidationIssue>& issues) {
  json out = json::array();
  for (const auto& i : issues) {
    json e;
    e["kind"] = i.kind;
    e["detail"] = i.detail;
    out.push_back(e);
  }
  return out;
}

json witness_array(const std::vector<PerversityWitness>& ws) {
  json out = json::array();
  for (const auto& w : ws) {
    json e;
    e["condition"] = w.condition;
    e["place"] = w.place;
    e["degree"] = w.degree;
    e["dimension"] = w.dimension;
    out.push_back(e);
  }
  return out;
}

json verdict_json(const ConditionVerdict& v) {
  json out;
  out["pass"] = v.pass;
  out["witnesses"] = witness_array(v.witnesses);
  return out;
}

std::string finish(const json& doc) { return doc.dump(2) + "\n"; }

const char* yn(bool b) { return b ? "yes" : "no"; }
const char* pf(bool b) { return b ? "pass" : "fail"; }

void append_witness_lines(std::ostringstream& os,
                          const std::vector<PerversityWitness>& ws) {
  for (const auto& w : ws)
    os << "  [" << w.condition << "] " << w.place << ": degree " << w.degree
       << ", dim " << w.dimension << "\n";
}

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ", ";
    out += ids[i];
  }
  return out;
}

}  // namespace

Document parse_document(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  expect_object(doc, "document");
  reject_unknown(doc, "document", {"format", "version", "poset", "sheaf"});
  if (need_string(need(doc, "document", "format"), "format") != "persheaf-document")
    fail("format", "expected \"persheaf-document\"");
  if (need_int(need(doc, "document", "version"), "version") != 1)
    fail("version", "unsupported version (expected 1)");

  Document d;
  const json& po = need(doc, "document", "poset");
  expect_object(po, "poset");
  reject_unknown(po, "poset", {"geometric", "strata", "cells", "covers"});
  const json& geo = need(po, "poset", "geometric");
  if (!geo.is_boolean()) fail("poset.geometric", "expected a boolean");
  d.poset.geometric = geo.get<bool>();

  const json& strata = need(po, "poset", "strata");
  expect_array(strata, "poset.strata");
  int si = 0;
  for (const auto& s : strata) {
    std::string at = "poset.strata[" + std::to_string(si++) + "]";
    expect_object(s, at);
    reject_unknown(s, at, {"id", "pdim"});
    Stratum st;
    st.id = need_string(need(s, at, "id"), at + ".id");
    if (st.id.empty()) fail(at + ".id", "empty id");
    st.pdim = need_int(need(s, at, "pdim"), at + ".pdim");
    d.poset.strata.push_back(st);
  }

  const json& cells = need(po, "poset", "cells");
  expect_array(cells, "poset.cells");
  std::map<std::string, int> cell_index;  // first occurrence wins
  int ci = 0;
  for (const auto& c : cells) {
    std::string at = "poset.cells[" + std::to_string(ci) + "]";
    expect_object(c, at);
    reject_unknown(c, at, {"id", "cell_dim", "stratum"});
    Cell cl;
    cl.id = need_string(need(c, at, "id"), at + ".id");
    if (cl.id.empty()) fail(at + ".id", "empty id");
    cl.cell_dim = need_int(need(c, at, "cell_dim"), at + ".cell_dim");
    cl.stratum = need_string(need(c, at, "stratum"), at + ".stratum");
    cell_index.emplace(cl.id, ci);
    d.poset.cells.push_back(cl);
    ++ci;
  }
  auto lookup = [&cell_index](const std::string& id) -> int {
    auto it = cell_index.find(id);
    return it == cell_index.end() ? -1 : it->second;
  };

  const json& covers = need(po, "poset", "covers");
  expect_array(covers, "poset.covers");
  int vi = 0;
  for (const auto& cv : covers) {
    std::string at = "poset.covers[" + std::to_string(vi++) + "]";
    if (!cv.is_array() || cv.size() != 2) fail(at, "expected [face id, coface id]");
    // Unresolved ids become index -1; poset validation reports them.
    d.poset.covers.emplace_back(lookup(need_string(cv[0], at + "[0]")),
                                lookup(need_string(cv[1], at + "[1]")));
  }
  d.poset.finalize();

  if (doc.contains("sheaf")) {
    d.has_sheaf = true;
    const json& sh = doc.at("sheaf");
    expect_object(sh, "sheaf");
    reject_unknown(sh, "sheaf", {"lo", "width", "dims", "diff", "res"});
    d.lo = need_int(need(sh, "sheaf", "lo"), "sheaf.lo");
    d.width = need_int(need(sh, "sheaf", "width"), "sheaf.width");
    if (d.width < 1 || d.width > 4096) fail("sheaf.width", "width must be in [1, 4096]");

    const json& dims = need(sh, "sheaf", "dims");
    expect_object(dims, "sheaf.dims");
    for (auto it = dims.begin(); it != dims.end(); ++it) {
      std::string at = "sheaf.dims[" + it.key() + "]";
      if (lookup(it.key()) < 0) fail(at, "unknown cell id");
      expect_object(*it, at);
      for (auto jt = it->begin(); jt != it->end(); ++jt) {
        int k = parse_degree(jt.key(), at);
        if (k < d.lo || k > d.lo + d.width - 1)
          fail(at + "[" + jt.key() + "]", "degree outside the window");
        int v = need_int(*jt, at + "[" + jt.key() + "]");
        if (v < 0 || v > 65536)
          fail(at + "[" + jt.key() + "]", "dimension out of range");
        d.dims[it.key()][k] = v;
      }
    }
    auto dim_of = [&d](const std::string& id, int k) -> int {
      auto it = d.dims.find(id);
      if (it == d.dims.end()) return 0;
      auto jt = it->second.find(k);
      return jt == it->second.end() ? 0 : jt->second;
    };

    const json& diff = need(sh, "sheaf", "diff");
    expect_object(diff, "sheaf.diff");
    for (auto it = diff.begin(); it != diff.end(); ++it) {
      std::string at = "sheaf.diff[" + it.key() + "]";
      if (lookup(it.key()) < 0) fail(at, "unknown cell id");
      expect_object(*it, at);
      for (auto jt = it->begin(); jt != it->end(); ++jt) {
        int k = parse_degree(jt.key(), at);
        if (k < d.lo || k > d.lo + d.width - 2)
          fail(at + "[" + jt.key() + "]", "degree outside the differential window");
        d.diff[it.key()][k] = parse_matrix(*jt, dim_of(it.key(), k + 1),
                                           dim_of(it.key(), k),
                                           at + "[" + jt.key() + "]");
      }
    }

    const json& res = need(sh, "sheaf", "res");
    expect_array(res, "sheaf.res");
    if (res.size() != d.poset.covers.size())
      fail("sheaf.res", "expected one entry per cover (" +
                            std::to_string(d.poset.covers.size()) + ")");
    int ri = 0;
    for (const auto& entry : res) {
      std::string at = "sheaf.res[" + std::to_string(ri) + "]";
      expect_object(entry, at);
      auto [f, c] = d.poset.covers[ri];
      if (!entry.empty() && (f < 0 || c < 0))
        fail(at, "restriction given for a cover with missing cells");
      std::map<int, RatMatrix> table;
      for (auto jt = entry.begin(); jt != entry.end(); ++jt) {
        int k = parse_degree(jt.key(), at);
        if (k < d.lo || k > d.lo + d.width - 1)
          fail(at + "[" + jt.key() + "]", "degree outside the window");
        table[k] = parse_matrix(*jt, dim_of(d.poset.cells[c].id, k),
                                dim_of(d.poset.cells[f].id, k),
                                at + "[" + jt.key() + "]");
      }
      d.res.push_back(std::move(table));
      ++ri;
    }
  }
  return d;
}

SheafComplex sheaf_from_document(const Document& d, PosetPtr base) {
  if (!d.has_sheaf) throw std::logic_error("document has no sheaf section");
  if (d.res.size() != base->covers.size())
    throw std::invalid_argument("base poset does not match the document");
  int n = base->cell_count();
  std::vector<std::vector<int>> dims(n, std::vector<int>(d.width, 0));
  for (const auto& [id, table] : d.dims) {
    int x = base->cell_index(id);
    if (x < 0) throw std::invalid_argument("base poset lacks cell " + id);
    for (const auto& [k, v] : table) dims[x][k - d.lo] = v;
  }
  std::vector<std::vector<RatMatrix>> diff(n);
  for (int x = 0; x < n; ++x) {
    diff[x].reserve(d.width - 1);
    for (int i = 0; i + 1 < d.width; ++i)
      diff[x].emplace_back(dims[x][i + 1], dims[x][i]);
  }
  for (const auto& [id, table] : d.diff) {
    int x = base->cell_index(id);
    if (x < 0) throw std::invalid_argument("base poset lacks cell " + id);
    for (const auto& [k, m] : table) diff[x][k - d.lo] = m;
  }
  std::vector<std::vector<RatMatrix>> res(base->covers.size());
  for (size_t i = 0; i < base->covers.size(); ++i) {
    auto [f, c] = base->covers[i];
    res[i].reserve(d.width);
    for (int j = 0; j < d.width; ++j) res[i].emplace_back(dims[c][j], dims[f][j]);
    for (const auto& [k, m] : d.res[i]) res[i][k - d.lo] = m;
  }
  return make_sheaf(std::move(base), d.lo, d.width, std::move(dims),
                    std::move(diff), std::move(res));
}

std::string dump_document(const StratifiedPoset& p, const SheafComplex* a) {
  json doc;
  doc["format"] = "persheaf-document";
  doc["version"] = 1;
  json po;
  po["geometric"] = p.geometric;
  json strata = json::array();
  for (const auto& s : p.strata) {
    json e;
    e["id"] = s.id;
    e["pdim"] = s.pdim;
    strata.push_back(e);
  }
  po["strata"] = strata;
  json cells = json::array();
  for (const auto& c : p.cells) {
    json e;
    e["id"] = c.id;
    e["cell_dim"] = c.cell_dim;
    e["stratum"] = c.stratum;
    cells.push_back(e);
  }
  po["cells"] = cells;
  json covers = json::array();
  for (const auto& [f, c] : p.covers) {
    json e = json::array();
    e.push_back(p.cells[f].id);
    e.push_back(p.cells[c].id);
    covers.push_back(e);
  }
  po["covers"] = covers;
  doc["poset"] = po;

  if (a) {
    json sh;
    sh["lo"] = a->lo();
    sh["width"] = a->width();
    json dims = json::object();
    for (int x = 0; x < p.cell_count(); ++x) {
      json t = json::object();
      for (int k = a->lo(); k <= a->hi(); ++k)
        if (int dk = a->dim_at(x, k); dk != 0) t[std::to_string(k)] = dk;
      if (!t.empty()) dims[p.cells[x].id] = t;
    }
    sh["dims"] = dims;
    json diff = json::object();
    for (int x = 0; x < p.cell_count(); ++x) {
      json t = json::object();
      for (int k = a->lo(); k < a->hi(); ++k) {
        RatMatrix m = a->diff_at(x, k);
        if (!m.is_zero()) t[std::to_string(k)] = matrix_json(m);
      }
      if (!t.empty()) diff[p.cells[x].id] = t;
    }
    sh["diff"] = diff;
    json res = json::array();
    for (size_t i = 0; i < p.covers.size(); ++i) {
      json t = json::object();
      for (int k = a->lo(); k <= a->hi(); ++k) {
        RatMatrix m = a->res_at(static_cast<int>(i), k);
        if (!m.is_zero()) t[std::to_string(k)] = matrix_json(m);
      }
      res.push_back(t);
    }
    sh["res"] = res;
    doc["sheaf"] = sh;
  }
  return finish(doc);
}

std::string issues_json(const std::vector<ValidationIssue>& poset_issues,
                        const std::vector<ValidationIssue>& sheaf_issues,
                        const ConstructibilityReport* constructibility) {
  json doc;
  doc["pass"] = poset_issues.empty() && sheaf_issues.empty() &&
                (constructibility == nullptr || constructibility->pass);
  doc["poset_issues"] = issue_array(poset_issues);
  doc["sheaf_issues"] = issue_array(sheaf_issues);
  if (constructibility) {
    doc["constructible"] = constructibility->pass;
    json w = json::array();
    for (const auto& x : constructibility->witnesses) {
      json e;
      e["cover"] = x.cover;
      e["degree"] = x.degree;
      e["detail"] = x.detail;
      w.push_back(e);
    }
    doc["constructibility_witnesses"] = w;
  }
  return finish(doc);
}

std::string perversity_report_json(const PerversityReport& r) {
  json doc;
  doc["method"] = r.method;
  doc["constructible"] = r.constructible;
  doc["geometric"] = r.geometric;
  doc["applicable"] = r.applicable;
  if (!r.notice.empty()) doc["notice"] = r.notice;
  json win = json::array();
  win.push_back(r.k_lo);
  win.push_back(r.k_hi);
  doc["window"] = win;
  doc["pass"] = r.pass;
  json verdicts = json::object();
  for (const auto& [name, v] : r.verdicts) verdicts[name] = verdict_json(v);
  doc["verdicts"] = verdicts;
  json supp = json::object();
  for (const auto& [k, ids] : r.supp) {
    json arr = json::array();
    for (const auto& id : ids) arr.push_back(id);
    supp[std::to_string(k)] = arr;
  }
  doc["supp"] = supp;
  json cosupp = json::object();
  for (const auto& [k, ids] : r.cosupp) {
    json arr = json::array();
    for (const auto& id : ids) arr.push_back(id);
    cosupp[std::to_string(k)] = arr;
  }
  doc["cosupp"] = cosupp;
  return finish(doc);
}

std::string lemma_report_json(const LemmaReport& r) {
  json doc;
  doc["constructible"] = r.constructible;
  doc["support_agrees"] = r.support_agrees;
  doc["cosupport_agrees"] = r.cosupport_agrees;
  doc["pass"] = r.pass;
  doc["S2"] = verdict_json(r.s2);
  doc["newS"] = verdict_json(r.new_s);
  doc["C2"] = verdict_json(r.c2);
  doc["newC"] = verdict_json(r.new_c);
  return finish(doc);
}

std::string proposition_report_json(const PropositionReport& r) {
  json doc;
  doc["m"] = r.m;
  doc["hypothesis_ok"] = r.hypothesis_ok;
  doc["pass"] = r.pass;
  if (!r.detail.empty()) doc["detail"] = r.detail;
  json rows = json::array();
  for (const auto& row : r.rows) {
    json e;
    e["degree"] = row.degree;
    e["dim_whole"] = row.dim_whole;
    e["dim_open"] = row.dim_open;
    e["rank"] = row.rank;
    e["iso_required"] = row.iso_required;
    e["inj_required"] = row.inj_required;
    e["ok"] = row.ok;
    rows.push_back(e);
  }
  doc["rows"] = rows;
  return finish(doc);
}

std::string perversity_report_text(const PerversityReport& r) {
  std::ostringstream os;
  os << "method: " << r.method << "\n";
  os << "constructible: " << yn(r.constructible) << "\n";
  os << "geometric: " << yn(r.geometric) << "\n";
  if (!r.applicable) {
    if (!r.notice.empty()) os << "notice: " << r.notice << "\n";
    os << "result: not applicable\n";
    return os.str();
  }
  os << "degrees scanned: [" << r.k_lo << ", " << r.k_hi << "]\n";
  for (const auto& [name, v] : r.verdicts) {
    os << name << ": " << pf(v.pass) << "\n";
    append_witness_lines(os, v.witnesses);
  }
  for (const auto& [k, ids] : r.supp)
    os << "supp[" << k << "]: " << join_ids(ids) << "\n";
  for (const auto& [k, ids] : r.cosupp)
    os << "cosupp[" << k << "]: " << join_ids(ids) << "\n";
  os << "result: " << pf(r.pass) << "\n";
  return os.str();
}

std::string lemma_report_text(const LemmaReport& r) {
  std::ostringstream os;
  os << "constructible: " << yn(r.constructible) << "\n";
  if (!r.constructible) {
    os << "result: not applicable\n";
    return os.str();
  }
  os << "support: S2 " << pf(r.s2.pass) << ", newS " << pf(r.new_s.pass)
     << (r.support_agrees ? ", agree" : ", DISAGREE") << "\n";
  append_witness_lines(os, r.s2.witnesses);
  append_witness_lines(os, r.new_s.witnesses);
  os << "cosupport: C2 " << pf(r.c2.pass) << ", newC " << pf(r.new_c.pass)
     << (r.cosupport_agrees ? ", agree" : ", DISAGREE") << "\n";
  append_witness_lines(os, r.c2.witnesses);
  append_witness_lines(os, r.new_c.witnesses);
  os << "result: " << pf(r.pass) << "\n";
  return os.str();
}

std::string proposition_report_text(const PropositionReport& r) {
  std::ostringstream os;
  os << "m: " << r.m << "\n";
  if (!r.hypothesis_ok) {
    os << "hypothesis: not satisfied";
    if (!r.detail.empty()) os << " (" << r.detail << ")";
    os << "\nresult: not applicable\n";
    return os.str();
  }
  os << "hypothesis: ok\n";
  for (const auto& row : r.rows)
    os << "degree " << row.degree << ": dim H(X)=" << row.dim_whole
       << ", dim H(U)=" << row.dim_open << ", rank=" << row.rank << ", need "
       << (row.iso_required ? "iso" : "injective") << ": "
       << (row.ok ? "ok" : "FAIL") << "\n";
  if (!r.pass && !r.detail.empty()) os << "detail: " << r.detail << "\n";
  os << "result: " << pf(r.pass) << "\n";
  return os.str();
}

}  // namespace persheaf
