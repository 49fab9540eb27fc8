#include "persheaf/fixtures.hpp"

namespace persheaf {

namespace {

struct Builder {
  StratifiedPoset p;
  void stratum(const std::string& id, int pdim) { p.strata.push_back({id, pdim}); }
  void cell(const std::string& id, int dim, const std::string& stratum) {
    p.cells.push_back({id, dim, stratum});
  }
  void cover(const std::string& f, const std::string& c) {
    int fi = -1, ci = -1;
    for (size_t i = 0; i < p.cells.size(); ++i) {
      if (p.cells[i].id == f) fi = static_cast<int>(i);
      if (p.cells[i].id == c) ci = static_cast<int>(i);
    }
    p.covers.push_back({fi, ci});
  }
  PosetPtr done(bool geometric) {
    p.geometric = geometric;
    return finalize_shared(std::move(p));
  }
};

}  // namespace

PosetPtr make_point() {
  Builder b;
  b.stratum("S0", 0);
  b.cell("p0", 0, "S0");
  return b.done(true);
}

PosetPtr make_circle() {
  Builder b;
  b.stratum("S1", 1);
  for (const char* v : {"v1", "v2"}) b.cell(v, 0, "S1");
  for (const char* e : {"e1", "e2"}) b.cell(e, 1, "S1");
  for (const char* v : {"v1", "v2"})
    for (const char* e : {"e1", "e2"}) b.cover(v, e);
  return b.done(false);
}

PosetPtr make_cone() {
  Builder b;
  b.stratum("S0", 0);
  b.stratum("S1", 1);
  b.cell("c", 0, "S0");
  b.cell("v1", 0, "S1");
  b.cell("v2", 0, "S1");
  b.cell("e1", 1, "S1");
  b.cell("e2", 1, "S1");
  b.cell("a1", 1, "S1");
  b.cell("a2", 1, "S1");
  b.cell("t1", 2, "S1");
  b.cell("t2", 2, "S1");
  for (const char* v : {"v1", "v2"})
    for (const char* e : {"e1", "e2"}) b.cover(v, e);
  b.cover("c", "a1");
  b.cover("c", "a2");
  b.cover("v1", "a1");
  b.cover("v2", "a2");
  b.cover("e1", "t1");
  b.cover("a1", "t1");
  b.cover("a2", "t1");
  b.cover("e2", "t2");
  b.cover("a1", "t2");
  b.cover("a2", "t2");
  return b.done(true);
}

PosetPtr make_suspension() {
  Builder b;
  b.stratum("P1", 0);
  b.stratum("P2", 0);
  b.stratum("SOpen", 1);
  b.cell("p1", 0, "P1");
  b.cell("p2", 0, "P2");
  b.cell("v1", 0, "SOpen");
  b.cell("v2", 0, "SOpen");
  for (const char* e : {"e1", "e2", "b1", "b2", "c1", "c2"}) b.cell(e, 1, "SOpen");
  for (const char* t : {"t1", "t2", "u1", "u2"}) b.cell(t, 2, "SOpen");
  for (const char* v : {"v1", "v2"})
    for (const char* e : {"e1", "e2"}) b.cover(v, e);
  b.cover("p1", "b1");
  b.cover("p1", "b2");
  b.cover("v1", "b1");
  b.cover("v2", "b2");
  b.cover("p2", "c1");
  b.cover("p2", "c2");
  b.cover("v1", "c1");
  b.cover("v2", "c2");
  b.cover("e1", "t1");
  b.cover("b1", "t1");
  b.cover("b2", "t1");
  b.cover("e2", "t2");
  b.cover("b1", "t2");
  b.cover("b2", "t2");
  b.cover("e1", "u1");
  b.cover("c1", "u1");
  b.cover("c2", "u1");
  b.cover("e2", "u2");
  b.cover("c1", "u2");
  b.cover("c2", "u2");
  return b.done(true);
}

PosetPtr make_node() {
  Builder b;
  b.stratum("S0", 0);
  b.stratum("SA", 1);
  b.stratum("SB", 1);
  b.cell("c", 0, "S0");
  for (const char* br : {"A", "B"}) {
    std::string s = std::string("S") + br;
    auto n = [&](const char* base) { return std::string(base) + br; };
    b.cell(n("v1"), 0, s);
    b.cell(n("v2"), 0, s);
    b.cell(n("e1"), 1, s);
    b.cell(n("e2"), 1, s);
    b.cell(n("a1"), 1, s);
    b.cell(n("a2"), 1, s);
    b.cell(n("t1"), 2, s);
    b.cell(n("t2"), 2, s);
    for (const char* v : {"v1", "v2"})
      for (const char* e : {"e1", "e2"}) b.cover(n(v), n(e));
    b.cover("c", n("a1"));
    b.cover("c", n("a2"));
    b.cover(n("v1"), n("a1"));
    b.cover(n("v2"), n("a2"));
    b.cover(n("e1"), n("t1"));
    b.cover(n("a1"), n("t1"));
    b.cover(n("a2"), n("t1"));
    b.cover(n("e2"), n("t2"));
    b.cover(n("a1"), n("t2"));
    b.cover(n("a2"), n("t2"));
  }
  return b.done(true);
}

PosetPtr make_plane_line() {
  Builder b;
  b.stratum("S0", 0);
  b.stratum("S1", 1);
  b.stratum("S2", 2);

  const std::vector<std::string> av = {"av1", "av2"}, ae = {"ae1", "ae2"};
  const std::vector<std::string> bv = {"bv1", "bv2"}, be = {"be1", "be2"};
  std::vector<std::string> acells = {"av1", "av2", "ae1", "ae2"};
  std::vector<std::string> bcells = {"bv1", "bv2", "be1", "be2"};
  auto dim_of = [](const std::string& id) { return id[1] == 'v' ? 0 : 1; };

  // the punctured line consists of circle a and its open cone lines;
  // cones over join cells (names with '*') stay in the open stratum
  auto stratum_of = [&](const std::string& id) {
    bool over_a = id.rfind("o.a", 0) == 0 && id.find('*') == std::string::npos;
    return id[0] == 'a' || over_a ? std::string("S1") : std::string("S2");
  };

  b.cell("o", 0, "S0");
  for (const auto& x : acells) b.cell(x, dim_of(x), "S1");
  for (const auto& x : bcells) b.cell(x, dim_of(x), "S2");
  std::vector<std::string> joins;
  for (const auto& s : acells)
    for (const auto& t : bcells) {
      std::string j = s + "*" + t;
      joins.push_back(j);
      b.cell(j, dim_of(s) + dim_of(t) + 1, "S2");
    }
  std::vector<std::string> base = acells;
  base.insert(base.end(), bcells.begin(), bcells.end());
  base.insert(base.end(), joins.begin(), joins.end());
  for (const auto& x : base) {
    int d = 0;
    for (const auto& c : b.p.cells)
      if (c.id == x) d = c.cell_dim;
    b.cell("o." + x, d + 1, stratum_of("o." + x));
  }

  std::vector<std::pair<std::string, std::string>> basecov;
  for (const auto& v : av)
    for (const auto& e : ae) basecov.push_back({v, e});
  for (const auto& v : bv)
    for (const auto& e : be) basecov.push_back({v, e});
  for (const auto& s : acells)
    for (const auto& t : bcells) {
      std::string j = s + "*" + t;
      for (const auto& v : av)
        if (dim_of(s) == 1) basecov.push_back({v + "*" + t, j});
      for (const auto& v : bv)
        if (dim_of(t) == 1) basecov.push_back({s + "*" + v, j});
      if (dim_of(t) == 0) basecov.push_back({s, j});
      if (dim_of(s) == 0) basecov.push_back({t, j});
    }
  for (const auto& [f, c] : basecov) b.cover(f, c);
  for (const auto& x : base) b.cover(x, "o." + x);
  for (const auto& [f, c] : basecov) b.cover("o." + f, "o." + c);
  for (const auto& v : av) b.cover("o", "o." + v);
  for (const auto& v : bv) b.cover("o", "o." + v);
  return b.done(true);
}

}  // namespace persheaf
