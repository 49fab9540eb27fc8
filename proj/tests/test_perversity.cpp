#include <doctest.h>

#include <stdexcept>
#include <string>
#include <vector>

#include "persheaf/fixtures.hpp"
#include "persheaf/perversity.hpp"
#include "persheaf/sheaf.hpp"

using namespace persheaf;

namespace {

struct Pattern {
  bool s1, c1, s2, c2, ns, nc;
};

// Runs all six checkers and compares the pass pattern.
void check_pattern(const SheafComplex& a, const Pattern& want) {
  CHECK(check_S1(a).pass == want.s1);
  CHECK(check_C1(a).pass == want.c1);
  CHECK(check_S2(a).pass == want.s2);
  CHECK(check_C2(a).pass == want.c2);
  CHECK(check_new_support(a).pass == want.ns);
  CHECK(check_new_cosupport(a).pass == want.nc);
}

}  // namespace

TEST_CASE("scan window covers every degree that can carry cohomology") {
  PosetPtr p = make_cone();
  SheafComplex a = constant_sheaf(p, 0);
  auto [lo, hi] = perversity_scan_window(a);
  CHECK(lo == -3);  // lo - #strata - 1
  CHECK(hi == 3);   // hi + max cell_dim + 1
  auto [lo2, hi2] = perversity_scan_window(shift_sheaf(a, 2));
  CHECK(lo2 == -5);
  CHECK(hi2 == 1);
}

TEST_CASE("support and cosupport sets") {
  PosetPtr p = make_cone();
  SheafComplex q1 = constant_sheaf(p, 1);
  CHECK(supp_set(q1, -1) == p->all_cells());
  CHECK(supp_set(q1, 0).empty());
  // the costalk of the shifted constant is concentrated in degree 1 everywhere
  CHECK(cosupp_set(q1, 1) == p->all_cells());
  CHECK(cosupp_set(q1, 0).empty());

  SheafComplex sky = skyscraper(p, p->filtration_lower(0), CochainComplex::concentrated(0, 1));
  CHECK(p->ids_of(supp_set(sky, 0)) == std::vector<std::string>{"c"});
  CHECK(p->ids_of(cosupp_set(sky, 0)) == std::vector<std::string>{"c"});
}

TEST_CASE("verdict patterns on the cone") {
  PosetPtr p = make_cone();
  SheafComplex q0 = constant_sheaf(p, 0);
  SheafComplex q1 = constant_sheaf(p, 1);
  SheafComplex q2 = constant_sheaf(p, 2);
  SheafComplex q3 = constant_sheaf(p, 3);
  SheafComplex sky = skyscraper(p, p->filtration_lower(0), CochainComplex::concentrated(0, 1));
  SheafComplex sky_m2 =
      skyscraper(p, p->filtration_lower(0), CochainComplex::concentrated(-2, 1));
  SheafComplex ic = deligne_ic(p);

  check_pattern(q1, {true, true, true, true, true, true});
  check_pattern(sky, {true, true, true, true, true, true});
  check_pattern(ic, {true, true, true, true, true, true});
  check_pattern(q0, {false, true, false, true, false, true});
  check_pattern(q2, {true, false, true, false, true, false});
  check_pattern(sky_m2, {true, false, true, false, true, false});

  SUBCASE("witnesses locate the failure") {
    ConditionVerdict s1 = check_S1(q0);
    REQUIRE_FALSE(s1.witnesses.empty());
    CHECK(s1.witnesses.front().condition == "S1");
    CHECK(s1.witnesses.front().place == "supp");
    CHECK(s1.witnesses.front().degree == 0);
    CHECK(s1.witnesses.front().dimension == 1);

    ConditionVerdict s2 = check_S2(q0);
    CHECK(s2.witnesses.size() == 8);  // every cell of the open stratum
    CHECK(s2.witnesses.front().place == "stratum S1, cell v1");
    CHECK(s2.witnesses.front().degree == 0);

    ConditionVerdict ns = check_new_support(q0);
    CHECK(ns.witnesses.size() == 8);
    CHECK(ns.witnesses.front().place == "m=1, cell v1");

    ConditionVerdict c2 = check_C2(q2);
    CHECK(c2.witnesses.size() == 8);
    for (const auto& w : c2.witnesses) {
      CHECK(w.degree == -2);
      CHECK(w.place.find("stratum S1") == 0);
    }
    ConditionVerdict c2deep = check_C2(q3);
    bool saw_origin = false;
    for (const auto& w : c2deep.witnesses)
      if (w.place == "stratum S0, cell c" && w.degree == -1) saw_origin = true;
    CHECK(saw_origin);

    ConditionVerdict c1 = check_C1(sky_m2);
    REQUIRE_FALSE(c1.witnesses.empty());
    CHECK(c1.witnesses.front().degree == -2);
    CHECK(c1.witnesses.front().dimension == 0);
  }

  SUBCASE("checkers refuse non-constructible input") {
    CellSet v1_only = p->empty_set();
    v1_only.set(p->cell_index("v1"));
    SheafComplex bad = skyscraper(p, v1_only, CochainComplex::concentrated(0, 1));
    CHECK_THROWS_AS(check_S2(bad), std::invalid_argument);
    CHECK_THROWS_AS(check_C1(bad), std::invalid_argument);
  }
}

TEST_CASE("intersection complexes are perverse on every fixture") {
  // the suspension and the node carry repeated stratum dimensions: merge first
  auto merged_susp = std::make_shared<const StratifiedPoset>(
      merge_strata_by_dimension(*make_suspension()));
  auto merged_node =
      std::make_shared<const StratifiedPoset>(merge_strata_by_dimension(*make_node()));
  std::vector<PosetPtr> spaces = {make_point(), make_cone(), merged_susp, merged_node,
                                  make_plane_line()};
  for (const auto& p : spaces)
    check_pattern(deligne_ic(p), {true, true, true, true, true, true});
  // the plane IC is the shifted constant sheaf
  check_pattern(constant_sheaf(make_plane_line(), 2),
                {true, true, true, true, true, true});
}

TEST_CASE("stalkwise and stratum characterizations agree on geometric bases") {
  for (const auto& p : {make_cone(), make_suspension()}) {
    for (uint64_t seed : {101, 102, 103, 104, 105}) {
      SheafComplex a = random_constructible(p, seed, 4);
      CHECK(check_S1(a).pass == check_S2(a).pass);
      CHECK(check_C1(a).pass == check_C2(a).pass);
    }
  }
}

TEST_CASE("perversity reports") {
  PosetPtr p = make_cone();
  SheafComplex q1 = constant_sheaf(p, 1);
  PerversityReport all = perversity_report(q1, "all");
  CHECK(all.applicable);
  CHECK(all.pass);
  CHECK(all.geometric);
  CHECK(all.constructible);
  CHECK(all.verdicts.size() == 6);
  CHECK(all.k_lo == -4);
  CHECK(all.k_hi == 2);
  REQUIRE(all.supp.size() == 1);
  CHECK(all.supp.at(-1).size() == 9);
  REQUIRE(all.cosupp.size() == 1);
  CHECK(all.cosupp.at(1).size() == 9);

  PerversityReport st = perversity_report(constant_sheaf(p, 0), "stratum");
  CHECK(st.applicable);
  CHECK_FALSE(st.pass);
  CHECK(st.verdicts.size() == 2);
  CHECK(st.verdicts.count("S2") == 1);
  CHECK(st.verdicts.count("C2") == 1);

  // the stalkwise method needs the geometric flag
  PerversityReport sw = perversity_report(constant_sheaf(make_circle(), 1), "stalkwise");
  CHECK_FALSE(sw.applicable);
  CHECK_FALSE(sw.notice.empty());
  CHECK(perversity_report(constant_sheaf(make_circle(), 1), "filtration").applicable);

  CellSet v1_only = p->empty_set();
  v1_only.set(p->cell_index("v1"));
  SheafComplex bad = skyscraper(p, v1_only, CochainComplex::concentrated(0, 1));
  PerversityReport nc = perversity_report(bad, "all");
  CHECK_FALSE(nc.constructible);
  CHECK_FALSE(nc.applicable);
  CHECK_FALSE(nc.notice.empty());
}

TEST_CASE("the two filtration characterizations match the stratum ones") {
  std::vector<PosetPtr> spaces = {make_cone(), make_suspension(), make_node()};
  for (const auto& p : spaces) {
    std::vector<SheafComplex> sheaves = {constant_sheaf(p, 0), constant_sheaf(p, 1),
                                         constant_sheaf(p, 2)};
    for (uint64_t seed : {201, 202, 203, 204})
      sheaves.push_back(random_constructible(p, seed, 4));
    for (const auto& a : sheaves) {
      LemmaReport rep = verify_lemma_equivalence(a);
      CHECK(rep.constructible);
      CHECK(rep.support_agrees);
      CHECK(rep.cosupport_agrees);
      CHECK(rep.pass);
      CHECK(rep.s2.pass == rep.new_s.pass);
      CHECK(rep.c2.pass == rep.new_c.pass);
    }
  }

  PosetPtr p = make_cone();
  CellSet v1_only = p->empty_set();
  v1_only.set(p->cell_index("v1"));
  LemmaReport nc = verify_lemma_equivalence(
      skyscraper(p, v1_only, CochainComplex::concentrated(0, 1)));
  CHECK_FALSE(nc.constructible);
}

TEST_CASE("restriction to the open filtration step") {
  PosetPtr p = make_cone();
  SheafComplex q1 = constant_sheaf(p, 1);
  PropositionReport r0 = verify_proposition(q1, 0);
  CHECK(r0.hypothesis_ok);
  CHECK(r0.pass);
  CHECK(r0.m == 0);
  bool saw_inj = false;
  for (const auto& row : r0.rows) {
    CHECK(row.ok);
    if (row.degree == -1) {
      saw_inj = true;
      CHECK(row.inj_required);
      CHECK_FALSE(row.iso_required);
      CHECK(row.dim_whole == 1);
      CHECK(row.dim_open == 1);
      CHECK(row.rank == 1);
    }
    if (row.degree <= -2) CHECK(row.iso_required);
  }
  CHECK(saw_inj);
  CHECK(verify_proposition(q1, 1).pass);
  CHECK(verify_proposition(deligne_ic(p), 0).pass);
  CHECK(verify_proposition(deligne_ic(make_plane_line()), 1).pass);

  // the hypothesis gate: cosupport must hold before the conclusion is tested
  PropositionReport gated = verify_proposition(constant_sheaf(p, 3), 0);
  CHECK_FALSE(gated.hypothesis_ok);
  CHECK_FALSE(gated.detail.empty());
  CellSet v1_only = p->empty_set();
  v1_only.set(p->cell_index("v1"));
  CHECK_FALSE(verify_proposition(skyscraper(p, v1_only, CochainComplex::concentrated(0, 1)), 0)
                  .hypothesis_ok);
}

TEST_CASE("cosupport containment mirrors the shriek condition") {
  PosetPtr p = make_cone();
  RemarkReport good = verify_remark_containment(constant_sheaf(p, 1));
  CHECK(good.applicable);
  CHECK(good.containment);
  CHECK(good.c2_pass);
  CHECK(good.agree);
  CHECK(good.pass);

  RemarkReport failing = verify_remark_containment(constant_sheaf(p, 2));
  CHECK(failing.applicable);
  CHECK_FALSE(failing.containment);
  CHECK_FALSE(failing.c2_pass);
  CHECK(failing.agree);
  CHECK(failing.pass);
  REQUIRE_FALSE(failing.witnesses.empty());
  CHECK(failing.witnesses.front().condition == "remark");

  CHECK_FALSE(verify_remark_containment(constant_sheaf(make_circle(), 0)).applicable);

  for (uint64_t seed : {211, 212, 213}) {
    RemarkReport r = verify_remark_containment(random_constructible(p, seed, 4));
    CHECK(r.agree);
    CHECK(r.pass);
  }
}
