#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <memory>
#include <string>

#include "persheaf/document.hpp"
#include "persheaf/fixtures.hpp"
#include "persheaf/sheaf.hpp"

using namespace persheaf;
using nlohmann::json;

namespace {

bool has_issue(const std::vector<ValidationIssue>& v, const std::string& kind) {
  return std::any_of(v.begin(), v.end(), [&](const auto& i) { return i.kind == kind; });
}

const char* kSegmentDoc = R"({
  "format": "persheaf-document",
  "version": 1,
  "poset": {
    "geometric": false,
    "strata": [{"id": "s0", "pdim": 0}, {"id": "s1", "pdim": 1}],
    "cells": [
      {"id": "x", "cell_dim": 0, "stratum": "s0"},
      {"id": "y", "cell_dim": 1, "stratum": "s1"}
    ],
    "covers": [["x", "y"]]
  },
  "sheaf": {
    "lo": 0,
    "width": 2,
    "dims": {"x": {"0": 1, "1": 1}, "y": {"0": 1}},
    "diff": {},
    "res": [{"0": [[0, 0, "1/2"]]}]
  }
})";

void expect_reject(const json& j) {
  CHECK_THROWS_AS(parse_document(j.dump()), ParseError);
}

}  // namespace

TEST_CASE("documents round trip byte for byte") {
  PosetPtr p = make_cone();
  SheafComplex a = random_constructible(p, 42, 5);
  std::string first = dump_document(*p, &a);
  Document d = parse_document(first);
  REQUIRE(d.has_sheaf);
  REQUIRE(d.poset.validate().empty());
  auto base = std::make_shared<const StratifiedPoset>(d.poset);
  SheafComplex b = sheaf_from_document(d, base);
  CHECK(validate_sheaf(b).empty());
  CHECK(dump_document(*base, &b) == first);
  for (int x = 0; x < p->cell_count(); ++x)
    CHECK(cohomology(b.stalk(x)).same_dims(cohomology(a.stalk(x))));

  std::string space_only = dump_document(*p, nullptr);
  Document ds = parse_document(space_only);
  CHECK_FALSE(ds.has_sheaf);
  CHECK(dump_document(ds.poset, nullptr) == space_only);
}

TEST_CASE("fraction entries survive the round trip exactly") {
  Document d = parse_document(kSegmentDoc);
  REQUIRE(d.has_sheaf);
  CHECK(d.poset.validate().empty());
  auto base = std::make_shared<const StratifiedPoset>(d.poset);
  SheafComplex a = sheaf_from_document(d, base);
  CHECK(a.res_at(0, 0).get(0, 0) == Rat(1, 2));
  CHECK(a.dim_at(base->cell_index("x"), 1) == 1);
  CHECK(a.dim_at(base->cell_index("y"), 1) == 0);
  std::string dumped = dump_document(*base, &a);
  CHECK(dumped.find("\"1/2\"") != std::string::npos);
  CHECK(dump_document(parse_document(dumped).poset, &a) == dumped);
}

TEST_CASE("unknown fields are rejected at every level") {
  json j = json::parse(kSegmentDoc);
  json t;

  t = j; t["extra"] = 1; expect_reject(t);
  t = j; t["poset"]["extra"] = 1; expect_reject(t);
  t = j; t["poset"]["strata"][0]["color"] = "red"; expect_reject(t);
  t = j; t["poset"]["cells"][0]["orientation"] = 1; expect_reject(t);
  t = j; t["sheaf"]["comment"] = "hi"; expect_reject(t);
}

TEST_CASE("malformed documents are rejected") {
  CHECK_THROWS_AS(parse_document("{"), ParseError);
  CHECK_THROWS_WITH_AS(parse_document("[1, 2]"), doctest::Contains("expected an object"),
                       ParseError);

  json j = json::parse(kSegmentDoc);
  json t;

  SUBCASE("header") {
    t = j; t["format"] = "other"; expect_reject(t);
    t = j; t.erase("format"); expect_reject(t);
    t = j; t["version"] = 2; expect_reject(t);
    t = j; t["version"] = "1"; expect_reject(t);
    t = j; t.erase("poset"); expect_reject(t);
  }
  SUBCASE("poset section") {
    t = j; t["poset"]["geometric"] = "yes"; expect_reject(t);
    t = j; t["poset"]["strata"][0]["id"] = ""; expect_reject(t);
    t = j; t["poset"]["strata"][0]["pdim"] = 1.5; expect_reject(t);
    t = j; t["poset"]["cells"][0].erase("stratum"); expect_reject(t);
    t = j; t["poset"]["covers"][0] = {"x"}; expect_reject(t);
    t = j; t["poset"]["covers"][0] = {"x", "y", "y"}; expect_reject(t);
    t = j; t["poset"]["covers"][0][1] = 7; expect_reject(t);
  }
  SUBCASE("sheaf window") {
    t = j; t["sheaf"]["width"] = 0; expect_reject(t);
    t = j; t["sheaf"]["width"] = 4097; expect_reject(t);
    t = j; t["sheaf"].erase("res"); expect_reject(t);
  }
  SUBCASE("degree keys must be canonical integers") {
    for (const char* key : {"+1", "01", " 1", "1x", ""}) {
      t = j;
      t["sheaf"]["dims"]["y"][key] = 1;
      expect_reject(t);
    }
    t = j; t["sheaf"]["dims"]["y"]["7"] = 1; expect_reject(t);
    t = j; t["sheaf"]["diff"]["x"]["1"] = json::array(); expect_reject(t);
  }
  SUBCASE("stalk dimensions") {
    t = j; t["sheaf"]["dims"]["ghost"] = {{"0", 1}}; expect_reject(t);
    t = j; t["sheaf"]["dims"]["x"]["0"] = -1; expect_reject(t);
    t = j; t["sheaf"]["dims"]["x"]["0"] = 65537; expect_reject(t);
  }
  SUBCASE("matrices") {
    t = j; t["sheaf"]["res"][0]["0"] = {{0, 0, "1/0"}}; expect_reject(t);
    t = j; t["sheaf"]["res"][0]["0"] = {{0, 0, "0.5"}}; expect_reject(t);
    t = j; t["sheaf"]["res"][0]["0"] = {{0, 1, "1"}}; expect_reject(t);
    t = j; t["sheaf"]["res"][0]["0"] = {{0, 0, "1"}, {0, 0, "2"}}; expect_reject(t);
    t = j; t["sheaf"]["res"] = json::array(); expect_reject(t);
  }
}

TEST_CASE("unresolved cover ids parse but fail validation") {
  json j = json::parse(kSegmentDoc);
  j["poset"]["covers"][0][1] = "ghost";
  j["sheaf"]["res"][0] = json::object();
  Document d = parse_document(j.dump());
  CHECK(has_issue(d.poset.validate(), "bad-cover"));

  // a restriction matrix over the broken cover cannot be shaped: reject
  j["sheaf"]["res"][0]["0"] = {{0, 0, "1"}};
  expect_reject(j);
}

TEST_CASE("report renderings") {
  PosetPtr p = make_cone();
  SheafComplex q1 = constant_sheaf(p, 1);

  SUBCASE("perversity json") {
    json r = json::parse(perversity_report_json(perversity_report(q1, "all")));
    CHECK(r.at("method") == "all");
    CHECK(r.at("pass") == true);
    CHECK(r.at("applicable") == true);
    CHECK(r.at("constructible") == true);
    CHECK(r.at("geometric") == true);
    CHECK(r.at("window").size() == 2);
    CHECK(r.at("verdicts").size() == 6);
    for (const char* name : {"S1", "C1", "S2", "C2", "newS", "newC"}) {
      CHECK(r.at("verdicts").at(name).at("pass") == true);
      CHECK(r.at("verdicts").at(name).at("witnesses").is_array());
    }
    CHECK(r.at("supp").at("-1").size() == 9);

    json f = json::parse(perversity_report_json(perversity_report(constant_sheaf(p, 0), "stratum")));
    CHECK(f.at("pass") == false);
    CHECK(f.at("verdicts").size() == 2);
    json w = f.at("verdicts").at("S2").at("witnesses").at(0);
    CHECK(w.at("degree") == 0);
    CHECK(w.at("place").get<std::string>().find("stratum S1") == 0);
  }
  SUBCASE("perversity text") {
    std::string t = perversity_report_text(perversity_report(q1, "all"));
    CHECK(t.find("result: pass") != std::string::npos);
    CHECK(t.find("degrees scanned: [-4, 2]") != std::string::npos);
    CHECK(t.find("supp[-1]:") != std::string::npos);
    std::string f = perversity_report_text(perversity_report(constant_sheaf(p, 0), "all"));
    CHECK(f.find("result: fail") != std::string::npos);
    CHECK(f.find("[S2] stratum S1, cell v1: degree 0") != std::string::npos);
    std::string na = perversity_report_text(
        perversity_report(constant_sheaf(make_circle(), 1), "stalkwise"));
    CHECK(na.find("result: not applicable") != std::string::npos);
  }
  SUBCASE("lemma renderings") {
    LemmaReport rep = verify_lemma_equivalence(q1);
    json r = json::parse(lemma_report_json(rep));
    CHECK(r.at("pass") == true);
    CHECK(r.at("support_agrees") == true);
    CHECK(r.at("S2").at("pass") == true);
    CHECK(r.at("newC").at("pass") == true);
    std::string t = lemma_report_text(rep);
    CHECK(t.find("support: S2 pass, newS pass, agree") != std::string::npos);
    CHECK(t.find("result: pass") != std::string::npos);
  }
  SUBCASE("proposition renderings") {
    PropositionReport rep = verify_proposition(q1, 0);
    json r = json::parse(proposition_report_json(rep));
    CHECK(r.at("m") == 0);
    CHECK(r.at("hypothesis_ok") == true);
    CHECK(r.at("pass") == true);
    REQUIRE(r.at("rows").is_array());
    bool saw = false;
    for (const auto& row : r.at("rows"))
      if (row.at("degree") == -1) {
        saw = true;
        CHECK(row.at("dim_whole") == 1);
        CHECK(row.at("rank") == 1);
        CHECK(row.at("inj_required") == true);
      }
    CHECK(saw);
    std::string t = proposition_report_text(rep);
    CHECK(t.find("m: 0") != std::string::npos);
    CHECK(t.find("hypothesis: ok") != std::string::npos);
    CHECK(t.find("result: pass") != std::string::npos);

    std::string gated =
        proposition_report_text(verify_proposition(constant_sheaf(p, 3), 0));
    CHECK(gated.find("hypothesis: not satisfied") != std::string::npos);
  }
  SUBCASE("issue rendering") {
    StratifiedPoset bad;
    bad.strata = {{"s", 0}};
    bad.cells = {{"x", 0, "s"}, {"x", 0, "s"}};
    bad.finalize();
    json r = json::parse(issues_json(bad.validate(), {}, nullptr));
    CHECK(r.at("pass") == false);
    CHECK(r.at("poset_issues").at(0).at("kind") == "duplicate-cell");
    CHECK(r.at("sheaf_issues").empty());
    CHECK_FALSE(r.contains("constructible"));

    ConstructibilityReport cr = check_constructible(q1);
    json ok = json::parse(issues_json({}, {}, &cr));
    CHECK(ok.at("pass") == true);
    CHECK(ok.at("constructible") == true);
  }
}
