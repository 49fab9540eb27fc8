// Release acceptance sweep. One line per criterion, nonzero exit if any fails.
// argv[1] is the persheaf CLI binary (criterion 7 runs it twice per command).
#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "persheaf/derived.hpp"
#include "persheaf/fixtures.hpp"
#include "persheaf/linalg.hpp"
#include "persheaf/perversity.hpp"
#include "persheaf/poset.hpp"
#include "persheaf/sheaf.hpp"

using namespace persheaf;
using Clock = std::chrono::steady_clock;

static bool g_all = true;

static double secs(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

static void line(int n, bool ok, const std::string& detail) {
  if (!ok) g_all = false;
  std::printf("criterion %d: %s (%s)\n", n, ok ? "pass" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

static std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct RunResult {
  int code = -1;
  std::string out;
};

static RunResult run_cli(const std::string& cli, const std::string& args,
                         const std::string& out_path) {
  std::string cmd = cli + " " + args + " > " + out_path + " 2>&1";
  int st = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  r.out = slurp(out_path);
  return r;
}

// Two runs of the same command must agree byte for byte (and in exit code).
static bool deterministic(const std::string& cli, const std::string& args,
                          const std::string& dir, std::string* why) {
  RunResult a = run_cli(cli, args, dir + "/det1");
  RunResult b = run_cli(cli, args, dir + "/det2");
  if (a.code != b.code || a.out != b.out) {
    *why = "output of '" + args + "' differs between runs";
    return false;
  }
  return true;
}

int main(int argc, char** argv) {
  struct Fx {
    const char* name;
    PosetPtr p;
  };
  std::vector<Fx> fx = {{"point", make_point()},
                        {"cone", make_cone()},
                        {"suspension", make_suspension()},
                        {"plane_line", make_plane_line()}};

  // criterion 1: verdict(S2) == verdict(newS) and verdict(C2) == verdict(newC)
  // on 100 random constructible complexes per fixture, with at least 10
  // passing and 10 failing per fixture, in under five minutes.
  auto t1 = Clock::now();
  std::vector<std::vector<SheafComplex>> pools(fx.size());
  for (size_t i = 0; i < fx.size(); ++i)
    for (uint64_t seed = 1; seed <= 100; ++seed)
      pools[i].push_back(random_constructible(fx[i].p, seed, 1 + (int)(seed % 3)));

  bool c1_ok = true;
  std::string c1_detail;
  {
    int disagree = 0;
    std::string mix;
    for (size_t i = 0; i < fx.size(); ++i) {
      int np = 0, nf = 0;
      for (const auto& a : pools[i]) {
        LemmaReport r = verify_lemma_equivalence(a);
        if (!r.constructible || !r.support_agrees || !r.cosupport_agrees) ++disagree;
        if (r.s2.pass && r.c2.pass) ++np; else ++nf;
      }
      if (np < 10 || nf < 10) c1_ok = false;
      mix += std::string(" ") + fx[i].name + " " + std::to_string(np) + "/" +
             std::to_string(nf);
    }
    double dt = secs(t1);
    if (disagree > 0 || dt >= 300.0) c1_ok = false;
    char buf[64];
    std::snprintf(buf, sizeof buf, ", %d disagreements, %.0fs", disagree, dt);
    c1_detail = "400 complexes, pass/fail mix" + mix + buf;
  }
  line(1, c1_ok, c1_detail);

  // criterion 2: every C2-passing complex, every m up to the top stratum
  // dimension: restriction to U^{m+1} is iso below -m-1 and injective there.
  {
    auto t0 = Clock::now();
    int checks = 0, fails = 0;
    for (size_t i = 0; i < fx.size(); ++i) {
      int top = fx[i].p->max_pdim();
      for (const auto& a : pools[i]) {
        if (!check_C2(a).pass) continue;
        for (int m = 0; m <= top; ++m) {
          PropositionReport r = verify_proposition(a, m);
          ++checks;
          if (!r.hypothesis_ok || !r.pass) ++fails;
        }
      }
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d rank tables, %d failures, %.0fs", checks,
                  fails, secs(t0));
    line(2, fails == 0 && checks > 0, buf);
  }

  // criterion 3: hand-computed cone oracles.
  {
    std::vector<std::string> bad;
    PosetPtr cone = fx[1].p;
    int c = cone->cell_index("c");

    SheafComplex q0 = constant_sheaf(cone, 0);
    CohomologyTable ck = costalk_cohomology(q0, c);
    if (!(ck.dims == std::map<int, int>{{2, 1}}))
      bad.push_back("costalk at the cone point is not Q in degree 2");

    SheafComplex q1 = constant_sheaf(cone, 1);
    if (!(check_S1(q1).pass && check_C1(q1).pass && check_S2(q1).pass &&
          check_C2(q1).pass && check_new_support(q1).pass &&
          check_new_cosupport(q1).pass))
      bad.push_back("shifted constant sheaf fails a perversity check");

    ConditionVerdict s2 = check_S2(q0);
    ConditionVerdict ns = check_new_support(q0);
    bool s2_witness = !s2.pass && !s2.witnesses.empty() &&
                      s2.witnesses[0].degree == 0 &&
                      s2.witnesses[0].place.rfind("stratum S1", 0) == 0;
    bool ns_witness = !ns.pass && !ns.witnesses.empty() &&
                      ns.witnesses[0].degree == 0 &&
                      ns.witnesses[0].place.rfind("m=1", 0) == 0;
    if (!s2_witness || !ns_witness)
      bad.push_back("unshifted constant sheaf misses the open-stratum witness");

    SheafComplex sky = skyscraper(cone, cone->down_set(c),
                                  CochainComplex::concentrated(0, 1));
    if (!(check_S1(sky).pass && check_C1(sky).pass && check_S2(sky).pass &&
          check_C2(sky).pass && check_new_support(sky).pass &&
          check_new_cosupport(sky).pass))
      bad.push_back("skyscraper at the cone point fails a perversity check");

    SheafComplex ic = deligne_ic(cone);
    if (!(check_S2(ic).pass && check_C2(ic).pass))
      bad.push_back("IC sheaf fails a support condition");

    std::string detail = "costalk, shifted constant, witnesses, skyscraper, IC";
    for (const auto& b : bad) detail += "; " + b;
    line(3, bad.empty(), detail);
  }

  // criterion 4: engine invariants, exact arithmetic, zero tolerance.
  {
    int bad = 0;

    // sections over U_x match the stalk, on every cell of every fixture,
    // for a constant sheaf, a random complex, and the IC of the merged base
    int ncontract = 0;
    std::vector<PosetPtr> all_bases = {make_point(),      make_circle(),
                                       make_cone(),       make_suspension(),
                                       make_node(),       make_plane_line()};
    for (const auto& p : all_bases) {
      auto merged = std::make_shared<const StratifiedPoset>(
          merge_strata_by_dimension(*p));
      std::vector<SheafComplex> sheaves = {constant_sheaf(p, 1),
                                           random_constructible(p, 7, 3),
                                           deligne_ic(merged)};
      for (const auto& a : sheaves) {
        const auto& base = *a.base();
        for (int x = 0; x < base.cell_count(); ++x) {
          ++ncontract;
          if (!cohomology(sections_complex(a, base.up_set(x)))
                   .same_dims(stalk_cohomology(a, x)))
            ++bad;
        }
      }
    }

    // excision LES over every nested pair of cone down-sets and every
    // choice of U_x, for the constant sheaf
    PosetPtr cp = fx[1].p;
    std::vector<CellSet> down_sets;
    int n = cp->cell_count();
    for (int mask = 0; mask < (1 << n); ++mask) {
      CellSet s(n);
      for (int i = 0; i < n; ++i)
        if (mask & (1 << i)) s.set(i);
      if (cp->is_down_set(s)) down_sets.push_back(s);
    }
    SheafComplex qc = constant_sheaf(cp, 0);
    int nexc = 0;
    for (const auto& zs : down_sets)
      for (const auto& zb : down_sets) {
        if (!zb.contains(zs)) continue;
        std::vector<std::optional<int>> xs = {std::nullopt};
        for (int x = 0; x < n; ++x) xs.push_back(x);
        for (auto x : xs) {
          ExcisionReport r = excision_les_check(qc, x, zs, zb);
          ++nexc;
          if (!r.pass || !r.composite_zero) ++bad;
        }
      }

    // excision on the 100 random cone complexes, sampled triples
    CellSet l0 = cp->filtration_lower(0);
    CellSet za = cp->closure(cp->set_of_ids({"a1"}));
    for (const auto& a : pools[1]) {
      for (auto x : {std::optional<int>{}, std::optional<int>{cp->cell_index("c")},
                     std::optional<int>{cp->cell_index("t1")}}) {
        if (!excision_les_check(a, x, cp->empty_set(), l0).pass) ++bad;
        if (!excision_les_check(a, x, l0, za).pass) ++bad;
        nexc += 2;
      }
    }

    // mapping cone of a restriction: H(cone) = coker + ker, degreewise
    int ncone = 0;
    std::vector<SheafComplex> cone_sheaves = {qc};
    for (int j = 0; j < 10; ++j) cone_sheaves.push_back(pools[1][j]);
    for (const auto& a : cone_sheaves)
      for (int x : {cp->cell_index("c"), cp->cell_index("t1")}) {
        ChainMap f = restriction_map(a, cp->up_set(x), cp->all_cells());
        CochainComplex cn = cone(f);
        cn.validate();
        CohomologyTable hc = cohomology(cn);
        CohomologyTable hs = cohomology(*f.source);
        CohomologyTable ht = cohomology(*f.target);
        std::map<int, int> rk = induced_h_ranks(f);
        auto r_of = [&](int k) {
          auto it = rk.find(k);
          return it == rk.end() ? 0 : it->second;
        };
        bool ok = euler_characteristic_dims(cn) == euler_characteristic_table(hc);
        for (int k = cn.lo - 1; k <= cn.hi() + 1 && ok; ++k)
          ok = hc.dim(k) == (ht.dim(k) - r_of(k)) + (hs.dim(k + 1) - r_of(k + 1));
        ++ncone;
        if (!ok) ++bad;
      }

    // every generated complex: sheaf-level validation, d squared zero on the
    // section complex, and the Euler characteristic identity
    int neuler = 0;
    for (size_t i = 0; i < fx.size(); ++i)
      for (const auto& a : pools[i]) {
        ++neuler;
        if (!validate_sheaf(a).empty()) ++bad;
        CochainComplex c = sections_complex(a, a.base()->all_cells());
        c.validate();
        if (euler_characteristic_dims(c) != euler_characteristic_table(cohomology(c)))
          ++bad;
      }

    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%d contractibility, %d excision, %d mapping cones, %d Euler/d2 "
                  "complexes, %d failures",
                  ncontract, nexc, ncone, neuler, bad);
    line(4, bad == 0, buf);
  }

  // criterion 5: stalkwise vanishing below k over V propagates to sections,
  // for every k in the scan window of every generated complex.
  {
    auto t0 = Clock::now();
    int checks = 0, fails = 0;
    for (size_t i = 0; i < fx.size(); ++i)
      for (const auto& a : pools[i]) {
        auto [klo, khi] = perversity_scan_window(a);
        CellSet all = a.base()->all_cells();
        for (int k = klo; k <= khi; ++k) {
          VanishingReport r = vanishing_propagation_check(a, all, k);
          ++checks;
          if (!r.pass) ++fails;
        }
      }
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d degree checks, %d failures, %.0fs", checks,
                  fails, secs(t0));
    line(5, fails == 0 && checks > 0, buf);
  }

  // criterion 6: cosupp^k inside L^k for all k agrees with the C2 verdict on
  // every generated complex (all four fixtures carry the geometric flag).
  {
    int checks = 0, fails = 0;
    for (size_t i = 0; i < fx.size(); ++i)
      for (const auto& a : pools[i]) {
        RemarkReport r = verify_remark_containment(a);
        ++checks;
        if (!r.applicable || !r.agree) ++fails;
      }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%d complexes, %d disagreements", checks, fails);
    line(6, fails == 0 && checks > 0, buf);
  }

  // criterion 7: gen output and every report are byte-identical across runs.
  {
    bool ok = true;
    std::string why;
    if (argc < 2) {
      ok = false;
      why = "no CLI path given";
    } else {
      std::string cli = argv[1];
      char tmpl[] = "/tmp/persheaf-accept-XXXXXX";
      std::string dir = mkdtemp(tmpl);
      auto gen_twice = [&](const std::string& args, const std::string& f1,
                           const std::string& f2) {
        if (!ok) return;
        RunResult a = run_cli(cli, args + " --out " + dir + "/" + f1, dir + "/g1");
        RunResult b = run_cli(cli, args + " --out " + dir + "/" + f2, dir + "/g2");
        if (a.code != 0 || b.code != 0 || slurp(dir + "/" + f1).empty() ||
            slurp(dir + "/" + f1) != slurp(dir + "/" + f2)) {
          ok = false;
          why = "'" + args + "' is not reproducible";
        }
      };
      gen_twice("gen --fixture cone", "c1.json", "c2.json");
      gen_twice("gen --fixture ic-cone", "i1.json", "i2.json");
      gen_twice("gen --random 42 --space " + dir + "/c1.json", "r1.json", "r2.json");
      for (const std::string& args :
           {"validate " + dir + "/r1.json",
            "check " + dir + "/r1.json",
            "check " + dir + "/r1.json --report json",
            "check " + dir + "/i1.json --method stalkwise --report json",
            "verify --lemma " + dir + "/r1.json --report json",
            "verify --prop 0 " + dir + "/i1.json --report json"}) {
        if (ok && !deterministic(cli, args, dir, &why)) ok = false;
      }
    }
    line(7, ok, ok ? "gen and reports byte-identical across two runs" : why);
  }

  std::printf("acceptance: %s\n", g_all ? "all criteria pass" : "FAILURES above");
  return g_all ? 0 : 1;
}
