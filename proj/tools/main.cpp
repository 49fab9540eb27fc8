// Command line front end: validate documents, run perversity checks, verify
// the equivalence lemma and the restriction proposition, generate fixtures.
// Exit codes are a contract: 0 pass, 1 fail or disagree, 2 parse error or
// misuse, 3 hypothesis not satisfied.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "persheaf/derived.hpp"
#include "persheaf/document.hpp"
#include "persheaf/fixtures.hpp"
#include "persheaf/perversity.hpp"
#include "persheaf/poset.hpp"
#include "persheaf/sheaf.hpp"

namespace {

using namespace persheaf;

struct Exit {
  int code;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Loaded {
  PosetPtr base;
  SheafComplex sheaf;
};

// Shared by check and verify: the document must parse, validate, and carry a
// sheaf before any perversity question makes sense.
Loaded load_checked(const std::string& path) {
  Document d = parse_document(slurp(path));
  auto poset_issues = d.poset.validate();
  if (!poset_issues.empty()) {
    for (const auto& i : poset_issues)
      std::cerr << "poset: " << i.kind << ": " << i.detail << "\n";
    throw Exit{1};
  }
  if (!d.has_sheaf) {
    std::cerr << "error: the document has no sheaf section\n";
    throw Exit{2};
  }
  PosetPtr base = finalize_shared(std::move(d.poset));
  SheafComplex a = sheaf_from_document(d, base);
  auto sheaf_issues = validate_sheaf(a);
  if (!sheaf_issues.empty()) {
    for (const auto& i : sheaf_issues)
      std::cerr << "sheaf: " << i.kind << ": " << i.detail << "\n";
    throw Exit{1};
  }
  return {std::move(base), std::move(a)};
}

int run_validate(const std::string& file, bool as_json) {
  Document d = parse_document(slurp(file));
  auto poset_issues = d.poset.validate();
  std::vector<ValidationIssue> sheaf_issues;
  std::optional<ConstructibilityReport> cons;
  bool sheaf_checked = false;
  if (poset_issues.empty() && d.has_sheaf) {
    sheaf_checked = true;
    PosetPtr base = finalize_shared(std::move(d.poset));
    SheafComplex a = sheaf_from_document(d, base);
    sheaf_issues = validate_sheaf(a);
    if (sheaf_issues.empty()) cons = check_constructible(a);
  }
  bool pass = poset_issues.empty() && sheaf_issues.empty() && (!cons || cons->pass);
  if (as_json) {
    std::cout << issues_json(poset_issues, sheaf_issues, cons ? &*cons : nullptr);
  } else {
    if (poset_issues.empty()) {
      std::cout << "poset: ok\n";
    } else {
      std::cout << "poset: " << poset_issues.size() << " issue(s)\n";
      for (const auto& i : poset_issues)
        std::cout << "  " << i.kind << ": " << i.detail << "\n";
    }
    if (!d.has_sheaf) {
      std::cout << "sheaf: absent\n";
    } else if (!sheaf_checked) {
      std::cout << "sheaf: not checked\n";
    } else if (sheaf_issues.empty()) {
      std::cout << "sheaf: ok\n";
    } else {
      std::cout << "sheaf: " << sheaf_issues.size() << " issue(s)\n";
      for (const auto& i : sheaf_issues)
        std::cout << "  " << i.kind << ": " << i.detail << "\n";
    }
    if (cons) {
      std::cout << "constructible: " << (cons->pass ? "yes" : "no") << "\n";
      for (const auto& w : cons->witnesses)
        std::cout << "  cover " << w.cover << ", degree " << w.degree << ": "
                  << w.detail << "\n";
    }
    std::cout << "result: " << (pass ? "pass" : "fail") << "\n";
  }
  return pass ? 0 : 1;
}

int run_check(const std::string& file, const std::string& method, bool as_json) {
  Loaded in = load_checked(file);
  PerversityReport rep = perversity_report(in.sheaf, method);
  std::cout << (as_json ? perversity_report_json(rep) : perversity_report_text(rep));
  if (!rep.applicable) return 3;
  return rep.pass ? 0 : 1;
}

int run_verify(const std::string& file, bool lemma, std::optional<int> prop_m,
               bool as_json) {
  Loaded in = load_checked(file);
  if (lemma) {
    LemmaReport rep = verify_lemma_equivalence(in.sheaf);
    std::cout << (as_json ? lemma_report_json(rep) : lemma_report_text(rep));
    if (!rep.constructible) return 3;
    return rep.pass ? 0 : 1;
  }
  PropositionReport rep = verify_proposition(in.sheaf, *prop_m);
  std::cout << (as_json ? proposition_report_json(rep) : proposition_report_text(rep));
  if (!rep.hypothesis_ok) return 3;
  return rep.pass ? 0 : 1;
}

int run_gen(const std::string& fixture, std::optional<uint64_t> seed,
            const std::string& space, const std::string& out) {
  std::string text;
  if (!fixture.empty()) {
    if (fixture == "point") {
      text = dump_document(*make_point(), nullptr);
    } else if (fixture == "circle") {
      text = dump_document(*make_circle(), nullptr);
    } else if (fixture == "cone") {
      text = dump_document(*make_cone(), nullptr);
    } else {  // ic-cone
      PosetPtr p = make_cone();
      SheafComplex ic = deligne_ic(p);
      text = dump_document(*p, &ic);
    }
  } else {
    Document d = parse_document(slurp(space));
    if (d.has_sheaf) {
      std::cerr << "error: --space expects a space-only document\n";
      return 2;
    }
    auto issues = d.poset.validate();
    if (!issues.empty()) {
      for (const auto& i : issues)
        std::cerr << "poset: " << i.kind << ": " << i.detail << "\n";
      return 1;
    }
    PosetPtr base = finalize_shared(std::move(d.poset));
    SheafComplex a = random_constructible(base, *seed, 5);
    text = dump_document(*base, &a);
  }
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) {
      std::cerr << "error: cannot write file: " << out << "\n";
      return 2;
    }
    f << text;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"constructible sheaf complexes on stratified posets"};
  app.require_subcommand(1);

  std::string file, report = "text", method = "stratum";
  std::string fixture, space, out;
  bool lemma = false;
  std::optional<int> prop_m;
  std::optional<uint64_t> seed;

  auto* validate = app.add_subcommand(
      "validate", "validate a document (poset, sheaf, constructibility)");
  validate->add_option("file", file, "document to validate")->required();
  validate->add_option("--report", report, "output format")
      ->check(CLI::IsMember({"json", "text"}));

  auto* check = app.add_subcommand(
      "check", "run the perversity conditions of one characterization");
  check->add_option("file", file, "document to check")->required();
  check->add_option("--method", method, "characterization to use")
      ->check(CLI::IsMember({"stalkwise", "stratum", "filtration"}));
  check->add_option("--report", report, "output format")
      ->check(CLI::IsMember({"json", "text"}));

  auto* verify = app.add_subcommand(
      "verify", "verify the equivalence lemma or the restriction proposition");
  verify->add_option("file", file, "document to verify")->required();
  auto* lemma_flag = verify->add_flag("--lemma", lemma, "check that the stratum and filtration characterizations agree");
  auto* prop_opt = verify->add_option("--prop", prop_m, "check restriction to the open filtration piece above this dimension")
      ->check(CLI::NonNegativeNumber);
  lemma_flag->excludes(prop_opt);
  verify->add_option("--report", report, "output format")
      ->check(CLI::IsMember({"json", "text"}));

  auto* gen = app.add_subcommand("gen", "emit a fixture or a generated sheaf document");
  auto* fixture_opt = gen->add_option("--fixture", fixture, "built-in document")
      ->check(CLI::IsMember({"point", "circle", "cone", "ic-cone"}));
  auto* seed_opt = gen->add_option("--random", seed, "generator seed");
  auto* space_opt = gen->add_option("--space", space, "space-only document to build on");
  seed_opt->needs(space_opt);
  space_opt->needs(seed_opt);
  fixture_opt->excludes(seed_opt);
  fixture_opt->excludes(space_opt);
  gen->add_option("--out", out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (validate->parsed()) return run_validate(file, report == "json");
    if (check->parsed()) return run_check(file, method, report == "json");
    if (verify->parsed()) {
      if (lemma == prop_m.has_value()) {
        std::cerr << "error: pass exactly one of --lemma or --prop\n";
        return 2;
      }
      return run_verify(file, lemma, prop_m, report == "json");
    }
    if (gen->parsed()) {
      if (fixture.empty() && !seed.has_value()) {
        std::cerr << "error: pass --fixture or --random with --space\n";
        return 2;
      }
      return run_gen(fixture, seed, space, out);
    }
  } catch (const Exit& e) {
    return e.code;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
