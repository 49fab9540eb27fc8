// Python bindings. Posets and sheaf complexes are opaque handles; tables come
// back as dicts, reports as JSON strings (the package parses them).
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "persheaf/derived.hpp"
#include "persheaf/document.hpp"
#include "persheaf/fixtures.hpp"
#include "persheaf/perversity.hpp"
#include "persheaf/poset.hpp"
#include "persheaf/sheaf.hpp"

namespace py = pybind11;
using namespace persheaf;

namespace {

struct PyPoset {
  PosetPtr p;
};
struct PySheaf {
  SheafComplex a;
};

CellSet set_from_ids(const PosetPtr& p, const std::vector<std::string>& ids) {
  return p->set_of_ids(ids);
}

std::map<int, int> table_dims(const CohomologyTable& t) { return t.dims; }

std::vector<std::pair<std::string, std::string>> issue_list(
    const std::vector<ValidationIssue>& issues) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& i : issues) out.emplace_back(i.kind, i.detail);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "constructible sheaf complexes on stratified posets";

  py::class_<PyPoset>(m, "Poset")
      .def_property_readonly("cell_count",
                             [](const PyPoset& s) { return s.p->cell_count(); })
      .def_property_readonly("geometric",
                             [](const PyPoset& s) { return s.p->geometric; })
      .def_property_readonly("max_pdim",
                             [](const PyPoset& s) { return s.p->max_pdim(); })
      .def_property_readonly("max_cell_dim",
                             [](const PyPoset& s) { return s.p->max_cell_dim(); })
      .def("cell_ids",
           [](const PyPoset& s) { return s.p->ids_of(s.p->all_cells()); })
      .def("leq",
           [](const PyPoset& s, const std::string& x, const std::string& y) {
             int a = s.p->cell_index(x), b = s.p->cell_index(y);
             if (a < 0 || b < 0) throw std::invalid_argument("unknown cell id");
             return s.p->leq(a, b);
           })
      .def("closure",
           [](const PyPoset& s, const std::vector<std::string>& ids) {
             return s.p->ids_of(s.p->closure(set_from_ids(s.p, ids)));
           })
      .def("upper_cells",
           [](const PyPoset& s, int m) {
             return s.p->ids_of(s.p->filtration_upper(m));
           })
      .def("lower_cells", [](const PyPoset& s, int m) {
        return s.p->ids_of(s.p->filtration_lower(m));
      });

  py::class_<PySheaf>(m, "Sheaf")
      .def_property_readonly("lo", [](const PySheaf& s) { return s.a.lo(); })
      .def_property_readonly("hi", [](const PySheaf& s) { return s.a.hi(); })
      .def("dim_at", [](const PySheaf& s, const std::string& id, int k) {
        int x = s.a.base()->cell_index(id);
        if (x < 0) throw std::invalid_argument("unknown cell id");
        return s.a.dim_at(x, k);
      });

  m.def("point", [] { return PyPoset{make_point()}; });
  m.def("circle", [] { return PyPoset{make_circle()}; });
  m.def("cone", [] { return PyPoset{make_cone()}; });
  m.def("suspension", [] { return PyPoset{make_suspension()}; });
  m.def("node", [] { return PyPoset{make_node()}; });
  m.def("plane_line", [] { return PyPoset{make_plane_line()}; });
  m.def("merge_strata", [](const PyPoset& s) {
    return PyPoset{std::make_shared<const StratifiedPoset>(
        merge_strata_by_dimension(*s.p))};
  });

  m.def("zero_sheaf", [](const PyPoset& s) { return PySheaf{zero_sheaf(s.p)}; });
  m.def(
      "constant_sheaf",
      [](const PyPoset& s, int n_shift, int rank) {
        return PySheaf{constant_sheaf(s.p, n_shift, rank)};
      },
      py::arg("poset"), py::arg("n_shift") = 0, py::arg("rank") = 1);
  m.def(
      "skyscraper",
      [](const PyPoset& s, const std::vector<std::string>& closed_ids,
         int degree, int rank) {
        return PySheaf{skyscraper(s.p, set_from_ids(s.p, closed_ids),
                                  CochainComplex::concentrated(degree, rank))};
      },
      py::arg("poset"), py::arg("closed_ids"), py::arg("degree") = 0,
      py::arg("rank") = 1);
  m.def(
      "deligne_ic",
      [](const PyPoset& s, int rank) { return PySheaf{deligne_ic(s.p, rank)}; },
      py::arg("poset"), py::arg("rank") = 1);
  m.def(
      "random_constructible",
      [](const PyPoset& s, uint64_t seed, int size) {
        return PySheaf{random_constructible(s.p, seed, size)};
      },
      py::arg("poset"), py::arg("seed"), py::arg("size") = 5);
  m.def("shift_sheaf", [](const PySheaf& s, int n) {
    return PySheaf{shift_sheaf(s.a, n)};
  });
  m.def("direct_sum", [](const PySheaf& x, const PySheaf& y) {
    return PySheaf{direct_sum(x.a, y.a)};
  });

  m.def("validate_sheaf",
        [](const PySheaf& s) { return issue_list(validate_sheaf(s.a)); });
  m.def("is_constructible",
        [](const PySheaf& s) { return check_constructible(s.a).pass; });

  m.def("stalk_cohomology", [](const PySheaf& s, const std::string& id) {
    int x = s.a.base()->cell_index(id);
    if (x < 0) throw std::invalid_argument("unknown cell id");
    return table_dims(stalk_cohomology(s.a, x));
  });
  m.def("costalk_cohomology", [](const PySheaf& s, const std::string& id) {
    int x = s.a.base()->cell_index(id);
    if (x < 0) throw std::invalid_argument("unknown cell id");
    return table_dims(costalk_cohomology(s.a, x));
  });
  m.def("point_costalk_cohomology", [](const PySheaf& s, const std::string& id) {
    int x = s.a.base()->cell_index(id);
    if (x < 0) throw std::invalid_argument("unknown cell id");
    return table_dims(point_costalk_cohomology(s.a, x));
  });
  m.def(
      "hypercohomology",
      [](const PySheaf& s, const std::optional<std::vector<std::string>>& open_ids) {
        if (!open_ids) return table_dims(hypercohomology(s.a));
        return table_dims(
            hypercohomology(s.a, set_from_ids(s.a.base(), *open_ids)));
      },
      py::arg("sheaf"), py::arg("open_ids") = py::none());
  m.def("supported_sections_cohomology",
        [](const PySheaf& s, const std::string& id,
           const std::vector<std::string>& closed_ids) {
          int x = s.a.base()->cell_index(id);
          if (x < 0) throw std::invalid_argument("unknown cell id");
          return table_dims(supported_sections_cohomology(
              s.a, x, set_from_ids(s.a.base(), closed_ids)));
        });

  m.def(
      "perversity_report_json",
      [](const PySheaf& s, const std::string& method) {
        return perversity_report_json(perversity_report(s.a, method));
      },
      py::arg("sheaf"), py::arg("method") = "all");
  m.def("lemma_report_json", [](const PySheaf& s) {
    return lemma_report_json(verify_lemma_equivalence(s.a));
  });
  m.def("proposition_report_json", [](const PySheaf& s, int m) {
    return proposition_report_json(verify_proposition(s.a, m));
  });

  m.def("load_document", [](const std::string& text) {
    Document d = parse_document(text);
    auto issues = d.poset.validate();
    if (!issues.empty())
      throw std::invalid_argument("invalid poset: " + issues.front().kind +
                                  ": " + issues.front().detail);
    PosetPtr base = finalize_shared(std::move(d.poset));
    std::optional<PySheaf> sheaf;
    if (d.has_sheaf) sheaf = PySheaf{sheaf_from_document(d, base)};
    return std::make_pair(PyPoset{base}, sheaf);
  });
  m.def(
      "dump_document",
      [](const PyPoset& s, const std::optional<PySheaf>& sheaf) {
        return dump_document(*s.p, sheaf ? &sheaf->a : nullptr);
      },
      py::arg("poset"), py::arg("sheaf") = py::none());
}
