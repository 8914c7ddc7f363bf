// Python bindings: the suite, the catalog index and a few kernel operations.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "jetcheck/calculus.hpp"
#include "jetcheck/dsl.hpp"
#include "jetcheck/errors.hpp"
#include "jetcheck/serialize.hpp"
#include "jetcheck/verify.hpp"

namespace py = pybind11;
using namespace jetcheck;

namespace {

JetExpr read(const std::string& text, const std::string& independent, const std::vector<std::string>& deps) {
  DslEnv env;
  env.ring = Ring::make(independent, deps);
  return parse_function(text, env);
}

std::string run(const std::vector<std::string>& ids, std::uint64_t seed, int max_order, bool errata,
                const std::string& errata_path) {
  for (const auto& id : ids) {
    if (!is_check(id)) throw py::value_error("unknown check: " + id);
  }
  if (max_order < 8) throw py::value_error("max_order must be at least 8");
  RunOptions opts;
  opts.seed = seed;
  opts.max_order = max_order;
  ErrataLedger ledger;
  if (!errata) {
    opts.errata = nullptr;
  } else if (!errata_path.empty()) {
    ledger = ErrataLedger::load(errata_path);
    opts.errata = &ledger;
  }
  std::vector<CheckResult> r;
  {
    py::gil_scoped_release release;
    r = run_suite(ids, Catalog::builtin(), opts);
  }
  return report_json(r);
}

}  // namespace

PYBIND11_MODULE(_jetcheck, m) {
  py::register_exception<Error>(m, "JetcheckError");

  m.def("check_ids", [] {
    std::vector<std::string> out;
    for (const auto& c : checks()) out.push_back(c.id);
    return out;
  });
  m.def("explain", [](const std::string& id) {
    if (!is_check(id)) throw py::value_error("unknown check: " + id);
    const CheckInfo& c = check_info(id);
    py::dict d;
    d["id"] = c.id;
    d["claim"] = c.claim;
    d["citation"] = c.citation;
    d["strategy"] = c.strategy;
    d["inputs"] = c.inputs;
    return d;
  });
  m.def("catalog_index", [] { return Catalog::builtin().index(); });
  m.def("run_json", &run, py::arg("ids"), py::arg("seed") = 0, py::arg("max_order") = 64,
        py::arg("errata") = true, py::arg("errata_path") = "");

  m.def(
      "total_derivative",
      [](const std::string& text, const std::string& x, const std::vector<std::string>& deps) {
        return to_prefix(total_derivative(read(text, x, deps)));
      },
      py::arg("text"), py::arg("independent"), py::arg("dependents"));
  m.def(
      "euler",
      [](const std::string& text, const std::string& x, const std::vector<std::string>& deps,
         const std::string& dep) { return to_prefix(euler_derivative(read(text, x, deps), dep)); },
      py::arg("text"), py::arg("independent"), py::arg("dependents"), py::arg("dep"));
  m.def(
      "is_total_derivative",
      [](const std::string& text, const std::string& x, const std::vector<std::string>& deps) {
        return is_total_derivative(read(text, x, deps));
      },
      py::arg("text"), py::arg("independent"), py::arg("dependents"));
  m.def(
      "expand",
      [](const std::string& text, const std::string& x, const std::vector<std::string>& deps) {
        return to_prefix(read(text, x, deps));
      },
      py::arg("text"), py::arg("independent"), py::arg("dependents"));
}
