// Thin bindings: structured results cross the boundary as JSON text and
// are decoded by the Python package.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "engineir/errors.hpp"
#include "engineir/explore.hpp"
#include "engineir/lowering.hpp"

namespace py = pybind11;
using namespace engineir;

namespace {

FactorPolicy policy_from(const std::string &name) {
  if (name == "all_divisors") return FactorPolicy::AllDivisors;
  if (name == "pow2") return FactorPolicy::PowersOfTwo;
  if (name == "binary") return FactorPolicy::BinaryOnly;
  throw Error("UsageError", "unknown factor policy '" + name + "'");
}

ExploreOptions options_from(const py::dict &kw) {
  ExploreOptions o;
  if (kw.contains("iterations")) o.iterations = kw["iterations"].cast<std::size_t>();
  if (kw.contains("max_nodes")) o.max_nodes = kw["max_nodes"].cast<std::size_t>();
  if (kw.contains("max_classes") && !kw["max_classes"].is_none())
    o.max_classes = kw["max_classes"].cast<std::size_t>();
  if (kw.contains("time_budget_s") && !kw["time_budget_s"].is_none())
    o.time_budget_s = kw["time_budget_s"].cast<double>();
  if (kw.contains("rules")) o.rules = kw["rules"].cast<std::vector<std::string>>();
  if (kw.contains("samples")) o.samples = kw["samples"].cast<std::size_t>();
  if (kw.contains("seed")) o.seed = kw["seed"].cast<std::uint64_t>();
  if (kw.contains("max_depth")) o.max_depth = kw["max_depth"].cast<std::size_t>();
  if (kw.contains("factors")) o.policy = policy_from(kw["factors"].cast<std::string>());
  return o;
}

ShapeEnv env_from(const std::map<std::string, std::vector<std::int64_t>> &shapes) {
  ShapeEnv env;
  for (const auto &[name, dims] : shapes) env.emplace(name, TensorShape(dims));
  return env;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.attr("__version__") = std::string(kVersion);

  static py::exception<Error> error(m, "NativeError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error &e) {
      py::object exc = error;
      py::object inst = exc(py::str(e.what()));
      inst.attr("code") = e.code();
      PyErr_SetObject(exc.ptr(), inst.ptr());
    }
  });

  m.def("check_workload", [](const std::string &text, const std::string &name) {
    return print_workload(infer_shapes(parse_workload(text, name)));
  }, py::arg("text"), py::arg("name") = "workload",
     "Parse and shape-check a workload; returns it pretty-printed.");

  m.def("lower", [](const std::string &text) { return print_term(lower(parse_workload(text))); },
        py::arg("text"));

  m.def("typecheck_term", [](const std::string &term,
                             const std::map<std::string, std::vector<std::int64_t>> &shapes) {
    return typecheck_term(parse_term(term), env_from(shapes)).dims;
  }, py::arg("term"), py::arg("shapes"));

  m.def("inventory", [](const std::string &term) {
    std::vector<std::pair<std::string, std::int64_t>> out;
    for (const auto &[inst, n] : hardware_inventory(parse_term(term))) out.emplace_back(inst.str(), n);
    return out;
  }, py::arg("term"));

  m.def("eval_term_json", [](const std::string &term, const std::string &inputs) {
    ValueEnv env;
    auto parsed = nlohmann::json::parse(inputs);
    for (const auto &[name, value] : parsed.items())
      env.emplace(name, tensor_from_json(value));
    return tensor_to_json(eval_term(parse_term(term), env)).dump();
  }, py::arg("term"), py::arg("inputs_json"));

  m.def("explore_json", [](const std::string &text, const std::string &name, const py::dict &kw) {
    auto opts = options_from(kw);
    auto w = parse_workload(text, name);
    py::gil_scoped_release release;
    return explore_report(explore(w, opts), opts).dump();
  }, py::arg("text"), py::arg("name"), py::arg("options"));

  m.def("verify_json", [](const std::string &text, const py::dict &kw, std::size_t trials) {
    auto opts = options_from(kw);
    auto w = parse_workload(text);
    py::gil_scoped_release release;
    auto r = verify(explore(w, opts), opts, {trials, std::nullopt});
    nlohmann::json out{{"designs", r.designs}, {"checks", r.checks}, {"failures", r.failures},
                       {"counterexample", nullptr}};
    if (r.first_failure)
      out["counterexample"] = {{"term", r.first_failure->term},
                               {"input_seed", r.first_failure->input_seed}};
    return out.dump();
  }, py::arg("text"), py::arg("options"), py::arg("trials") = 10);

  m.def("stats", [](const std::string &text, const py::dict &kw) {
    auto opts = options_from(kw);
    auto w = parse_workload(text);
    std::vector<std::tuple<std::size_t, std::size_t, std::size_t, std::string>> out;
    for (const auto &row : stats(w, opts))
      out.emplace_back(row.iteration, row.nodes, row.classes, row.count.str());
    return out;
  }, py::arg("text"), py::arg("options"));
}
