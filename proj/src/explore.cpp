#include "engineir/explore.hpp"

#include <cmath>
#include <sstream>

#include "engineir/lowering.hpp"

namespace engineir {

Exploration explore(const Workload &w, const ExploreOptions &options,
                    const IterationObserver &observer) {
  Exploration e{infer_shapes(w), {}, ScheduleGraph(ScheduleLang{}), 0, {}};
  e.seed = lower(e.workload);
  e.graph = ScheduleGraph(ScheduleLang{input_env(e.workload)});
  e.root = add_term(e.graph, e.seed);
  auto rules = select_rules(options.rules, options.policy);
  e.run = run(e.graph, rules, options.limits(), observer);
  e.root = e.graph.find(e.root);
  return e;
}

nlohmann::ordered_json design_json(const DesignPoint &d) {
  nlohmann::ordered_json inv = nlohmann::ordered_json::array();
  for (const auto &[inst, copies] : d.inventory)
    inv.push_back(nlohmann::ordered_json{{"engine", inst.str()}, {"count", copies}});
  return nlohmann::ordered_json{{"term", print_term(d.term)},
                                {"inventory", std::move(inv)},
                                {"area_proxy", d.cost.area_proxy},
                                {"latency_proxy", d.cost.latency_proxy},
                                {"engine_count", d.cost.engine_count}};
}

namespace {

std::string_view policy_name(FactorPolicy p) {
  switch (p) {
    case FactorPolicy::AllDivisors: return "all_divisors";
    case FactorPolicy::PowersOfTwo: return "pow2";
    case FactorPolicy::BinaryOnly: return "binary";
  }
  return "?";
}

nlohmann::ordered_json summary_json(const MetricSummary &s) {
  return {{"min", s.min}, {"max", s.max}, {"median", s.median}};
}

nlohmann::ordered_json workload_json(const Workload &w) {
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  for (const auto &[name, shape] : w.inputs) inputs[name] = shape.dims;
  nlohmann::ordered_json ops = nlohmann::ordered_json::array();
  for (const auto &n : w.nodes)
    ops.push_back({{"id", n.id},
                   {"kind", op_name(n.kind)},
                   {"args", n.args},
                   {"shape", n.out_shape ? n.out_shape->dims : std::vector<std::int64_t>{}}});
  return {{"name", w.name}, {"ops", std::move(ops)}, {"inputs", std::move(inputs)}, {"output", w.output}};
}

}  // namespace

nlohmann::ordered_json explore_report(const Exploration &e, const ExploreOptions &options) {
  ScheduleCounter counter(e.graph, options.max_depth);
  const auto &root_count = counter.count(e.root, options.max_depth);
  std::vector<DesignPoint> samples;
  if (options.samples > 0 && root_count > 0)
    samples = sample_designs(counter, e.root, options.samples, options.seed);

  nlohmann::ordered_json report;
  report["workload"] = workload_json(e.workload);
  report["run"] = {{"iterations", e.run.iterations},
                   {"saturated", e.run.saturated},
                   {"stop_reason", stop_reason_name(e.run.stop_reason)},
                   {"nodes", e.run.nodes},
                   {"classes", e.run.classes}};
  report["space"] = {{"root_count", root_count.str()}, {"max_depth", options.max_depth}};

  nlohmann::ordered_json sample_list = nlohmann::ordered_json::array();
  for (const auto &d : samples) sample_list.push_back(design_json(d));
  report["samples"] = std::move(sample_list);

  auto div = diversity_metrics(samples);
  report["diversity"] = {{"designs", div.designs},
                         {"distinct_terms", div.distinct_terms},
                         {"distinct_inventories", div.distinct_inventories},
                         {"area_proxy", summary_json(div.area)},
                         {"latency_proxy", summary_json(div.latency)},
                         {"engine_count", summary_json(div.engines)},
                         {"has_all_hardware_design", div.has_all_hardware},
                         {"has_minimal_hardware_design", div.has_minimal_hardware}};

  auto seed_design = make_design(e.seed);
  report["extremes"] = {{"seed", design_json(seed_design)},
                        {"min_area", design_json(extract_extreme(e.graph, e.root, Objective::MinArea))},
                        {"min_latency",
                         design_json(extract_extreme(e.graph, e.root, Objective::MinLatency))}};

  report["config"] = {{"flags",
                       {{"iters", options.iterations},
                        {"max_nodes", options.max_nodes},
                        {"max_classes", options.max_classes == std::numeric_limits<std::size_t>::max()
                                            ? nlohmann::ordered_json(nullptr)
                                            : nlohmann::ordered_json(options.max_classes)},
                        {"time_budget_s", std::isfinite(options.time_budget_s)
                                              ? nlohmann::ordered_json(options.time_budget_s)
                                              : nlohmann::ordered_json(nullptr)},
                        {"rules", options.rules},
                        {"samples", options.samples},
                        {"max_depth", options.max_depth},
                        {"factors", policy_name(options.policy)}}},
                      {"seed", options.seed},
                      {"rng", "mt19937_64"},
                      {"version", kVersion}};
  return report;
}

VerifyResult verify(const Exploration &e, const ExploreOptions &options,
                    const VerifyOptions &verify_options) {
  VerifyResult result;
  if (options.samples == 0) return result;
  auto designs = sample_designs(e.graph, e.root, options.samples, options.seed, options.max_depth);
  result.designs = designs.size();

  std::vector<std::pair<ValueEnv, TensorValue>> cases;
  for (std::size_t j = 0; j < verify_options.trials; ++j) {
    Rng rng(mix_seed(options.seed, j));
    auto env = random_inputs(e.workload, rng);
    auto expected = eval_workload(e.workload, env);
    cases.emplace_back(std::move(env), std::move(expected));
  }
  if (verify_options.vectors) {
    auto env = load_inputs(e.workload, *verify_options.vectors);
    auto expected = eval_workload(e.workload, env);
    cases.emplace_back(std::move(env), std::move(expected));
  }

  for (const auto &d : designs) {
    for (std::size_t j = 0; j < cases.size(); ++j) {
      ++result.checks;
      if (eval_term(d.term, cases[j].first) == cases[j].second) continue;
      ++result.failures;
      if (!result.first_failure) {
        bool from_vectors = j >= verify_options.trials;
        result.first_failure = Counterexample{
            print_term(d.term), from_vectors ? 0 : mix_seed(options.seed, j),
            from_vectors ? verify_options.vectors->string() : "random"};
      }
    }
  }
  return result;
}

std::vector<StatsRow> stats(const Workload &w, const ExploreOptions &options) {
  std::vector<StatsRow> rows;
  ClassId seed_root = 0;
  auto observe = [&](std::size_t iteration, const ScheduleGraph &g) {
    rows.push_back(StatsRow{iteration, g.num_nodes(), g.num_classes(),
                            count_terms(g, g.find(seed_root), options.max_depth)});
  };
  auto inferred = infer_shapes(w);
  ScheduleGraph g(ScheduleLang{input_env(inferred)});
  seed_root = add_term(g, lower(inferred));
  run(g, select_rules(options.rules, options.policy), options.limits(), observe);
  return rows;
}

std::string stats_csv(const std::vector<StatsRow> &rows) {
  std::ostringstream out;
  out << "iteration,nodes,classes,count_terms\n";
  for (const auto &r : rows)
    out << r.iteration << ',' << r.nodes << ',' << r.classes << ',' << r.count.str() << '\n';
  return out.str();
}

}  // namespace engineir
