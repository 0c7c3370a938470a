#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "engineir/analysis.hpp"
#include "engineir/interpreter.hpp"
#include "engineir/rewrites.hpp"
#include "engineir/schedule_graph.hpp"

namespace engineir {

inline constexpr std::string_view kVersion = "0.1.0";

struct ExploreOptions {
  std::size_t iterations = 12;
  std::size_t max_nodes = 100000;
  std::size_t max_classes = std::numeric_limits<std::size_t>::max();
  double time_budget_s = std::numeric_limits<double>::infinity();
  std::vector<std::string> rules{"all"};
  std::size_t samples = 50;
  std::uint64_t seed = 0;
  std::size_t max_depth = 32;
  FactorPolicy policy = FactorPolicy::AllDivisors;

  RunLimits limits() const { return {iterations, max_nodes, max_classes, time_budget_s}; }
};

/// A workload lowered, seeded into an e-graph and saturated.
struct Exploration {
  Workload workload;
  Term seed;
  ScheduleGraph graph;
  ClassId root = 0;
  RunReport run;
};

Exploration explore(const Workload &w, const ExploreOptions &options,
                    const IterationObserver &observer = {});

nlohmann::ordered_json design_json(const DesignPoint &d);

/// The machine-readable exploration report. Contains no timing data, so the
/// same workload, options and seed always give byte-identical output.
nlohmann::ordered_json explore_report(const Exploration &e, const ExploreOptions &options);

struct VerifyOptions {
  /// Random input sets per sampled design.
  std::size_t trials = 10;
  /// When set, one extra check per design uses `<dir>/<input>.json`.
  std::optional<std::filesystem::path> vectors;
};

struct Counterexample {
  std::string term;
  std::uint64_t input_seed = 0;
  std::string source;  // "random" or the vectors directory
};

struct VerifyResult {
  std::size_t designs = 0;
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::optional<Counterexample> first_failure;

  bool passed() const { return failures == 0; }
};

/// Samples `options.samples` designs and compares eval_term against
/// eval_workload on random inputs (|x| <= 2^20). Input set j of a run with
/// seed s is drawn from Rng(mix_seed(s, j)).
VerifyResult verify(const Exploration &e, const ExploreOptions &options,
                    const VerifyOptions &verify_options);

struct StatsRow {
  std::size_t iteration;
  std::size_t nodes;
  std::size_t classes;
  BigCount count;
};

/// One row per iteration (row 0 is the seed) with the root term count at
/// options.max_depth.
std::vector<StatsRow> stats(const Workload &w, const ExploreOptions &options);
std::string stats_csv(const std::vector<StatsRow> &rows);

}  // namespace engineir
