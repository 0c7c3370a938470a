#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "engineir/schedule_graph.hpp"
#include "engineir/term.hpp"

namespace engineir {

/// Deliberately crude, unitless proxies for ranking designs.
///   area_proxy    - sum over engines of copies * product of parameters
///   latency_proxy - sum over engine leaves of the product of the Seq
///                   factors enclosing it (sequential invocations)
///   engine_count  - total physical engine copies
/// "Enclosing" stops at buffers: an engine's operands are computed once,
/// outside the loops wrapped around that engine.
struct CostMetrics {
  std::int64_t area_proxy = 0;
  std::int64_t latency_proxy = 0;
  std::int64_t engine_count = 0;

  friend bool operator==(const CostMetrics &, const CostMetrics &) = default;
};

CostMetrics cost_of(const Term &t);

struct DesignPoint {
  Term term;
  Inventory inventory;
  CostMetrics cost;
};

DesignPoint make_design(Term t);

/// True when no Seq node appears: every kernel invocation has its own engine.
bool is_all_hardware(const Term &t);
/// True when every engine has all splittable parameters at 1 and no engine
/// is replicated: the least hardware a schedule can use.
bool is_minimal_hardware(const Term &t);

/// `n` designs drawn uniformly (with replacement) from the terms of depth
/// <= max_depth rooted at `root`. Deterministic in `seed`.
std::vector<DesignPoint> sample_designs(const ScheduleGraph &g, ClassId root, std::size_t n,
                                        std::uint64_t seed, std::size_t max_depth);
std::vector<DesignPoint> sample_designs(const ScheduleCounter &counter, ClassId root,
                                        std::size_t n, std::uint64_t seed);

enum class Objective { MinArea, MinLatency };
std::string_view objective_name(Objective o);

/// Cheapest design in the class under the objective, by dynamic
/// programming over classes. Ties go to the smaller term, then to the
/// lexicographically smaller printed term.
DesignPoint extract_extreme(const ScheduleGraph &g, ClassId root, Objective objective);

struct MetricSummary {
  std::int64_t min = 0;
  std::int64_t max = 0;
  double median = 0;
};

struct DiversityReport {
  std::size_t designs = 0;
  std::size_t distinct_terms = 0;
  std::size_t distinct_inventories = 0;
  MetricSummary area;
  MetricSummary latency;
  MetricSummary engines;
  bool has_all_hardware = false;
  bool has_minimal_hardware = false;
};

DiversityReport diversity_metrics(std::span<const DesignPoint> designs);

}  // namespace engineir
