#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "engineir/pattern.hpp"

namespace engineir {

/// Which loop factors the splitting rules may introduce.
enum class FactorPolicy : std::uint8_t {
  AllDivisors,  ///< every divisor >= 2
  PowersOfTwo,  ///< divisors that are powers of two
  BinaryOnly,   ///< factor 2 only
};

bool factor_allowed(FactorPolicy policy, std::int64_t factor);
/// Divisors k of n with 2 <= k <= n that the policy allows, ascending.
std::vector<std::int64_t> split_factors(std::int64_t n, FactorPolicy policy);

/// A conditional rewrite lhs => rhs. `expand` turns one lhs match into the
/// substitutions the rhs is instantiated with; it filters (returns none)
/// and generates fresh scalars (e.g. one substitution per divisor). When
/// empty, the match substitution is used as is.
struct Rewrite {
  std::string name;
  /// Catalog entry the rule belongs to: "r1" .. "r5" or "r1-broken".
  std::string group;
  Pattern lhs;
  Pattern rhs;
  ScalarWhere where;
  std::function<std::vector<Subst>(const Subst &)> expand;

  std::vector<Subst> expansions(const Subst &s) const { return expand ? expand(s) : std::vector{s}; }
};

/// The catalog, for every operator kind and splittable axis:
///   r1 split:       engine(P=p)          => seq(axis, k, engine(P=p/k))   for k | p
///   r2 parallelize: seq(axis, k, e)      => par(axis, k, e)
///   r3 serialize:   par(axis, k, e)      => seq(axis, k, e)
///   r4 merge:       seq(axis, k, engine(P=q)) => engine(P=k*q)
///   r5 refactor:    seq(axis, k1*k2, e) <=> seq(axis, k1, seq(axis, k2, e))
std::vector<Rewrite> builtin_rules(FactorPolicy policy = FactorPolicy::AllDivisors);

/// A deliberately unsound variant of r1 that swaps the relu kernel for
/// add(x, x) inside the loop. Shape-preserving, so only the interpreter can
/// catch it; used as a negative control.
std::vector<Rewrite> broken_rules(FactorPolicy policy = FactorPolicy::AllDivisors);

/// Rules selected by group name ("r1".."r5", "r1-broken", "all"), in the
/// order given. Throws Error("UnknownRule") on an unknown name.
std::vector<Rewrite> select_rules(const std::vector<std::string> &groups,
                                  FactorPolicy policy = FactorPolicy::AllDivisors);

/// Matches `r` against the graph, instantiates the rhs for every
/// expansion, unions it with the matched class and rebuilds. Returns the
/// number of unions that changed the graph.
std::size_t apply_rewrite(ScheduleGraph &g, const Rewrite &r);

struct RunLimits {
  std::size_t max_iterations = 12;
  std::size_t max_nodes = 100000;
  std::size_t max_classes = std::numeric_limits<std::size_t>::max();
  double time_budget_s = std::numeric_limits<double>::infinity();
};

enum class StopReason : std::uint8_t { Saturated, IterationLimit, NodeLimit, ClassLimit, TimeLimit };
std::string_view stop_reason_name(StopReason reason);

struct RunReport {
  std::size_t iterations = 0;
  bool saturated = false;
  StopReason stop_reason = StopReason::IterationLimit;
  /// Graph size after each iteration; entry 0 is the seeded graph.
  std::vector<std::size_t> nodes;
  std::vector<std::size_t> classes;
  /// Changed unions per iteration (entry 0 is always 0).
  std::vector<std::size_t> unions;
};

/// Called with the iteration number (0 for the seed) after each rebuild.
using IterationObserver = std::function<void(std::size_t, const ScheduleGraph &)>;

/// Equality saturation: each iteration matches every rule against the
/// same frozen graph, then applies all matches in rule order, then
/// rebuilds. Stops when an iteration changes nothing or a limit trips.
RunReport run(ScheduleGraph &g, const std::vector<Rewrite> &rules, const RunLimits &limits,
              const IterationObserver &observer = {});

}  // namespace engineir
