#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "engineir/schedule_graph.hpp"

namespace engineir {

/// A scalar slot in a pattern label: a literal or a `?name` variable.
struct Scalar {
  std::optional<std::int64_t> value;
  std::string var;

  static Scalar lit(std::int64_t v) { return {v, {}}; }
  static Scalar of(std::string name) { return {std::nullopt, std::move(name)}; }
  bool is_var() const { return !value; }
  std::string str() const { return value ? std::to_string(*value) : var; }
};

/// Schedule-term skeleton with term variables (`?x` in child position) and
/// scalar variables (`?k` in axis, factor or parameter position). Written in
/// the term syntax, e.g. `(seq ?a ?k (engine relu (W ?w) ?x))`.
struct Pattern {
  std::string var;  // non-empty: this is a term variable
  NodeOp op = NodeOp::Input;
  std::string input;
  OpKind kind = OpKind::Relu;
  std::vector<Scalar> params;
  Scalar axis;
  Scalar factor;
  TensorShape shape;
  std::vector<Pattern> children;

  bool is_var() const { return !var.empty(); }
};

Pattern parse_pattern(std::string_view text);
std::string print_pattern(const Pattern &p);

struct Subst {
  std::map<std::string, ClassId> terms;
  std::map<std::string, std::int64_t> scalars;

  friend bool operator==(const Subst &, const Subst &) = default;
};

using ScalarPredicate = std::function<bool(std::int64_t)>;
using ScalarWhere = std::map<std::string, ScalarPredicate>;

struct Match {
  ClassId eclass;
  Subst subst;
};

/// Every (class, substitution) such that the instantiated pattern is
/// represented in that class. A scalar variable listed in `where` only
/// binds values its predicate accepts. Repeated scalar variables must bind
/// equal values; repeated term variables must bind the same class.
std::vector<Match> ematch(const ScheduleGraph &g, const Pattern &p, const ScalarWhere &where = {});

/// Adds the pattern instantiated under `s` and returns its class.
ClassId instantiate(ScheduleGraph &g, const Pattern &p, const Subst &s);

}  // namespace engineir
