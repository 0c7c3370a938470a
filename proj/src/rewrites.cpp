#include "engineir/rewrites.hpp"

#include "engineir/errors.hpp"

namespace engineir {

bool factor_allowed(FactorPolicy policy, std::int64_t factor) {
  if (factor < 2) return false;
  switch (policy) {
    case FactorPolicy::AllDivisors: return true;
    case FactorPolicy::PowersOfTwo: return (factor & (factor - 1)) == 0;
    case FactorPolicy::BinaryOnly: return factor == 2;
  }
  return false;
}

std::vector<std::int64_t> split_factors(std::int64_t n, FactorPolicy policy) {
  std::vector<std::int64_t> small;
  std::vector<std::int64_t> large;
  for (std::int64_t d = 1; d * d <= n; ++d) {
    if (n % d != 0) continue;
    small.push_back(d);
    if (d != n / d) large.push_back(n / d);
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  std::vector<std::int64_t> out;
  for (auto k : small)
    if (factor_allowed(policy, k)) out.push_back(k);
  return out;
}

namespace {

std::string param_var(const EngineDecl &decl, std::size_t i) { return "?" + std::string(decl.params[i]); }

/// `(engine kind (P0 ?P0) ... ?a0 ?a1)`, with parameter `replaced` swapped
/// for the scalar variable `replacement` when given.
Pattern engine_pattern(OpKind kind, std::optional<std::size_t> replaced = std::nullopt,
                       const std::string &replacement = {}) {
  const auto &decl = engine_decl(kind);
  Pattern p;
  p.op = NodeOp::Engine;
  p.kind = kind;
  for (std::size_t i = 0; i < decl.params.size(); ++i)
    p.params.push_back(Scalar::of(replaced == i ? replacement : param_var(decl, i)));
  for (int i = 0; i < op_arity(kind); ++i) {
    Pattern arg;
    arg.var = "?a" + std::to_string(i);
    p.children.push_back(std::move(arg));
  }
  return p;
}

Pattern loop_pattern(NodeOp op, Scalar axis, Scalar factor, Pattern child) {
  Pattern p;
  p.op = op;
  p.axis = std::move(axis);
  p.factor = std::move(factor);
  p.children.push_back(std::move(child));
  return p;
}

Pattern term_var(std::string name) {
  Pattern p;
  p.var = std::move(name);
  return p;
}

Rewrite split_rule(OpKind kind, SplitAxis axis, FactorPolicy policy) {
  const auto &decl = engine_decl(kind);
  auto pvar = param_var(decl, axis.param_index);
  Rewrite r;
  r.group = "r1";
  r.name = "r1-split/" + std::string(op_name(kind)) + "/" + std::to_string(axis.axis);
  r.lhs = engine_pattern(kind);
  r.rhs = loop_pattern(NodeOp::Seq, Scalar::lit(axis.axis), Scalar::of("?k"),
                       engine_pattern(kind, axis.param_index, "?q"));
  r.expand = [pvar, policy](const Subst &s) {
    std::vector<Subst> out;
    auto p = s.scalars.at(pvar);
    for (auto k : split_factors(p, policy)) {
      Subst e = s;
      e.scalars["?k"] = k;
      e.scalars["?q"] = p / k;
      out.push_back(std::move(e));
    }
    return out;
  };
  return r;
}

Rewrite merge_rule(OpKind kind, SplitAxis axis) {
  const auto &decl = engine_decl(kind);
  auto pvar = param_var(decl, axis.param_index);
  Rewrite r;
  r.group = "r4";
  r.name = "r4-merge/" + std::string(op_name(kind)) + "/" + std::to_string(axis.axis);
  r.lhs = loop_pattern(NodeOp::Seq, Scalar::lit(axis.axis), Scalar::of("?k"), engine_pattern(kind));
  r.rhs = engine_pattern(kind, axis.param_index, "?kq");
  r.expand = [pvar](const Subst &s) {
    Subst e = s;
    e.scalars["?kq"] = s.scalars.at("?k") * s.scalars.at(pvar);
    return std::vector{e};
  };
  return r;
}

Rewrite swap_rule(NodeOp from, NodeOp to, std::string group, std::string name) {
  Rewrite r;
  r.group = std::move(group);
  r.name = std::move(name);
  r.lhs = loop_pattern(from, Scalar::of("?axis"), Scalar::of("?k"), term_var("?e"));
  r.rhs = loop_pattern(to, Scalar::of("?axis"), Scalar::of("?k"), term_var("?e"));
  return r;
}

std::vector<Rewrite> refactor_rules(FactorPolicy policy) {
  Rewrite split;
  split.group = "r5";
  split.name = "r5-refactor/split";
  split.lhs = loop_pattern(NodeOp::Seq, Scalar::of("?axis"), Scalar::of("?k"), term_var("?e"));
  split.rhs = loop_pattern(NodeOp::Seq, Scalar::of("?axis"), Scalar::of("?k1"),
                           loop_pattern(NodeOp::Seq, Scalar::of("?axis"), Scalar::of("?k2"),
                                        term_var("?e")));
  split.expand = [policy](const Subst &s) {
    std::vector<Subst> out;
    auto k = s.scalars.at("?k");
    for (auto k1 : split_factors(k, policy)) {
      auto k2 = k / k1;
      if (!factor_allowed(policy, k2)) continue;
      Subst e = s;
      e.scalars["?k1"] = k1;
      e.scalars["?k2"] = k2;
      out.push_back(std::move(e));
    }
    return out;
  };

  Rewrite fuse;
  fuse.group = "r5";
  fuse.name = "r5-refactor/fuse";
  fuse.lhs = split.rhs;
  fuse.rhs = split.lhs;
  fuse.expand = [policy](const Subst &s) {
    Subst e = s;
    e.scalars["?k"] = s.scalars.at("?k1") * s.scalars.at("?k2");
    if (!factor_allowed(policy, e.scalars["?k"])) return std::vector<Subst>{};
    return std::vector{e};
  };
  return {std::move(split), std::move(fuse)};
}

std::vector<Rewrite> group_rules(std::string_view group, FactorPolicy policy) {
  std::vector<Rewrite> out;
  if (group == "r1") {
    for (auto kind : kAllOpKinds)
      for (const auto &axis : split_axes(kind)) out.push_back(split_rule(kind, axis, policy));
  } else if (group == "r2") {
    out.push_back(swap_rule(NodeOp::Seq, NodeOp::Par, "r2", "r2-parallelize"));
  } else if (group == "r3") {
    out.push_back(swap_rule(NodeOp::Par, NodeOp::Seq, "r3", "r3-serialize"));
  } else if (group == "r4") {
    for (auto kind : kAllOpKinds)
      for (const auto &axis : split_axes(kind)) out.push_back(merge_rule(kind, axis));
  } else if (group == "r5") {
    out = refactor_rules(policy);
  } else if (group == "r1-broken") {
    out = broken_rules(policy);
  } else {
    throw Error("UnknownRule", "unknown rule group '" + std::string(group) + "'");
  }
  return out;
}

}  // namespace

std::vector<Rewrite> builtin_rules(FactorPolicy policy) {
  return select_rules({"r1", "r2", "r3", "r4", "r5"}, policy);
}

std::vector<Rewrite> broken_rules(FactorPolicy policy) {
  Rewrite r;
  r.group = "r1-broken";
  r.name = "r1-broken/relu/0";
  r.lhs = parse_pattern("(engine relu (W ?W) ?x)");
  r.rhs = parse_pattern("(seq 0 ?k (engine add (W ?q) ?x ?x))");
  r.expand = [policy](const Subst &s) {
    std::vector<Subst> out;
    auto w = s.scalars.at("?W");
    for (auto k : split_factors(w, policy)) {
      Subst e = s;
      e.scalars["?k"] = k;
      e.scalars["?q"] = w / k;
      out.push_back(std::move(e));
    }
    return out;
  };
  return {std::move(r)};
}

std::vector<Rewrite> select_rules(const std::vector<std::string> &groups, FactorPolicy policy) {
  std::vector<Rewrite> out;
  for (const auto &g : groups) {
    if (g == "all") {
      auto all = builtin_rules(policy);
      out.insert(out.end(), all.begin(), all.end());
      continue;
    }
    auto rules = group_rules(g, policy);
    out.insert(out.end(), rules.begin(), rules.end());
  }
  return out;
}

namespace {

/// Applies the matches of one rule; stops early once `node_cap` hashcons
/// entries exist. Returns changed unions.
std::size_t apply_matches(ScheduleGraph &g, const Rewrite &r, const std::vector<Match> &matches,
                          std::size_t node_cap, bool &capped) {
  std::size_t changed = 0;
  for (const auto &m : matches) {
    for (const auto &s : r.expansions(m.subst)) {
      auto id = instantiate(g, r.rhs, s);
      if (g.merge(m.eclass, id).second) ++changed;
      if (g.hashcons_size() > node_cap) {
        capped = true;
        return changed;
      }
    }
  }
  return changed;
}

}  // namespace

std::size_t apply_rewrite(ScheduleGraph &g, const Rewrite &r) {
  g.rebuild();
  auto matches = ematch(g, r.lhs, r.where);
  bool capped = false;
  auto changed = apply_matches(g, r, matches, std::numeric_limits<std::size_t>::max(), capped);
  g.rebuild();
  return changed;
}

std::string_view stop_reason_name(StopReason reason) {
  switch (reason) {
    case StopReason::Saturated: return "saturated";
    case StopReason::IterationLimit: return "iteration_limit";
    case StopReason::NodeLimit: return "node_limit";
    case StopReason::ClassLimit: return "class_limit";
    case StopReason::TimeLimit: return "time_limit";
  }
  return "unknown";
}

RunReport run(ScheduleGraph &g, const std::vector<Rewrite> &rules, const RunLimits &limits,
              const IterationObserver &observer) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto out_of_time = [&] {
    return std::chrono::duration<double>(Clock::now() - start).count() > limits.time_budget_s;
  };

  RunReport report;
  g.rebuild();
  auto record = [&](std::size_t unions) {
    report.nodes.push_back(g.num_nodes());
    report.classes.push_back(g.num_classes());
    report.unions.push_back(unions);
    if (observer) observer(report.iterations, g);
  };
  record(0);

  for (;;) {
    if (report.iterations >= limits.max_iterations) {
      report.stop_reason = StopReason::IterationLimit;
      break;
    }
    if (out_of_time()) {
      report.stop_reason = StopReason::TimeLimit;
      break;
    }
    std::vector<std::vector<Match>> matches;
    matches.reserve(rules.size());
    for (const auto &r : rules) matches.push_back(ematch(g, r.lhs, r.where));

    std::size_t changed = 0;
    bool capped = false;
    for (std::size_t i = 0; i < rules.size() && !capped; ++i)
      changed += apply_matches(g, rules[i], matches[i], limits.max_nodes, capped);
    g.rebuild();
    ++report.iterations;
    record(changed);

    if (capped || g.num_nodes() > limits.max_nodes) {
      report.stop_reason = StopReason::NodeLimit;
      break;
    }
    if (g.num_classes() > limits.max_classes) {
      report.stop_reason = StopReason::ClassLimit;
      break;
    }
    if (changed == 0) {
      report.saturated = true;
      report.stop_reason = StopReason::Saturated;
      break;
    }
  }
  return report;
}

}  // namespace engineir
