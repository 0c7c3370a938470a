#pragma once

#include <optional>
#include <span>

#include "engineir/egraph.hpp"
#include "engineir/term.hpp"

namespace engineir {

/// Schedule terms as an e-graph language. The class analysis is the term
/// type (tile shape plus kernel facts). Merging classes whose tilings differ
/// means a rewrite changed a shape, so it is rejected. Kernel kinds are only
/// compared through their split axes: a kind-swapping rewrite is left for
/// the interpreter to catch.
struct ScheduleLang {
  using Label = engineir::Label;
  using Data = TermType;

  ShapeEnv env;

  static std::size_t hash(const Label &label) { return hash_label(label); }
  TermType make(const Label &label, std::span<const TermType *const> kids) const {
    return infer_node(label, kids, env);
  }
  void join(TermType &into, const TermType &from) const;
};

using ScheduleGraph = EGraph<ScheduleLang>;
using ScheduleNode = ScheduleGraph::ENode;
using ScheduleCounter = TermCounter<ScheduleGraph>;

ClassId add_term(ScheduleGraph &g, const Term &t);
/// The class representing `t`, if `t` is represented in `g`.
std::optional<ClassId> lookup_term(const ScheduleGraph &g, const Term &t);

/// Uniform-rank access to terms: the term of rank `rank` among the
/// count(root, depth) terms of depth <= depth.
Term term_at(const ScheduleCounter &counter, ClassId root, std::size_t depth, BigCount rank);

}  // namespace engineir
