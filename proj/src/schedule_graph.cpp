#include "engineir/schedule_graph.hpp"

#include <algorithm>

#include "engineir/errors.hpp"

namespace engineir {

namespace {

std::string describe(const TermType &t) {
  std::string out = t.shape.str();
  if (t.kernel)
    out += " tile of " + std::string(op_name(t.kernel->kind)) + " " + t.kernel->full.str();
  return out;
}

}  // namespace

namespace {

// Kernel kinds with the same split-axis table tile identically, so the
// analysis cannot tell them apart; telling them apart is the interpreter's job.
bool same_tiling(const TermType &a, const TermType &b) {
  if (a.shape != b.shape || a.kernel.has_value() != b.kernel.has_value()) return false;
  if (!a.kernel) return true;
  const auto &x = *a.kernel;
  const auto &y = *b.kernel;
  if (x.full != y.full || x.value_shape != y.value_shape) return false;
  auto ax = split_axes(x.kind);
  auto ay = split_axes(y.kind);
  return std::equal(ax.begin(), ax.end(), ay.begin(), ay.end(), [](const auto &p, const auto &q) {
    return p.axis == q.axis && p.param_index == q.param_index;
  });
}

}  // namespace

void ScheduleLang::join(TermType &into, const TermType &from) const {
  if (!same_tiling(into, from)) throw AnalysisConflict("cannot merge " + describe(into) + " with " + describe(from));
}

ClassId add_term(ScheduleGraph &g, const Term &t) {
  ScheduleNode node{t.label, {}};
  node.children.reserve(t.children.size());
  for (const auto &c : t.children) node.children.push_back(add_term(g, c));
  if (node.children.size() != t.label.arity())
    throw MalformedTerm("'" + t.label.str() + "' expects " + std::to_string(t.label.arity()) +
                        " children");
  return g.add(std::move(node));
}

std::optional<ClassId> lookup_term(const ScheduleGraph &g, const Term &t) {
  ScheduleNode node{t.label, {}};
  for (const auto &c : t.children) {
    auto id = lookup_term(g, c);
    if (!id) return std::nullopt;
    node.children.push_back(*id);
  }
  return g.lookup(node);
}

Term term_at(const ScheduleCounter &counter, ClassId root, std::size_t depth, BigCount rank) {
  return counter.unrank<Term>(root, depth, std::move(rank),
                              [](const Label &label, std::vector<Term> kids) {
                                return Term{label, std::move(kids)};
                              });
}

}  // namespace engineir
