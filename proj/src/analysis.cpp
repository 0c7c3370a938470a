#include "engineir/analysis.hpp"

#include <algorithm>
#include <set>

#include "engineir/errors.hpp"
#include "engineir/random.hpp"

namespace engineir {

CostMetrics cost_of(const Term &t) {
  CostMetrics m;
  auto visit = [&m](auto &&self, const Term &node, std::int64_t trips, std::int64_t copies) -> void {
    switch (node.label.op) {
      case NodeOp::Input: return;
      case NodeOp::Engine:
        m.area_proxy += copies * node.label.engine.size();
        m.latency_proxy += trips;
        m.engine_count += copies;
        for (const auto &c : node.children) self(self, c, 1, 1);
        return;
      case NodeOp::Seq: self(self, node.children[0], trips * node.label.factor, copies); return;
      case NodeOp::Par: self(self, node.children[0], trips, copies * node.label.factor); return;
      case NodeOp::Buffer: self(self, node.children[0], 1, 1); return;
    }
  };
  visit(visit, t, 1, 1);
  return m;
}

DesignPoint make_design(Term t) {
  auto inv = hardware_inventory(t);
  auto cost = cost_of(t);
  return DesignPoint{std::move(t), std::move(inv), cost};
}

bool is_all_hardware(const Term &t) { return count_op(t, NodeOp::Seq) == 0; }

bool is_minimal_hardware(const Term &t) {
  if (count_op(t, NodeOp::Par) != 0) return false;
  auto check = [](auto &&self, const Term &node) -> bool {
    if (node.label.op == NodeOp::Engine)
      for (const auto &axis : split_axes(node.label.engine.kind))
        if (node.label.engine.params[axis.param_index] != 1) return false;
    for (const auto &c : node.children)
      if (!self(self, c)) return false;
    return true;
  };
  return check(check, t);
}

std::vector<DesignPoint> sample_designs(const ScheduleCounter &counter, ClassId root,
                                        std::size_t n, std::uint64_t seed) {
  const auto depth = counter.max_depth();
  const auto &total = counter.count(root, depth);
  if (total == 0)
    throw EmptyClass("class " + std::to_string(root) + " has no terms of depth <= " +
                     std::to_string(depth));
  Rng rng(seed);
  std::vector<DesignPoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(make_design(term_at(counter, root, depth, uniform_below(rng, total))));
  return out;
}

std::vector<DesignPoint> sample_designs(const ScheduleGraph &g, ClassId root, std::size_t n,
                                        std::uint64_t seed, std::size_t max_depth) {
  return sample_designs(ScheduleCounter(g, max_depth), root, n, seed);
}

std::string_view objective_name(Objective o) {
  return o == Objective::MinArea ? "min_area" : "min_latency";
}

namespace {

/// Best known term for one class. The cost splits into the part that
/// enclosing loops scale (`chain`) and the operands' cost (`operands`).
/// Within a kernel class every node reads the same operand classes, so
/// minimizing chain + operands also minimizes any scaled chain.
struct Best {
  bool known = false;
  std::int64_t chain = 0;
  std::int64_t operands = 0;
  std::size_t size = 0;
  std::string printed;
  std::size_t node = 0;

  std::int64_t total() const { return chain + operands; }
  bool better_than(const Best &o) const {
    if (!o.known) return true;
    if (total() != o.total()) return total() < o.total();
    if (size != o.size) return size < o.size;
    return printed < o.printed;
  }
};

}  // namespace

DesignPoint extract_extreme(const ScheduleGraph &g, ClassId root, Objective objective) {
  const auto ids = g.class_ids();
  std::vector<Best> best(g.id_bound());
  bool progress = true;
  for (std::size_t pass = 0; progress && pass <= ids.size() + 1; ++pass) {
    progress = false;
    for (auto c : ids) {
      const auto &nodes = g.eclass(c).nodes;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto &n = nodes[i];
        Best cand;
        cand.known = true;
        cand.node = i;
        cand.size = 1;
        bool ready = true;
        for (auto child : n.children) ready = ready && best[g.find(child)].known;
        if (!ready) continue;
        const auto &l = n.label;
        std::string printed = l.op == NodeOp::Input ? l.name : "(" + l.str();
        for (auto child : n.children) {
          const auto &b = best[g.find(child)];
          cand.size += b.size;
          printed += " " + b.printed;
        }
        if (l.op != NodeOp::Input) printed += ")";
        cand.printed = std::move(printed);
        switch (l.op) {
          case NodeOp::Input: break;
          case NodeOp::Engine:
            cand.chain = objective == Objective::MinArea ? l.engine.size() : 1;
            for (auto child : n.children) cand.operands += best[g.find(child)].total();
            break;
          case NodeOp::Seq:
          case NodeOp::Par: {
            const auto &b = best[g.find(n.children[0])];
            bool scales = (l.op == NodeOp::Par) == (objective == Objective::MinArea);
            cand.chain = scales ? b.chain * l.factor : b.chain;
            cand.operands = b.operands;
            break;
          }
          case NodeOp::Buffer: cand.chain = best[g.find(n.children[0])].total(); break;
        }
        if (cand.better_than(best[c])) {
          best[c] = std::move(cand);
          progress = true;
        }
      }
    }
  }
  auto r = g.find(root);
  if (!best[r].known) throw EmptyClass("class " + std::to_string(root) + " has no finite term");
  auto build = [&](auto &&self, ClassId c) -> Term {
    c = g.find(c);
    const auto &n = g.eclass(c).nodes[best[c].node];
    Term t{n.label, {}};
    for (auto child : n.children) t.children.push_back(self(self, child));
    return t;
  };
  return make_design(build(build, r));
}

namespace {

MetricSummary summarize(std::vector<std::int64_t> values) {
  std::sort(values.begin(), values.end());
  MetricSummary s;
  s.min = values.front();
  s.max = values.back();
  auto n = values.size();
  s.median = n % 2 ? static_cast<double>(values[n / 2])
                   : (static_cast<double>(values[n / 2 - 1]) + static_cast<double>(values[n / 2])) / 2.0;
  return s;
}

}  // namespace

DiversityReport diversity_metrics(std::span<const DesignPoint> designs) {
  DiversityReport r;
  r.designs = designs.size();
  if (designs.empty()) return r;
  std::set<std::string> terms;
  std::set<Inventory> inventories;
  std::vector<std::int64_t> area, latency, engines;
  for (const auto &d : designs) {
    terms.insert(print_term(d.term));
    inventories.insert(d.inventory);
    area.push_back(d.cost.area_proxy);
    latency.push_back(d.cost.latency_proxy);
    engines.push_back(d.cost.engine_count);
    r.has_all_hardware = r.has_all_hardware || is_all_hardware(d.term);
    r.has_minimal_hardware = r.has_minimal_hardware || is_minimal_hardware(d.term);
  }
  r.distinct_terms = terms.size();
  r.distinct_inventories = inventories.size();
  r.area = summarize(std::move(area));
  r.latency = summarize(std::move(latency));
  r.engines = summarize(std::move(engines));
  return r;
}

}  // namespace engineir
