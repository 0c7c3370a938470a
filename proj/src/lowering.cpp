#include "engineir/lowering.hpp"

#include <map>

#include "engineir/errors.hpp"

namespace engineir {

namespace {

TensorShape value_shape(const Workload &w, const std::string &ref) {
  if (const auto *s = w.input_shape(ref)) return *s;
  const auto *n = w.node(ref);
  if (!n) throw UnboundName(ref);
  if (!n->out_shape) throw ShapeMismatch("node " + ref + " has no inferred shape");
  return *n->out_shape;
}

}  // namespace

EngineInstance full_engine(const Workload &w, const WorkloadNode &node) {
  const auto &out = node.out_shape.value();
  switch (node.kind) {
    case OpKind::Relu:
    case OpKind::Add: return {node.kind, {out.numel()}};
    case OpKind::Matmul: {
      auto a = value_shape(w, node.args[0]);
      return {node.kind, {out[0], out[1], a[1]}};
    }
    case OpKind::Conv2d: {
      auto k = value_shape(w, node.args[1]);
      return {node.kind, {out[2], out[3], k[1], k[2]}};
    }
  }
  throw ShapeMismatch("unknown operator");
}

ShapeEnv input_env(const Workload &w) { return ShapeEnv(w.inputs.begin(), w.inputs.end()); }

Term lower(const Workload &workload) {
  bool inferred = true;
  for (const auto &n : workload.nodes) inferred = inferred && n.out_shape.has_value();
  const Workload w = inferred ? workload : infer_shapes(workload);

  std::map<std::string, Term> lowered;
  for (const auto &n : w.nodes) {
    std::vector<Term> args;
    for (const auto &a : n.args) {
      if (w.input_shape(a))
        args.push_back(input(a));
      else
        args.push_back(lowered.at(a));
    }
    lowered[n.id] = buffer(*n.out_shape, engine(full_engine(w, n), std::move(args)));
  }
  return lowered.at(w.output);
}

}  // namespace engineir
