#include "engineir/workload.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "engineir/errors.hpp"
#include "engineir/sexpr.hpp"

namespace engineir {

std::int64_t TensorShape::numel() const {
  std::int64_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

std::string TensorShape::str() const {
  std::string out = "(";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(dims[i]);
  }
  return out + ")";
}

void validate_shape(const TensorShape &shape) {
  if (shape.rank() < 1 || shape.rank() > 4)
    throw RankError("rank " + std::to_string(shape.rank()) + " outside [1, 4]");
  for (auto d : shape.dims)
    if (d < 1) throw RankError("non-positive dimension in " + shape.str());
}

std::string_view op_name(OpKind kind) {
  switch (kind) {
    case OpKind::Relu: return "relu";
    case OpKind::Add: return "add";
    case OpKind::Matmul: return "matmul";
    case OpKind::Conv2d: return "conv2d";
  }
  return "?";
}

std::optional<OpKind> op_from_name(std::string_view name) {
  for (auto kind : kAllOpKinds)
    if (op_name(kind) == name) return kind;
  return std::nullopt;
}

int op_arity(OpKind kind) { return kind == OpKind::Relu ? 1 : 2; }

bool is_elementwise(OpKind kind) { return kind == OpKind::Relu || kind == OpKind::Add; }

const TensorShape *Workload::input_shape(std::string_view input) const {
  for (const auto &[n, s] : inputs)
    if (n == input) return &s;
  return nullptr;
}

const WorkloadNode *Workload::node(std::string_view id) const {
  for (const auto &n : nodes)
    if (n.id == id) return &n;
  return nullptr;
}

const WorkloadNode &Workload::output_node() const {
  const auto *n = node(output);
  if (!n) throw UnboundName(output);
  return *n;
}

namespace {

TensorShape parse_shape(const sexpr::Node &node) {
  if (!node.is_list || node.items.empty()) sexpr::fail(node, "expected shape '(INT+)'");
  TensorShape shape;
  for (const auto &item : node.items) {
    auto v = item.as_int();
    if (!v) sexpr::fail(item, "expected integer dimension");
    if (*v < 1) sexpr::fail(item, "dimension must be >= 1");
    shape.dims.push_back(*v);
  }
  if (shape.rank() > 4) throw RankError("rank " + std::to_string(shape.rank()) + " exceeds 4");
  return shape;
}

class WorkloadBuilder {
 public:
  explicit WorkloadBuilder(Workload &w) : w_(w) {}

  void declare(const sexpr::Node &at, const std::string &name) {
    if (!sexpr::is_name(name)) sexpr::fail(at, "expected NAME");
    if (!defined_.insert(name).second) throw DuplicateName(name);
  }

  /// Returns the id of the value `expr` denotes, appending nodes as needed.
  std::string lower_expr(const sexpr::Node &expr, std::optional<std::string> bind = std::nullopt) {
    if (expr.is_atom()) {
      if (!sexpr::is_name(expr.atom)) sexpr::fail(expr, "expected NAME or '('");
      if (!defined_.count(expr.atom)) throw UnboundName(expr.atom);
      if (bind) {
        // (let y x) aliases an existing value.
        aliases_[*bind] = resolve(expr.atom);
        return *bind;
      }
      return resolve(expr.atom);
    }
    if (expr.items.empty()) sexpr::fail(expr, "expected operator name");
    const auto &head = expr.items[0];
    if (!head.is_atom() || !sexpr::is_name(head.atom)) sexpr::fail(head, "expected operator name");
    auto kind = op_from_name(head.atom);
    if (!kind) throw UnknownOp(head.atom);
    if (expr.items.size() < 2) sexpr::fail(expr, "operator needs at least one argument");
    std::vector<std::string> args;
    for (std::size_t i = 1; i < expr.items.size(); ++i) args.push_back(lower_expr(expr.items[i]));
    if (static_cast<int>(args.size()) != op_arity(*kind))
      sexpr::fail(expr, std::string(op_name(*kind)) + " expects " +
                            std::to_string(op_arity(*kind)) + " argument(s), got " +
                            std::to_string(args.size()));
    std::string id = bind ? *bind : "%" + std::to_string(anon_++);
    w_.nodes.push_back(WorkloadNode{id, *kind, std::move(args), std::nullopt});
    return id;
  }

 private:
  std::string resolve(const std::string &name) const {
    auto it = aliases_.find(name);
    return it == aliases_.end() ? name : it->second;
  }

  Workload &w_;
  std::set<std::string> defined_;
  std::map<std::string, std::string> aliases_;
  int anon_ = 0;
};

void prune_unreachable(Workload &w) {
  std::set<std::string> live{w.output};
  for (auto it = w.nodes.rbegin(); it != w.nodes.rend(); ++it)
    if (live.count(it->id)) live.insert(it->args.begin(), it->args.end());
  std::erase_if(w.nodes, [&](const WorkloadNode &n) { return !live.count(n.id); });
}

void print_expr(const Workload &w, const std::string &id, std::ostringstream &out) {
  const auto *n = w.node(id);
  if (!n || id[0] != '%') {
    out << id;
    return;
  }
  out << '(' << op_name(n->kind);
  for (const auto &a : n->args) {
    out << ' ';
    print_expr(w, a, out);
  }
  out << ')';
}

}  // namespace

Workload parse_workload(std::string_view text, std::string name) {
  auto top = sexpr::parse(text);
  if (!top.is_list || top.items.empty() || !top.items[0].is_atom("workload"))
    sexpr::fail(top, "expected '(workload ...)'");
  Workload w;
  w.name = std::move(name);
  WorkloadBuilder builder(w);
  bool have_output = false;
  for (std::size_t i = 1; i < top.items.size(); ++i) {
    const auto &form = top.items[i];
    if (!form.is_list || form.items.empty() || !form.items[0].is_atom())
      sexpr::fail(form, "expected '(input ...)', '(let ...)' or '(output ...)'");
    if (have_output) sexpr::fail(form, "nothing may follow '(output ...)'");
    const auto &keyword = form.items[0].atom;
    if (keyword == "input") {
      if (form.items.size() != 3) sexpr::fail(form, "expected '(input NAME shape)'");
      if (!w.nodes.empty()) sexpr::fail(form, "inputs must precede definitions");
      const auto &n = form.items[1];
      if (!n.is_atom()) sexpr::fail(n, "expected NAME");
      builder.declare(n, n.atom);
      w.inputs.emplace_back(n.atom, parse_shape(form.items[2]));
    } else if (keyword == "let") {
      if (form.items.size() != 3) sexpr::fail(form, "expected '(let NAME expr)'");
      const auto &n = form.items[1];
      if (!n.is_atom()) sexpr::fail(n, "expected NAME");
      builder.lower_expr(form.items[2], n.atom);
      builder.declare(n, n.atom);
    } else if (keyword == "output") {
      if (form.items.size() != 2) sexpr::fail(form, "expected '(output expr)'");
      w.output = builder.lower_expr(form.items[1]);
      if (!w.node(w.output)) sexpr::fail(form.items[1], "output must be an operator application");
      have_output = true;
    } else {
      sexpr::fail(form.items[0], "unknown form '" + keyword + "'");
    }
  }
  if (!have_output) sexpr::fail(top, "missing '(output expr)'");
  prune_unreachable(w);
  return w;
}

Workload infer_shapes(Workload w) {
  auto shape_of = [&](const std::string &ref, const std::map<std::string, TensorShape> &known) {
    if (const auto *s = w.input_shape(ref)) return *s;
    auto it = known.find(ref);
    if (it == known.end()) throw UnboundName(ref);
    return it->second;
  };
  auto mismatch = [](const WorkloadNode &n, const TensorShape &a, const TensorShape &b,
                     const std::string &why) {
    return ShapeMismatch("node " + n.id + " (" + std::string(op_name(n.kind)) + "): " + why +
                         ": " + a.str() + " vs " + b.str());
  };
  std::map<std::string, TensorShape> known;
  for (auto &n : w.nodes) {
    std::vector<TensorShape> in;
    for (const auto &a : n.args) in.push_back(shape_of(a, known));
    TensorShape out;
    switch (n.kind) {
      case OpKind::Relu:
        out = in[0];
        break;
      case OpKind::Add:
        if (in[0] != in[1]) throw mismatch(n, in[0], in[1], "operands differ");
        out = in[0];
        break;
      case OpKind::Matmul:
        if (in[0].rank() != 2 || in[1].rank() != 2)
          throw RankError("node " + n.id + ": matmul expects rank-2 operands");
        if (in[0][1] != in[1][0]) throw mismatch(n, in[0], in[1], "inner dimensions differ");
        out = TensorShape{in[0][0], in[1][1]};
        break;
      case OpKind::Conv2d: {
        if (in[0].rank() != 4 || in[1].rank() != 4)
          throw RankError("node " + n.id + ": conv2d expects rank-4 operands");
        const auto &d = in[0];
        const auto &k = in[1];
        if (d[1] != k[1]) throw mismatch(n, d, k, "channel counts differ");
        // The engine carries a single kernel-size parameter.
        if (k[2] != k[3]) throw mismatch(n, d, k, "kernel must be square");
        if (k[2] > d[2] || k[3] > d[3]) throw mismatch(n, d, k, "kernel larger than input");
        out = TensorShape{d[0], k[0], d[2] - k[2] + 1, d[3] - k[3] + 1};
        break;
      }
    }
    n.out_shape = out;
    known[n.id] = out;
  }
  return w;
}

std::string print_workload(const Workload &w) {
  std::ostringstream out;
  out << "(workload";
  for (const auto &[n, s] : w.inputs) out << "\n  (input " << n << ' ' << s.str() << ')';
  for (const auto &n : w.nodes) {
    if (n.id[0] == '%' || n.id == w.output) continue;
    out << "\n  (let " << n.id << " (" << op_name(n.kind);
    for (const auto &a : n.args) {
      out << ' ';
      print_expr(w, a, out);
    }
    out << "))";
  }
  out << "\n  (output ";
  if (w.output[0] == '%') {
    print_expr(w, w.output, out);
  } else {
    // Print the named output's definition inline; its name is cosmetic.
    const auto &n = w.output_node();
    out << '(' << op_name(n.kind);
    for (const auto &a : n.args) {
      out << ' ';
      print_expr(w, a, out);
    }
    out << ')';
  }
  out << "))\n";
  return out.str();
}

namespace {

/// Post-order numbering of the DAG reachable from the output: each node is
/// rendered as "kind(arg,arg)" with args as input names or "#k" back-refs.
std::vector<std::string> canonical_dag(const Workload &w) {
  std::map<std::string, std::size_t> index;
  std::vector<std::string> out;
  auto visit = [&](auto &&self, const std::string &id) -> std::string {
    if (w.input_shape(id)) return "in:" + id;
    if (auto it = index.find(id); it != index.end()) return "#" + std::to_string(it->second);
    const auto *n = w.node(id);
    if (!n) throw UnboundName(id);
    std::string rendered = std::string(op_name(n->kind)) + "(";
    for (std::size_t i = 0; i < n->args.size(); ++i) {
      if (i) rendered += ',';
      rendered += self(self, n->args[i]);
    }
    rendered += ')';
    index[id] = out.size();
    out.push_back(rendered);
    return "#" + std::to_string(index[id]);
  };
  visit(visit, w.output);
  return out;
}

}  // namespace

bool structurally_equal(const Workload &a, const Workload &b) {
  auto inputs = [](const Workload &w) {
    return std::map<std::string, TensorShape>(w.inputs.begin(), w.inputs.end());
  };
  return inputs(a) == inputs(b) && canonical_dag(a) == canonical_dag(b);
}

}  // namespace engineir
