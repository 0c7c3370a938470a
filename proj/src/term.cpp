#include "engineir/term.hpp"

#include <functional>
#include <sstream>

#include "engineir/errors.hpp"
#include "engineir/sexpr.hpp"

namespace engineir {

const EngineDecl &engine_decl(OpKind kind) {
  static const EngineDecl relu{OpKind::Relu, {"W"}};
  static const EngineDecl add{OpKind::Add, {"W"}};
  static const EngineDecl matmul{OpKind::Matmul, {"M", "N", "K"}};
  static const EngineDecl conv2d{OpKind::Conv2d, {"H", "W", "C", "K"}};
  switch (kind) {
    case OpKind::Relu: return relu;
    case OpKind::Add: return add;
    case OpKind::Matmul: return matmul;
    case OpKind::Conv2d: return conv2d;
  }
  return relu;
}

std::int64_t EngineInstance::param(std::string_view name) const {
  const auto &decl = engine_decl(kind);
  for (std::size_t i = 0; i < decl.params.size(); ++i)
    if (decl.params[i] == name) return params.at(i);
  throw ParamShapeMismatch(std::string(op_name(kind)) + " has no parameter " + std::string(name));
}

std::int64_t EngineInstance::size() const {
  std::int64_t n = 1;
  for (auto p : params) n *= p;
  return n;
}

std::string EngineInstance::str() const {
  const auto &decl = engine_decl(kind);
  std::string out(op_name(kind));
  out += '{';
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) out += ',';
    out += std::string(i < decl.params.size() ? decl.params[i] : "?") + "=" +
           std::to_string(params[i]);
  }
  return out + "}";
}

void validate_instance(const EngineInstance &inst) {
  const auto &decl = engine_decl(inst.kind);
  if (inst.params.size() != decl.params.size())
    throw ParamShapeMismatch(std::string(op_name(inst.kind)) + " expects " +
                             std::to_string(decl.params.size()) + " parameters");
  for (auto p : inst.params)
    if (p < 1) throw ParamShapeMismatch("engine parameter must be >= 1 in " + inst.str());
}

std::span<const SplitAxis> split_axes(OpKind kind) {
  static constexpr SplitAxis elementwise[] = {{0, 0}};
  static constexpr SplitAxis matmul[] = {{0, 0}, {1, 1}};
  static constexpr SplitAxis conv2d[] = {{2, 0}, {3, 1}};
  switch (kind) {
    case OpKind::Relu:
    case OpKind::Add: return elementwise;
    case OpKind::Matmul: return matmul;
    case OpKind::Conv2d: return conv2d;
  }
  return {};
}

std::optional<SplitAxis> split_axis(OpKind kind, int axis) {
  for (const auto &s : split_axes(kind))
    if (s.axis == axis) return s;
  return std::nullopt;
}

Label Label::input(std::string name) {
  Label l;
  l.op = NodeOp::Input;
  l.name = std::move(name);
  return l;
}

Label Label::engine_of(EngineInstance inst) {
  Label l;
  l.op = NodeOp::Engine;
  l.engine = std::move(inst);
  return l;
}

Label Label::seq(int axis, std::int64_t factor) {
  Label l;
  l.op = NodeOp::Seq;
  l.axis = axis;
  l.factor = factor;
  return l;
}

Label Label::par(int axis, std::int64_t factor) {
  Label l = seq(axis, factor);
  l.op = NodeOp::Par;
  return l;
}

Label Label::buffer(TensorShape shape) {
  Label l;
  l.op = NodeOp::Buffer;
  l.shape = std::move(shape);
  return l;
}

std::size_t Label::arity() const {
  switch (op) {
    case NodeOp::Input: return 0;
    case NodeOp::Engine: return static_cast<std::size_t>(op_arity(engine.kind));
    default: return 1;
  }
}

std::string Label::str() const {
  switch (op) {
    case NodeOp::Input: return name;
    case NodeOp::Engine: {
      std::string out = "engine " + std::string(op_name(engine.kind));
      const auto &decl = engine_decl(engine.kind);
      for (std::size_t i = 0; i < engine.params.size() && i < decl.params.size(); ++i)
        out += " (" + std::string(decl.params[i]) + " " + std::to_string(engine.params[i]) + ")";
      return out;
    }
    case NodeOp::Seq: return "seq " + std::to_string(axis) + " " + std::to_string(factor);
    case NodeOp::Par: return "par " + std::to_string(axis) + " " + std::to_string(factor);
    case NodeOp::Buffer: return "buffer " + shape.str();
  }
  return "?";
}

std::size_t hash_label(const Label &label) {
  std::size_t h = static_cast<std::size_t>(label.op) * 0x9e3779b97f4a7c15ULL;
  auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  switch (label.op) {
    case NodeOp::Input: mix(std::hash<std::string>{}(label.name)); break;
    case NodeOp::Engine:
      mix(static_cast<std::size_t>(label.engine.kind));
      for (auto p : label.engine.params) mix(std::hash<std::int64_t>{}(p));
      break;
    case NodeOp::Seq:
    case NodeOp::Par:
      mix(static_cast<std::size_t>(label.axis));
      mix(std::hash<std::int64_t>{}(label.factor));
      break;
    case NodeOp::Buffer:
      for (auto d : label.shape.dims) mix(std::hash<std::int64_t>{}(d));
      break;
  }
  return h;
}

Term input(std::string name) { return Term{Label::input(std::move(name)), {}}; }

Term engine(EngineInstance inst, std::vector<Term> args) {
  return Term{Label::engine_of(std::move(inst)), std::move(args)};
}

Term seq(int axis, std::int64_t factor, Term child) {
  return Term{Label::seq(axis, factor), {std::move(child)}};
}

Term par(int axis, std::int64_t factor, Term child) {
  return Term{Label::par(axis, factor), {std::move(child)}};
}

Term buffer(TensorShape shape, Term child) {
  return Term{Label::buffer(std::move(shape)), {std::move(child)}};
}

namespace {

const TensorShape &operand(std::span<const TermType *const> children, std::size_t i) {
  const auto *t = children[i];
  if (t->kernel)
    throw MalformedTerm("engine operand " + std::to_string(i) +
                        " must be an input or a buffer, not an unbuffered engine schedule");
  return t->shape;
}

void require_divides(const EngineInstance &inst, std::string_view param, std::int64_t value,
                     std::int64_t extent) {
  if (value > extent || extent % value != 0)
    throw ParamShapeMismatch(inst.str() + ": " + std::string(param) + "=" +
                             std::to_string(value) + " does not tile extent " +
                             std::to_string(extent));
}

void require_equal(const EngineInstance &inst, std::string_view what, std::int64_t param,
                   std::int64_t actual) {
  if (param != actual)
    throw ParamShapeMismatch(inst.str() + ": " + std::string(what) + " is " +
                             std::to_string(actual) + ", engine expects " + std::to_string(param));
}

TermType engine_type(const EngineInstance &inst, std::span<const TermType *const> children) {
  validate_instance(inst);
  if (children.size() != static_cast<std::size_t>(op_arity(inst.kind)))
    throw MalformedTerm(std::string(op_name(inst.kind)) + " engine expects " +
                        std::to_string(op_arity(inst.kind)) + " operand(s)");
  switch (inst.kind) {
    case OpKind::Relu:
    case OpKind::Add: {
      const auto &x = operand(children, 0);
      if (inst.kind == OpKind::Add && operand(children, 1) != x)
        throw ShapeMismatch("add operands differ: " + x.str() + " vs " +
                            operand(children, 1).str());
      auto n = x.numel();
      require_divides(inst, "W", inst.params[0], n);
      return {TensorShape{inst.params[0]}, KernelInfo{inst.kind, TensorShape{n}, x}};
    }
    case OpKind::Matmul: {
      const auto &a = operand(children, 0);
      const auto &b = operand(children, 1);
      if (a.rank() != 2 || b.rank() != 2) throw RankError("matmul engine expects rank-2 operands");
      require_equal(inst, "left inner extent", inst.param("K"), a[1]);
      require_equal(inst, "right inner extent", inst.param("K"), b[0]);
      require_divides(inst, "M", inst.param("M"), a[0]);
      require_divides(inst, "N", inst.param("N"), b[1]);
      TensorShape full{a[0], b[1]};
      return {TensorShape{inst.param("M"), inst.param("N")}, KernelInfo{inst.kind, full, full}};
    }
    case OpKind::Conv2d: {
      const auto &d = operand(children, 0);
      const auto &w = operand(children, 1);
      if (d.rank() != 4 || w.rank() != 4) throw RankError("conv2d engine expects rank-4 operands");
      auto k = inst.param("K");
      require_equal(inst, "data channels", inst.param("C"), d[1]);
      require_equal(inst, "kernel channels", inst.param("C"), w[1]);
      require_equal(inst, "kernel height", k, w[2]);
      require_equal(inst, "kernel width", k, w[3]);
      if (d[2] < k || d[3] < k) throw ParamShapeMismatch(inst.str() + ": kernel larger than input");
      TensorShape full{d[0], w[0], d[2] - k + 1, d[3] - k + 1};
      require_divides(inst, "H", inst.param("H"), full[2]);
      require_divides(inst, "W", inst.param("W"), full[3]);
      return {TensorShape{d[0], w[0], inst.param("H"), inst.param("W")},
              KernelInfo{inst.kind, full, full}};
    }
  }
  throw MalformedTerm("unknown engine kind");
}

}  // namespace

TermType infer_node(const Label &label, std::span<const TermType *const> children,
                    const ShapeEnv &env) {
  switch (label.op) {
    case NodeOp::Input: {
      auto it = env.find(label.name);
      if (it == env.end()) throw UnboundInput(label.name);
      return {it->second, std::nullopt};
    }
    case NodeOp::Engine: return engine_type(label.engine, children);
    case NodeOp::Seq:
    case NodeOp::Par: {
      if (label.factor < 2) throw MalformedTerm("loop factor must be >= 2");
      if (children.size() != 1) throw MalformedTerm("loop expects one child");
      const auto &child = *children[0];
      if (!child.kernel) throw MalformedTerm("loop body must be an engine schedule");
      if (!split_axis(child.kernel->kind, label.axis))
        throw MalformedTerm("axis " + std::to_string(label.axis) + " is not splittable for " +
                            std::string(op_name(child.kernel->kind)));
      auto axis = static_cast<std::size_t>(label.axis);
      auto extent = child.kernel->full[axis];
      std::int64_t grown = 0;
      if (__builtin_mul_overflow(child.shape[axis], label.factor, &grown) || extent % grown != 0)
        throw DivisibilityError(label.axis, label.factor, extent);
      TermType out = child;
      out.shape[axis] = grown;
      return out;
    }
    case NodeOp::Buffer: {
      if (children.size() != 1) throw MalformedTerm("buffer expects one child");
      const auto &child = *children[0];
      if (!child.kernel) throw MalformedTerm("buffer must wrap an engine schedule");
      if (!child.complete())
        throw ShapeMismatch("buffer wraps a partial tile " + child.shape.str() + " of " +
                            child.kernel->full.str());
      if (label.shape != child.kernel->value_shape)
        throw ShapeMismatch("buffer shape " + label.shape.str() + " vs produced " +
                            child.kernel->value_shape.str());
      return {label.shape, std::nullopt};
    }
  }
  throw MalformedTerm("unknown node");
}

TermType infer_type(const Term &t, const ShapeEnv &env) {
  std::vector<TermType> kids;
  kids.reserve(t.children.size());
  for (const auto &c : t.children) kids.push_back(infer_type(c, env));
  std::vector<const TermType *> ptrs;
  for (const auto &k : kids) ptrs.push_back(&k);
  if (t.children.size() != t.label.arity())
    throw MalformedTerm("'" + t.label.str() + "' expects " + std::to_string(t.label.arity()) +
                        " children");
  return infer_node(t.label, ptrs, env);
}

TensorShape typecheck_term(const Term &t, const ShapeEnv &env) { return infer_type(t, env).shape; }

std::string print_term(const Term &t) {
  if (t.label.op == NodeOp::Input) return t.label.name;
  std::string out = "(" + t.label.str();
  for (const auto &c : t.children) out += " " + print_term(c);
  return out + ")";
}

namespace {

std::int64_t expect_int(const sexpr::Node &n, std::int64_t min, const char *what) {
  auto v = n.as_int();
  if (!v) sexpr::fail(n, std::string("expected integer ") + what);
  if (*v < min) sexpr::fail(n, std::string(what) + " must be >= " + std::to_string(min));
  return *v;
}

Term parse_node(const sexpr::Node &n) {
  if (n.is_atom()) {
    if (!sexpr::is_name(n.atom)) sexpr::fail(n, "expected input name or '('");
    return input(n.atom);
  }
  if (n.items.empty() || !n.items[0].is_atom()) sexpr::fail(n, "expected term head");
  const auto &head = n.items[0].atom;
  if (head == "engine") {
    if (n.items.size() < 2 || !n.items[1].is_atom()) sexpr::fail(n, "expected engine kind");
    auto kind = op_from_name(n.items[1].atom);
    if (!kind) throw UnknownOp(n.items[1].atom);
    const auto &decl = engine_decl(*kind);
    std::size_t expected = 2 + decl.params.size() + static_cast<std::size_t>(op_arity(*kind));
    if (n.items.size() != expected)
      sexpr::fail(n, "engine " + std::string(op_name(*kind)) + " expects " +
                         std::to_string(decl.params.size()) + " parameters and " +
                         std::to_string(op_arity(*kind)) + " operand(s)");
    EngineInstance inst{*kind, {}};
    for (std::size_t i = 0; i < decl.params.size(); ++i) {
      const auto &p = n.items[2 + i];
      if (!p.is_list || p.items.size() != 2 || !p.items[0].is_atom(decl.params[i]))
        sexpr::fail(p, "expected '(" + std::string(decl.params[i]) + " INT)'");
      inst.params.push_back(expect_int(p.items[1], 1, "engine parameter"));
    }
    std::vector<Term> args;
    for (std::size_t i = 2 + decl.params.size(); i < n.items.size(); ++i)
      args.push_back(parse_node(n.items[i]));
    return engine(std::move(inst), std::move(args));
  }
  if (head == "seq" || head == "par") {
    if (n.items.size() != 4) sexpr::fail(n, "expected '(" + head + " AXIS FACTOR term)'");
    auto axis = expect_int(n.items[1], 0, "axis");
    if (axis > 3) sexpr::fail(n.items[1], "axis must be < 4");
    auto factor = expect_int(n.items[2], 2, "loop factor");
    auto child = parse_node(n.items[3]);
    return head == "seq" ? seq(static_cast<int>(axis), factor, std::move(child))
                         : par(static_cast<int>(axis), factor, std::move(child));
  }
  if (head == "buffer") {
    if (n.items.size() != 3) sexpr::fail(n, "expected '(buffer (INT+) term)'");
    const auto &s = n.items[1];
    if (!s.is_list || s.items.empty() || s.items.size() > 4) sexpr::fail(s, "expected buffer shape");
    TensorShape shape;
    for (const auto &d : s.items) shape.dims.push_back(expect_int(d, 1, "dimension"));
    return buffer(std::move(shape), parse_node(n.items[2]));
  }
  sexpr::fail(n.items[0], "unknown term head '" + head + "'");
}

}  // namespace

Term parse_term(std::string_view text) { return parse_node(sexpr::parse(text)); }

Inventory hardware_inventory(const Term &t) {
  Inventory inv;
  auto visit = [&inv](auto &&self, const Term &node, std::int64_t copies) -> void {
    switch (node.label.op) {
      case NodeOp::Input: return;
      case NodeOp::Engine:
        inv[node.label.engine] += copies;
        // Operands are complete values produced outside this schedule.
        for (const auto &c : node.children) self(self, c, 1);
        return;
      case NodeOp::Seq: self(self, node.children[0], copies); return;
      case NodeOp::Par: self(self, node.children[0], copies * node.label.factor); return;
      case NodeOp::Buffer: self(self, node.children[0], 1); return;
    }
  };
  visit(visit, t, 1);
  return inv;
}

std::string inventory_str(const Inventory &inv) {
  std::string out = "{";
  bool first = true;
  for (const auto &[inst, n] : inv) {
    if (!first) out += ", ";
    first = false;
    out += inst.str() + ":" + std::to_string(n);
  }
  return out + "}";
}

std::size_t term_size(const Term &t) {
  std::size_t n = 1;
  for (const auto &c : t.children) n += term_size(c);
  return n;
}

std::size_t term_depth(const Term &t) {
  std::size_t d = 0;
  for (const auto &c : t.children) d = std::max(d, term_depth(c));
  return d + 1;
}

std::size_t count_op(const Term &t, NodeOp op) {
  std::size_t n = t.label.op == op ? 1 : 0;
  for (const auto &c : t.children) n += count_op(c, op);
  return n;
}

std::string render_loop_nest(const Term &t) {
  std::ostringstream out;
  int buffers = 0;
  int loops = 0;
  // Returns the name under which the value of `node` is referenced.
  auto value = [&](auto &&self, const Term &node) -> std::string {
    if (node.label.op == NodeOp::Input) return node.label.name;
    if (node.label.op != NodeOp::Buffer) return "<" + print_term(node) + ">";
    const Term *chain = &node.children[0];
    // Operands first, so each buffer is defined before it is read.
    const Term *leaf = chain;
    while (leaf->label.is_loop()) leaf = &leaf->children[0];
    std::vector<std::string> args;
    for (const auto &a : leaf->children) args.push_back(self(self, a));
    std::string name = "buf" + std::to_string(buffers++);
    out << name << " = buffer<" << node.label.shape.str() << ">\n";
    std::string indent;
    std::vector<std::string> idx;
    for (const Term *c = chain; c->label.is_loop(); c = &c->children[0]) {
      std::string var = "i" + std::to_string(loops++);
      out << indent << (c->label.op == NodeOp::Par ? "parallel for " : "for ") << var
          << " in 0.." << c->label.factor << "  # axis " << c->label.axis << "\n";
      idx.push_back(var);
      indent += "  ";
    }
    std::string slice;
    for (std::size_t i = 0; i < idx.size(); ++i) slice += (i ? "," : "") + idx[i];
    out << indent << name << "[" << slice << "] = " << leaf->label.engine.str() << "(";
    for (std::size_t i = 0; i < args.size(); ++i) out << (i ? ", " : "") << args[i] << "[" << slice << "]";
    out << ")\n";
    return name;
  };
  value(value, t);
  return out.str();
}

}  // namespace engineir
