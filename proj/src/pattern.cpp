#include "engineir/pattern.hpp"

#include "engineir/errors.hpp"
#include "engineir/sexpr.hpp"

namespace engineir {

namespace {

bool is_var_atom(const sexpr::Node &n) {
  return n.is_atom() && n.atom.size() > 1 && n.atom[0] == '?' &&
         sexpr::is_name(std::string_view(n.atom).substr(1));
}

Scalar parse_scalar(const sexpr::Node &n) {
  if (is_var_atom(n)) return Scalar::of(n.atom);
  auto v = n.as_int();
  if (!v) sexpr::fail(n, "expected integer or ?variable");
  return Scalar::lit(*v);
}

Pattern parse_node(const sexpr::Node &n) {
  Pattern p;
  if (n.is_atom()) {
    if (is_var_atom(n)) {
      p.var = n.atom;
    } else if (sexpr::is_name(n.atom)) {
      p.op = NodeOp::Input;
      p.input = n.atom;
    } else {
      sexpr::fail(n, "expected ?variable, input name or '('");
    }
    return p;
  }
  if (n.items.empty() || !n.items[0].is_atom()) sexpr::fail(n, "expected pattern head");
  const auto &head = n.items[0].atom;
  if (head == "engine") {
    if (n.items.size() < 2 || !n.items[1].is_atom()) sexpr::fail(n, "expected engine kind");
    auto kind = op_from_name(n.items[1].atom);
    if (!kind) throw UnknownOp(n.items[1].atom);
    p.op = NodeOp::Engine;
    p.kind = *kind;
    const auto &decl = engine_decl(*kind);
    if (n.items.size() != 2 + decl.params.size() + static_cast<std::size_t>(op_arity(*kind)))
      sexpr::fail(n, "wrong number of engine parameters or operands");
    for (std::size_t i = 0; i < decl.params.size(); ++i) {
      const auto &slot = n.items[2 + i];
      if (!slot.is_list || slot.items.size() != 2 || !slot.items[0].is_atom(decl.params[i]))
        sexpr::fail(slot, "expected '(" + std::string(decl.params[i]) + " scalar)'");
      p.params.push_back(parse_scalar(slot.items[1]));
    }
    for (std::size_t i = 2 + decl.params.size(); i < n.items.size(); ++i)
      p.children.push_back(parse_node(n.items[i]));
    return p;
  }
  if (head == "seq" || head == "par") {
    if (n.items.size() != 4) sexpr::fail(n, "expected '(" + head + " axis factor pattern)'");
    p.op = head == "seq" ? NodeOp::Seq : NodeOp::Par;
    p.axis = parse_scalar(n.items[1]);
    p.factor = parse_scalar(n.items[2]);
    p.children.push_back(parse_node(n.items[3]));
    return p;
  }
  if (head == "buffer") {
    if (n.items.size() != 3 || !n.items[1].is_list) sexpr::fail(n, "expected '(buffer (INT+) pattern)'");
    p.op = NodeOp::Buffer;
    for (const auto &d : n.items[1].items) {
      auto v = d.as_int();
      if (!v) sexpr::fail(d, "expected integer dimension");
      p.shape.dims.push_back(*v);
    }
    p.children.push_back(parse_node(n.items[2]));
    return p;
  }
  sexpr::fail(n.items[0], "unknown pattern head '" + head + "'");
}

bool bind_scalar(const Scalar &slot, std::int64_t actual, Subst &s, const ScalarWhere &where) {
  if (!slot.is_var()) return *slot.value == actual;
  auto [it, fresh] = s.scalars.emplace(slot.var, actual);
  if (!fresh) return it->second == actual;
  if (auto pred = where.find(slot.var); pred != where.end() && !pred->second(actual)) return false;
  return true;
}

bool match_label(const Pattern &p, const Label &l, Subst &s, const ScalarWhere &where) {
  if (p.op != l.op) return false;
  switch (p.op) {
    case NodeOp::Input: return p.input == l.name;
    case NodeOp::Engine:
      if (p.kind != l.engine.kind || p.params.size() != l.engine.params.size()) return false;
      for (std::size_t i = 0; i < p.params.size(); ++i)
        if (!bind_scalar(p.params[i], l.engine.params[i], s, where)) return false;
      return true;
    case NodeOp::Seq:
    case NodeOp::Par:
      return bind_scalar(p.axis, l.axis, s, where) && bind_scalar(p.factor, l.factor, s, where);
    case NodeOp::Buffer: return p.shape == l.shape;
  }
  return false;
}

void match_class(const ScheduleGraph &g, const Pattern &p, ClassId c, const Subst &s,
                 const ScalarWhere &where, std::vector<Subst> &out) {
  if (p.is_var()) {
    auto it = s.terms.find(p.var);
    if (it != s.terms.end()) {
      if (g.find(it->second) == g.find(c)) out.push_back(s);
      return;
    }
    Subst bound = s;
    bound.terms.emplace(p.var, g.find(c));
    out.push_back(std::move(bound));
    return;
  }
  for (const auto &node : g.eclass(c).nodes) {
    if (node.children.size() != p.children.size()) continue;
    Subst head = s;
    if (!match_label(p, node.label, head, where)) continue;
    std::vector<Subst> partial{std::move(head)};
    for (std::size_t i = 0; i < p.children.size() && !partial.empty(); ++i) {
      std::vector<Subst> next;
      for (const auto &ps : partial) match_class(g, p.children[i], node.children[i], ps, where, next);
      partial = std::move(next);
    }
    for (auto &ps : partial) out.push_back(std::move(ps));
  }
}

std::int64_t resolve(const Scalar &slot, const Subst &s) {
  if (!slot.is_var()) return *slot.value;
  auto it = s.scalars.find(slot.var);
  if (it == s.scalars.end()) throw UnboundName(slot.var);
  return it->second;
}

}  // namespace

Pattern parse_pattern(std::string_view text) { return parse_node(sexpr::parse(text)); }

std::string print_pattern(const Pattern &p) {
  if (p.is_var()) return p.var;
  std::string out;
  switch (p.op) {
    case NodeOp::Input: return p.input;
    case NodeOp::Engine: {
      out = "(engine " + std::string(op_name(p.kind));
      const auto &decl = engine_decl(p.kind);
      for (std::size_t i = 0; i < p.params.size(); ++i)
        out += " (" + std::string(decl.params[i]) + " " + p.params[i].str() + ")";
      break;
    }
    case NodeOp::Seq:
    case NodeOp::Par:
      out = std::string(p.op == NodeOp::Seq ? "(seq " : "(par ") + p.axis.str() + " " + p.factor.str();
      break;
    case NodeOp::Buffer: out = "(buffer " + p.shape.str(); break;
  }
  for (const auto &c : p.children) out += " " + print_pattern(c);
  return out + ")";
}

std::vector<Match> ematch(const ScheduleGraph &g, const Pattern &p, const ScalarWhere &where) {
  std::vector<Match> matches;
  for (auto c : g.class_ids()) {
    std::vector<Subst> found;
    match_class(g, p, c, Subst{}, where, found);
    for (auto &s : found) matches.push_back(Match{c, std::move(s)});
  }
  return matches;
}

ClassId instantiate(ScheduleGraph &g, const Pattern &p, const Subst &s) {
  if (p.is_var()) {
    auto it = s.terms.find(p.var);
    if (it == s.terms.end()) throw UnboundName(p.var);
    return it->second;
  }
  ScheduleNode node;
  switch (p.op) {
    case NodeOp::Input: node.label = Label::input(p.input); break;
    case NodeOp::Engine: {
      EngineInstance inst{p.kind, {}};
      for (const auto &slot : p.params) inst.params.push_back(resolve(slot, s));
      node.label = Label::engine_of(std::move(inst));
      break;
    }
    case NodeOp::Seq:
      node.label = Label::seq(static_cast<int>(resolve(p.axis, s)), resolve(p.factor, s));
      break;
    case NodeOp::Par:
      node.label = Label::par(static_cast<int>(resolve(p.axis, s)), resolve(p.factor, s));
      break;
    case NodeOp::Buffer: node.label = Label::buffer(p.shape); break;
  }
  for (const auto &c : p.children) node.children.push_back(instantiate(g, c, s));
  return g.add(std::move(node));
}

}  // namespace engineir
