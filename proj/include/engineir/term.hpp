#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "engineir/workload.hpp"

namespace engineir {

/// Parameter list of a hardware engine, fixed per operator kind:
///   relu [W], add [W], matmul [M, N, K], conv2d [H, W, C, K].
struct EngineDecl {
  OpKind kind;
  std::vector<std::string_view> params;
};

const EngineDecl &engine_decl(OpKind kind);

/// A concrete engine: one value per declared parameter, in declaration order.
struct EngineInstance {
  OpKind kind = OpKind::Relu;
  std::vector<std::int64_t> params;

  std::int64_t param(std::string_view name) const;
  /// Product of all parameters; the area proxy of one copy.
  std::int64_t size() const;
  /// "relu{W=128}", "matmul{M=16,N=16,K=16}"
  std::string str() const;

  friend bool operator==(const EngineInstance &, const EngineInstance &) = default;
  friend auto operator<=>(const EngineInstance &, const EngineInstance &) = default;
};

/// Throws ParamShapeMismatch unless params match the decl and are all >= 1.
void validate_instance(const EngineInstance &inst);

/// One splittable output axis and the engine parameter it controls.
/// Elementwise engines work on the row-major flattening of their operands,
/// so their only axis is axis 0 of that flat view.
struct SplitAxis {
  int axis;
  std::size_t param_index;
};

std::span<const SplitAxis> split_axes(OpKind kind);
std::optional<SplitAxis> split_axis(OpKind kind, int axis);

enum class NodeOp : std::uint8_t { Input, Engine, Seq, Par, Buffer };

/// Operator tag plus the scalars embedded in a schedule node. Only the
/// fields relevant to `op` are meaningful; the rest stay default so that
/// equality and hashing are structural.
struct Label {
  NodeOp op = NodeOp::Input;
  std::string name;
  EngineInstance engine;
  int axis = 0;
  std::int64_t factor = 0;
  TensorShape shape;

  static Label input(std::string name);
  static Label engine_of(EngineInstance inst);
  static Label seq(int axis, std::int64_t factor);
  static Label par(int axis, std::int64_t factor);
  static Label buffer(TensorShape shape);

  bool is_loop() const { return op == NodeOp::Seq || op == NodeOp::Par; }
  bool is_kernel() const { return op == NodeOp::Engine || is_loop(); }
  /// Expected number of children, given the engine kind for engines.
  std::size_t arity() const;
  /// The label as it appears in the head of its s-expression, e.g. "seq 0 2".
  std::string str() const;

  friend bool operator==(const Label &, const Label &) = default;
  friend auto operator<=>(const Label &, const Label &) = default;
};

std::size_t hash_label(const Label &label);

/// A schedule term: engines wrapped in Seq (software loop) and Par
/// (hardware replication) combinators, with Buffers materializing complete
/// results between engines.
struct Term {
  Label label;
  std::vector<Term> children;

  friend bool operator==(const Term &, const Term &) = default;
};

Term input(std::string name);
Term engine(EngineInstance inst, std::vector<Term> args);
Term seq(int axis, std::int64_t factor, Term child);
Term par(int axis, std::int64_t factor, Term child);
Term buffer(TensorShape shape, Term child);

using ShapeEnv = std::map<std::string, TensorShape, std::less<>>;

/// Extra typing facts for kernel terms (Engine/Seq/Par). A kernel term
/// produces one tile of the full operator output; `full` is the full output
/// extent, `value_shape` the shape of the complete result once buffered.
struct KernelInfo {
  OpKind kind;
  TensorShape full;
  TensorShape value_shape;

  friend bool operator==(const KernelInfo &, const KernelInfo &) = default;
};

struct TermType {
  /// For kernel terms, the tile shape; for values (Input/Buffer), the shape.
  TensorShape shape;
  std::optional<KernelInfo> kernel;

  bool complete() const { return !kernel || shape == kernel->full; }

  friend bool operator==(const TermType &, const TermType &) = default;
};

/// Typing rule for a single node given its children's types. This is both
/// the per-node step of typecheck_term and the e-graph shape analysis.
TermType infer_node(const Label &label, std::span<const TermType *const> children,
                    const ShapeEnv &env);

TermType infer_type(const Term &t, const ShapeEnv &env);
/// Output (tile) shape of `t`.
TensorShape typecheck_term(const Term &t, const ShapeEnv &env);

std::string print_term(const Term &t);
Term parse_term(std::string_view text);

/// Engine instance -> number of physical copies. Par multiplies the copies
/// of the engine it wraps; Seq reuses one copy.
using Inventory = std::map<EngineInstance, std::int64_t>;
Inventory hardware_inventory(const Term &t);
std::string inventory_str(const Inventory &inv);

std::size_t term_size(const Term &t);
std::size_t term_depth(const Term &t);
std::size_t count_op(const Term &t, NodeOp op);

/// Renders the schedule as a loop nest: Seq as `for`, Par as `parallel for`.
std::string render_loop_nest(const Term &t);

}  // namespace engineir
