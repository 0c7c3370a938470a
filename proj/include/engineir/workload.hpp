#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace engineir {

/// Elements per axis, outermost first. Rank is 1..4 and every dim is >= 1.
struct TensorShape {
  std::vector<std::int64_t> dims;

  TensorShape() = default;
  TensorShape(std::initializer_list<std::int64_t> d) : dims(d) {}
  explicit TensorShape(std::vector<std::int64_t> d) : dims(std::move(d)) {}

  std::size_t rank() const { return dims.size(); }
  std::int64_t operator[](std::size_t axis) const { return dims[axis]; }
  std::int64_t &operator[](std::size_t axis) { return dims[axis]; }
  std::int64_t numel() const;
  /// Rendered as in the surface syntax: "(1 3 18 18)".
  std::string str() const;

  friend bool operator==(const TensorShape &, const TensorShape &) = default;
  friend auto operator<=>(const TensorShape &, const TensorShape &) = default;
};

/// Throws RankError unless 1 <= rank <= 4 and all dims are positive.
void validate_shape(const TensorShape &shape);

enum class OpKind : std::uint8_t { Relu, Add, Matmul, Conv2d };

inline constexpr OpKind kAllOpKinds[] = {OpKind::Relu, OpKind::Add, OpKind::Matmul,
                                          OpKind::Conv2d};

std::string_view op_name(OpKind kind);
std::optional<OpKind> op_from_name(std::string_view name);
int op_arity(OpKind kind);
bool is_elementwise(OpKind kind);

struct WorkloadNode {
  std::string id;
  OpKind kind;
  /// Node ids or input names, all defined before this node.
  std::vector<std::string> args;
  std::optional<TensorShape> out_shape;
};

/// A DAG of operator calls over named inputs. Nodes are stored in
/// definition (topological) order; nodes not reachable from `output` are
/// dropped by the parser. Nested, unnamed sub-expressions get ids of the
/// form "%N", which can never collide with user names.
struct Workload {
  std::string name;
  std::vector<std::pair<std::string, TensorShape>> inputs;
  std::vector<WorkloadNode> nodes;
  std::string output;

  const TensorShape *input_shape(std::string_view input) const;
  const WorkloadNode *node(std::string_view id) const;
  const WorkloadNode &output_node() const;
};

/// Grammar:
///   workload := "(" "workload" (input | let)* out ")"
///   input    := "(" "input" NAME shape ")"
///   let      := "(" "let" NAME expr ")"
///   shape    := "(" INT+ ")"
///   out      := "(" "output" expr ")"
///   expr     := NAME | "(" OPNAME expr+ ")"
Workload parse_workload(std::string_view text, std::string name = "workload");

/// Fills every node's out_shape. Idempotent.
Workload infer_shapes(Workload w);

std::string print_workload(const Workload &w);

/// Same inputs (as a set) and isomorphic output DAGs. Node ids are ignored.
bool structurally_equal(const Workload &a, const Workload &b);

}  // namespace engineir
