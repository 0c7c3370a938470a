#include <random>

#include "doctest.h"

#include "engineir/lowering.hpp"
#include "helpers.hpp"

using namespace engineir;

TEST_CASE("lower a single relu") {
  auto t = lower(testutil::relu(128));
  CHECK(print_term(t) == "(buffer (128) (engine relu (W 128) x))");
}

TEST_CASE("lower matmul and conv2d") {
  CHECK(print_term(lower(testutil::load("matmul16.wl"))) ==
        "(buffer (16 16) (engine matmul (M 16) (N 16) (K 16) a b))");
  CHECK(print_term(lower(testutil::load("conv2d.wl"))) ==
        "(buffer (1 8 16 16) (engine conv2d (H 16) (W 16) (C 3) (K 3) data weight))");
}

TEST_CASE("lower a chain") {
  auto t = lower(testutil::load("conv_relu_add.wl"));
  CHECK(print_term(t) ==
        "(buffer (1 1 4 4) (engine add (W 16) (buffer (1 1 4 4) (engine relu (W 16) "
        "(buffer (1 1 4 4) (engine conv2d (H 4) (W 4) (C 8) (K 3) d w)))) b))");
}

TEST_CASE("shared subexpressions are duplicated in the tree") {
  auto w = parse_workload("(workload (input x (8)) (let y (relu x)) (output (add y y)))");
  auto t = lower(w);
  CHECK(count_op(t, NodeOp::Engine) == 3);
  CHECK(typecheck_term(t, input_env(w)) == TensorShape{8});
}

TEST_CASE("property: lowering invariants") {
  // One engine and one buffer per operator application, no loops, and the
  // lowered term has the workload's output shape.
  std::mt19937_64 rng(31);
  const char *ops[] = {"relu", "add", "matmul"};
  for (int trial = 0; trial < 200; ++trial) {
    std::string text = "(workload (input a (4 4)) (input b (4 4))";
    int n = static_cast<int>(rng() % 5) + 1;
    std::vector<std::string> names{"a", "b"};
    std::string expr;
    std::size_t apps = 0;
    // Tree-shaped (no sharing) so counts are exact.
    std::vector<std::string> pool{"a", "b"};
    for (int i = 0; i < n; ++i) {
      std::string op = ops[rng() % 3];
      std::string lhs = pool[rng() % pool.size()];
      std::string e = op == "relu" ? "(relu " + lhs + ")"
                                   : "(" + op + " " + lhs + " " + pool[rng() % 2] + ")";
      pool.push_back(e);
      expr = e;
    }
    text += " (output " + expr + "))";
    auto w = parse_workload(text);
    auto t = lower(w);
    auto inferred = infer_shapes(w);
    for (std::size_t i = 0; i < expr.size(); ++i) apps += expr[i] == '(';
    CHECK(count_op(t, NodeOp::Engine) == apps);
    CHECK(count_op(t, NodeOp::Buffer) == apps);
    CHECK(count_op(t, NodeOp::Seq) == 0);
    CHECK(count_op(t, NodeOp::Par) == 0);
    CHECK(typecheck_term(t, input_env(w)) == *inferred.output_node().out_shape);
  }
}
