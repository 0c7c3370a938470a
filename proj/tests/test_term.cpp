#include <random>
#include <string>

#include "doctest.h"

#include "engineir/errors.hpp"
#include "engineir/term.hpp"

using namespace engineir;

namespace {

const ShapeEnv kRelu128{{"x", TensorShape{128}}};

EngineInstance relu_w(std::int64_t w) { return {OpKind::Relu, {w}}; }

// Random loop chain around a relu engine over `width` elements.
Term random_relu_chain(std::int64_t width, std::mt19937_64 &rng) {
  std::vector<std::pair<bool, std::int64_t>> loops;
  std::int64_t rest = width;
  while (rest > 1 && rng() % 3 != 0) {
    std::vector<std::int64_t> divs;
    for (std::int64_t d = 2; d <= rest; ++d)
      if (rest % d == 0) divs.push_back(d);
    auto k = divs[rng() % divs.size()];
    loops.emplace_back(rng() % 2 == 0, k);
    rest /= k;
  }
  Term t = engine(relu_w(rest), {input("x")});
  for (auto it = loops.rbegin(); it != loops.rend(); ++it)
    t = it->first ? par(0, it->second, std::move(t)) : seq(0, it->second, std::move(t));
  return t;
}

std::string error_code(const Term &t, const ShapeEnv &env) {
  try {
    typecheck_term(t, env);
  } catch (const Error &e) {
    return e.code();
  }
  return "ok";
}

}  // namespace

TEST_CASE("engine declarations") {
  CHECK(engine_decl(OpKind::Relu).params.size() == 1);
  CHECK(engine_decl(OpKind::Add).params.size() == 1);
  CHECK(engine_decl(OpKind::Matmul).params.size() == 3);
  CHECK(engine_decl(OpKind::Conv2d).params.size() == 4);
  EngineInstance mm{OpKind::Matmul, {16, 8, 4}};
  CHECK(mm.param("N") == 8);
  CHECK(mm.size() == 512);
  CHECK(mm.str() == "matmul{M=16,N=8,K=4}");
  CHECK_THROWS_AS(validate_instance({OpKind::Relu, {0}}), ParamShapeMismatch);
  CHECK_THROWS_AS(validate_instance({OpKind::Matmul, {4, 4}}), ParamShapeMismatch);
}

TEST_CASE("typecheck examples") {
  CHECK(typecheck_term(engine(relu_w(128), {input("x")}), kRelu128) == TensorShape{128});
  CHECK(typecheck_term(seq(0, 2, engine(relu_w(64), {input("x")})), kRelu128) ==
        TensorShape{128});
  CHECK(typecheck_term(engine(relu_w(64), {input("x")}), kRelu128) == TensorShape{64});
  CHECK_THROWS_AS(typecheck_term(seq(0, 3, engine(relu_w(64), {input("x")})), kRelu128),
                  DivisibilityError);
  CHECK(typecheck_term(buffer({128}, par(0, 4, engine(relu_w(32), {input("x")}))), kRelu128) ==
        TensorShape{128});
}

TEST_CASE("typecheck errors") {
  CHECK(error_code(engine(relu_w(128), {input("y")}), kRelu128) == "UnboundInput");
  CHECK(error_code(engine(relu_w(256), {input("x")}), kRelu128) == "ParamShapeMismatch");
  CHECK(error_code(engine(relu_w(48), {input("x")}), kRelu128) == "ParamShapeMismatch");
  CHECK(error_code(buffer({128}, engine(relu_w(64), {input("x")})), kRelu128) == "ShapeMismatch");
  CHECK(error_code(buffer({64}, engine(relu_w(128), {input("x")})), kRelu128) == "ShapeMismatch");
  CHECK(error_code(seq(0, 2, buffer({128}, engine(relu_w(128), {input("x")}))), kRelu128) ==
        "MalformedTerm");
  CHECK(error_code(engine(relu_w(128), {engine(relu_w(128), {input("x")})}), kRelu128) ==
        "MalformedTerm");
  CHECK(error_code(seq(1, 2, engine(relu_w(64), {input("x")})), kRelu128) == "MalformedTerm");

  ShapeEnv mm{{"a", {16, 16}}, {"b", {16, 16}}};
  CHECK(error_code(engine({OpKind::Matmul, {16, 16, 8}}, {input("a"), input("b")}), mm) ==
        "ParamShapeMismatch");
  CHECK(typecheck_term(seq(1, 4, engine({OpKind::Matmul, {16, 4, 16}}, {input("a"), input("b")})),
                       mm) == TensorShape{16, 16});
}

TEST_CASE("conv2d tiles split the spatial axes") {
  ShapeEnv env{{"d", {1, 3, 18, 18}}, {"w", {8, 3, 3, 3}}};
  auto full = engine({OpKind::Conv2d, {16, 16, 3, 3}}, {input("d"), input("w")});
  CHECK(typecheck_term(full, env) == TensorShape{1, 8, 16, 16});
  auto tiled = seq(2, 4, par(3, 2, engine({OpKind::Conv2d, {4, 8, 3, 3}}, {input("d"), input("w")})));
  CHECK(typecheck_term(tiled, env) == TensorShape{1, 8, 16, 16});
  CHECK(error_code(seq(0, 2, full), env) == "MalformedTerm");
}

TEST_CASE("print and parse") {
  auto t = buffer({128}, seq(0, 2, par(0, 4, engine(relu_w(16), {input("x")}))));
  auto text = print_term(t);
  CHECK(text == "(buffer (128) (seq 0 2 (par 0 4 (engine relu (W 16) x))))");
  CHECK(parse_term(text) == t);
  CHECK(print_term(engine({OpKind::Matmul, {16, 16, 16}}, {input("a"), input("b")})) ==
        "(engine matmul (M 16) (N 16) (K 16) a b)");
  CHECK_THROWS_AS(parse_term("(seq 0 1 (engine relu (W 128) x))"), SyntaxError);
  CHECK_THROWS_AS(parse_term("(par 0 0 (engine relu (W 128) x))"), SyntaxError);
  CHECK_THROWS_AS(parse_term("(engine relu (W 0) x)"), SyntaxError);
  CHECK_THROWS_AS(parse_term("(engine relu (H 4) x)"), SyntaxError);
  CHECK_THROWS_AS(parse_term("(engine gelu (W 4) x)"), UnknownOp);
  CHECK_THROWS_AS(parse_term("(loop 0 2 x)"), SyntaxError);
}

TEST_CASE("inventory examples") {
  auto e128 = engine(relu_w(128), {input("x")});
  CHECK(hardware_inventory(e128) == Inventory{{relu_w(128), 1}});
  CHECK(hardware_inventory(seq(0, 2, engine(relu_w(64), {input("x")}))) ==
        Inventory{{relu_w(64), 1}});
  CHECK(hardware_inventory(par(0, 2, engine(relu_w(64), {input("x")}))) ==
        Inventory{{relu_w(64), 2}});
  CHECK(inventory_str(Inventory{{relu_w(64), 2}}) == "{relu{W=64}:2}");
}

TEST_CASE("inventory accumulates over distinct engines") {
  // relu(relu x) where both ops end up on the same engine shape.
  auto inner = buffer({128}, par(0, 2, engine(relu_w(64), {input("x")})));
  auto outer = buffer({128}, seq(0, 2, engine(relu_w(64), {inner})));
  CHECK(typecheck_term(outer, kRelu128) == TensorShape{128});
  CHECK(hardware_inventory(outer) == Inventory{{relu_w(64), 3}});
}

TEST_CASE("property: par multiplies copies, seq leaves them unchanged") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    auto t = random_relu_chain(128, rng);
    auto base = hardware_inventory(t);
    auto extent = typecheck_term(t, kRelu128)[0];
    if (extent == 128) continue;
    auto k = 128 / extent;
    auto parred = hardware_inventory(par(0, k, t));
    auto seqed = hardware_inventory(seq(0, k, t));
    CHECK(seqed == base);
    REQUIRE(parred.size() == base.size());
    for (const auto &[inst, n] : base) CHECK(parred.at(inst) == k * n);
  }
}

TEST_CASE("property: parse(print(t)) == t and types are total on generated chains") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 300; ++trial) {
    std::int64_t widths[] = {1, 6, 12, 64, 128, 360};
    auto w = widths[rng() % 6];
    ShapeEnv env{{"x", TensorShape{w}}};
    Term t = random_relu_chain(w, rng);
    // Complete the chain so it can be buffered.
    auto tile = typecheck_term(t, env)[0];
    if (tile != w) t = seq(0, w / tile, std::move(t));
    Term b = buffer({w}, t);
    CHECK(typecheck_term(b, env) == TensorShape{w});
    CHECK(parse_term(print_term(b)) == b);
  }
}

TEST_CASE("term metrics and loop nest") {
  auto t = buffer({128}, seq(0, 2, par(0, 4, engine(relu_w(16), {input("x")}))));
  CHECK(term_size(t) == 5);
  CHECK(term_depth(t) == 5);
  CHECK(count_op(t, NodeOp::Seq) == 1);
  CHECK(count_op(t, NodeOp::Par) == 1);
  auto nest = render_loop_nest(t);
  CHECK(nest.find("parallel for") != std::string::npos);
  CHECK(nest.find("relu{W=16}") != std::string::npos);
}

TEST_CASE("labels hash structurally") {
  CHECK(hash_label(Label::seq(0, 2)) == hash_label(Label::seq(0, 2)));
  CHECK(Label::seq(0, 2) != Label::par(0, 2));
  CHECK(Label::engine_of(relu_w(4)) == Label::engine_of(relu_w(4)));
  CHECK(Label::seq(0, 2).arity() == 1);
  CHECK(Label::engine_of({OpKind::Add, {4}}).arity() == 2);
}
