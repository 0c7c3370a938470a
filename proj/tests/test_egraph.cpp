#include <map>
#include <random>
#include <set>

#include "doctest.h"

#include "engineir/egraph.hpp"
#include "engineir/errors.hpp"
#include "engineir/pattern.hpp"
#include "engineir/rewrites.hpp"
#include "helpers.hpp"
#include "oracles.hpp"
#include "toy_egraph.hpp"

using namespace engineir;

using toy::ToyGraph;
using toy::Driver;

TEST_CASE("add is hashconsed") {
  ToyGraph g;
  auto a = g.add({0, {}});
  CHECK(g.add({0, {}}) == a);
  auto fa = g.add({4, {a}});
  CHECK(g.add({4, {a}}) == fa);
  CHECK(g.num_classes() == 2);
  CHECK(g.rebuild() == 0);
}

TEST_CASE("merge keeps the smaller id and reports changes") {
  ToyGraph g;
  auto a = g.add({0, {}});
  auto b = g.add({1, {}});
  CHECK(g.merge(a, a) == std::pair<ClassId, bool>{a, false});
  auto [root, changed] = g.merge(b, a);
  CHECK(changed);
  CHECK(root == a);
  CHECK(g.find(b) == a);
  CHECK_FALSE(g.clean());
  g.rebuild();
  CHECK(g.clean());
  CHECK(g.eclass(a).nodes.size() == 2);
}

TEST_CASE("rebuild restores congruence") {
  ToyGraph g;
  auto a = g.add({0, {}});
  auto b = g.add({1, {}});
  auto fa = g.add({4, {a}});
  auto fb = g.add({4, {b}});
  auto gfa = g.add({5, {fa}});
  auto gfb = g.add({5, {fb}});
  CHECK(g.find(fa) != g.find(fb));
  g.merge(a, b);
  CHECK(g.rebuild() >= 1);
  CHECK(g.find(fa) == g.find(fb));
  CHECK(g.find(gfa) == g.find(gfb));
  CHECK(g.num_nodes() == 4);
}

TEST_CASE("property: random add/union/rebuild agrees with the congruence oracle") {
  auto r = toy::integrity_run(20, 600, 0);
  CHECK(r.failure == "");
  CHECK(r.ops >= 10000);
}

TEST_CASE("property: term counts match exhaustive enumeration") {
  auto r = toy::integrity_run(0, 0, 60);
  CHECK(r.failure == "");
  CHECK(r.count_comparisons > 500);
}

TEST_CASE("counts on a cycle grow with depth") {
  ToyGraph g;
  auto a = g.add({0, {}});
  auto fa = g.add({4, {a}});
  g.merge(a, fa);  // a = f(a): terms a, f(a), f(f(a)), ...
  g.rebuild();
  for (std::size_t d = 1; d <= 10; ++d) CHECK(count_terms(g, a, d) == BigCount(d));
}

TEST_CASE("unrank enumerates every term once") {
  ToyGraph g;
  auto a = g.add({0, {}});
  auto b = g.add({1, {}});
  g.merge(a, b);
  auto h = g.add({6, {a, a}});
  g.rebuild();
  TermCounter<ToyGraph> counter(g, 3);
  REQUIRE(counter.count(h, 3) == 4);
  std::set<std::string> seen;
  auto build = [](int label, std::vector<std::string> kids) {
    std::string s = "(" + std::to_string(label);
    for (auto &k : kids) s += " " + k;
    return s + ")";
  };
  for (int r = 0; r < 4; ++r) seen.insert(counter.unrank<std::string>(h, 3, r, build));
  CHECK(seen.size() == 4);
  CHECK_THROWS(counter.unrank<std::string>(h, 3, 4, build));
}

TEST_CASE("schedule graph: shape analysis") {
  auto s = testutil::seed_graph(testutil::relu(128));
  auto e64 = add_term(s.graph, engine({OpKind::Relu, {64}}, {input("x")}));
  auto looped = add_term(s.graph, seq(0, 2, engine({OpKind::Relu, {64}}, {input("x")})));
  CHECK(s.graph.eclass(looped).data.shape == TensorShape{128});
  CHECK(s.graph.eclass(e64).data.shape == TensorShape{64});
  auto full = lookup_term(s.graph, engine({OpKind::Relu, {128}}, {input("x")}));
  REQUIRE(full);
  CHECK(s.graph.merge(*full, looped).second);
  s.graph.rebuild();
  CHECK(s.graph.eclass(*full).nodes.size() == 2);
  CHECK_THROWS_AS(s.graph.merge(*full, e64), AnalysisConflict);
}

TEST_CASE("schedule graph: ill-typed nodes are rejected before insertion") {
  auto s = testutil::seed_graph(testutil::relu(128));
  auto before = s.graph.num_nodes();
  CHECK_THROWS_AS(add_term(s.graph, seq(0, 3, engine({OpKind::Relu, {64}}, {input("x")}))),
                  DivisibilityError);
  s.graph.rebuild();
  // The engine child was valid and stays; the loop was never added.
  CHECK(s.graph.num_nodes() == before + 1);
}

TEST_CASE("ematch") {
  auto s = testutil::seed_graph(testutil::relu(128));
  auto p = parse_pattern("(engine relu (W ?w) ?x)");
  auto ms = ematch(s.graph, p);
  REQUIRE(ms.size() == 1);
  CHECK(ms[0].subst.scalars.at("?w") == 128);
  CHECK(ematch(s.graph, p, {{"?w", [](std::int64_t v) { return v % 2 == 1; }}}).empty());
  CHECK(ematch(s.graph, parse_pattern("(seq ?a ?k ?e)")).empty());
  CHECK(print_pattern(p) == "(engine relu (W ?w) ?x)");

  for (const auto &r : select_rules({"r1"})) apply_rewrite(s.graph, r);
  CHECK(ematch(s.graph, parse_pattern("(seq ?a ?k ?e)")).size() >= 1);

  // Instantiating the matched pattern finds the same class.
  auto again = instantiate(s.graph, p, ms[0].subst);
  CHECK(s.graph.find(again) == s.graph.find(ms[0].eclass));
}

TEST_CASE("count_terms on the seed graph is 1") {
  for (const auto *file : {"relu128.wl", "matmul16.wl", "conv2d.wl", "conv_relu_add.wl"}) {
    auto s = testutil::seed_graph(testutil::load(file));
    CHECK(count_terms(s.graph, s.root, 32) == 1);
  }
}
