#include <sstream>

#include "doctest.h"

#include "engineir/explore.hpp"
#include "helpers.hpp"

using namespace engineir;

TEST_CASE("explore relu 128") {
  ExploreOptions opts;
  opts.samples = 20;
  opts.seed = 7;
  auto e = explore(testutil::relu(128), opts);
  CHECK(e.run.saturated);
  CHECK(count_terms(e.graph, e.root, opts.max_depth) == 2187);  // 3^7
  auto report = explore_report(e, opts);
  for (const auto *key : {"workload", "run", "space", "samples", "diversity", "extremes", "config"})
    CHECK(report.contains(key));
  CHECK(report["space"]["root_count"] == "2187");
  CHECK(report["samples"].size() == 20);
  CHECK(report["run"]["stop_reason"] == "saturated");
  CHECK(report["config"]["seed"] == 7);
  CHECK(report["extremes"]["min_area"]["area_proxy"] == 1);
}

TEST_CASE("rule subsets shrink the space") {
  ExploreOptions opts;
  opts.rules = {"r1"};
  auto e = explore(testutil::relu(4), opts);
  CHECK(count_terms(e.graph, e.root, opts.max_depth) == 4);
}

TEST_CASE("reports are deterministic") {
  ExploreOptions opts;
  opts.samples = 40;
  opts.seed = 99;
  auto w = testutil::load("conv_relu_add.wl");
  auto a = explore_report(explore(w, opts), opts).dump(2);
  auto b = explore_report(explore(w, opts), opts).dump(2);
  CHECK(a == b);
  opts.seed = 100;
  CHECK(explore_report(explore(w, opts), opts).dump(2) != a);
}

TEST_CASE("verify passes with the builtin rules") {
  ExploreOptions opts;
  opts.samples = 10;
  auto e = explore(testutil::relu(128), opts);
  auto r = verify(e, opts, {3, std::nullopt});
  CHECK(r.passed());
  CHECK(r.designs == 10);
  CHECK(r.checks == 30);
}

TEST_CASE("verify with zero samples performs no checks") {
  ExploreOptions opts;
  opts.samples = 0;
  auto e = explore(testutil::relu(128), opts);
  auto r = verify(e, opts, {});
  CHECK(r.checks == 0);
  CHECK(r.passed());
}

TEST_CASE("verify reports a counterexample for the broken rule") {
  ExploreOptions opts;
  opts.rules = {"r1-broken"};
  opts.samples = 20;
  auto e = explore(testutil::relu(128), opts);
  auto r = verify(e, opts, {});
  CHECK_FALSE(r.passed());
  REQUIRE(r.first_failure);
  CHECK(r.first_failure->term.find("engine add") != std::string::npos);
  CHECK(r.first_failure->source == "random");
}

TEST_CASE("stats rows") {
  ExploreOptions opts;
  opts.policy = FactorPolicy::BinaryOnly;
  opts.rules = {"r1"};
  auto rows = stats(testutil::relu(64), opts);
  REQUIRE(rows.size() >= 2);
  CHECK(rows.front().iteration == 0);
  CHECK(rows.front().count == 1);
  CHECK(rows.back().count == 7);  // one chain of halvings per depth
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].nodes >= rows[i - 1].nodes);
    CHECK(rows[i].count >= rows[i - 1].count);
  }
  auto csv = stats_csv(rows);
  CHECK(csv.rfind("iteration,nodes,classes,count_terms\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(rows.size() + 1));
}

TEST_CASE("stats on a wide relu keeps growing") {
  ExploreOptions opts;
  auto rows = stats(testutil::relu(1024), opts);
  CHECK(rows.back().count >= 1024);
}
