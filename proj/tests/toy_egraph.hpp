#pragma once

// A toy e-graph language plus a driver that mirrors every operation into
// the brute-force congruence oracle.

#include <algorithm>
#include <random>
#include <set>
#include <string>

#include "engineir/egraph.hpp"
#include "oracles.hpp"

namespace toy {

using engineir::ClassId;

// Uninterpreted symbols: labels 0..3 are constants, 4..5 unary, 6..7 binary.
struct ToyLang {
  using Label = int;
  using Data = int;  // smallest label in the class
  static std::size_t hash(int l) { return std::hash<int>{}(l); }
  int make(int label, std::span<const int *const>) const { return label; }
  void join(int &into, const int &from) const { into = std::min(into, from); }
};

using ToyGraph = engineir::EGraph<ToyLang>;

inline int arity_of(int label) { return label < 4 ? 0 : label < 6 ? 1 : 2; }

struct Driver {
  ToyGraph g;
  oracle::NaiveCongruence oracle;
  std::vector<ClassId> ids;

  ClassId add(int label, std::vector<ClassId> kids) {
    auto id = g.add({label, kids});
    oracle.nodes.push_back({label, kids, id});
    ids.push_back(id);
    return id;
  }

  void step(std::mt19937_64 &rng) {
    auto roll = rng() % 10;
    if (ids.empty() || roll < 3) {
      add(static_cast<int>(rng() % 4), {});
    } else if (roll < 7) {
      int label = 4 + static_cast<int>(rng() % 4);
      std::vector<ClassId> kids;
      for (int i = 0; i < arity_of(label); ++i) kids.push_back(ids[rng() % ids.size()]);
      add(label, kids);
    } else {
      auto a = ids[rng() % ids.size()];
      auto b = ids[rng() % ids.size()];
      g.merge(a, b);
      oracle.unions.emplace_back(a, b);
    }
  }

  /// Checks the rebuilt graph against the brute-force closure. Returns the
  /// first violated property, or an empty string.
  std::string check() const {
    auto rep = oracle.closure(g.id_bound());
    std::set<ClassId> used(ids.begin(), ids.end());
    for (auto a : used)
      for (auto b : used)
        if ((g.find(a) == g.find(b)) != (rep[a] == rep[b]))
          return "partition differs at " + std::to_string(a) + ", " + std::to_string(b);

    for (ClassId i = 0; i < g.id_bound(); ++i) {
      if (g.find(g.find(i)) != g.find(i)) return "find is not idempotent";
      if (g.find(i) > i) return "a larger id survived a merge";
    }
    std::set<ClassId> roots;
    for (ClassId i = 0; i < g.id_bound(); ++i) roots.insert(g.find(i));
    auto listed = g.class_ids();
    if (std::set<ClassId>(listed.begin(), listed.end()) != roots) return "class list != roots";

    std::set<std::pair<int, std::vector<ClassId>>> seen;
    std::size_t total = 0;
    for (auto c : listed) {
      const auto &cls = g.eclass(c);
      int smallest = 99;
      for (const auto &n : cls.nodes) {
        if (g.canonicalize(n) != n) return "non-canonical node";
        if (!seen.insert({n.label, n.children}).second) return "node in two classes";
        if (g.lookup(n) != c) return "hashcons lookup disagrees";
        smallest = std::min(smallest, n.label);
        ++total;
      }
      if (cls.data != smallest) return "analysis data not joined";
    }
    if (total != g.hashcons_size() || total != g.num_nodes()) return "hashcons size";
    return {};
  }

  /// Node listing built from the oracle's own partition, not from the graph.
  oracle::NodeListing listing(const std::vector<ClassId> &rep) const {
    oracle::NodeListing out;
    std::set<std::pair<std::uint32_t, std::string>> dedupe;
    for (const auto &n : oracle.nodes) {
      std::vector<std::uint32_t> kids;
      std::string key = std::to_string(n.label);
      for (auto c : n.children) {
        kids.push_back(rep[c]);
        key += "," + std::to_string(rep[c]);
      }
      if (dedupe.insert({rep[n.id], key}).second)
        out[rep[n.id]].emplace_back("L" + std::to_string(n.label), kids);
    }
    return out;
  }
};

struct IntegrityResult {
  std::size_t ops = 0;
  std::size_t count_comparisons = 0;
  std::string failure;
};

/// Random add/union/rebuild sequences checked after every rebuild, then
/// count_terms against exhaustive enumeration on small graphs.
inline IntegrityResult integrity_run(std::uint64_t seeds, int ops_per_seed, std::uint64_t count_seeds) {
  IntegrityResult out;
  for (std::uint64_t seed = 0; seed < seeds && out.failure.empty(); ++seed) {
    std::mt19937_64 rng(seed);
    Driver d;
    for (int i = 0; i < ops_per_seed; ++i) {
      d.step(rng);
      ++out.ops;
      if (i % 60 == 59 || i + 1 == ops_per_seed) {
        d.g.rebuild();
        out.failure = d.check();
        if (!out.failure.empty()) break;
      }
    }
  }
  for (std::uint64_t seed = 1000; seed < 1000 + count_seeds && out.failure.empty(); ++seed) {
    std::mt19937_64 rng(seed);
    Driver d;
    int steps = 6 + static_cast<int>(rng() % 20);
    for (int i = 0; i < steps; ++i) d.step(rng);
    d.g.rebuild();
    auto rep = d.oracle.closure(d.g.id_bound());
    auto listing = d.listing(rep);
    engineir::TermCounter<ToyGraph> counter(d.g, 8);
    for (auto id : d.ids)
      for (std::size_t depth = 1; depth <= 8; ++depth) {
        auto terms = oracle::enumerate_terms(listing, rep[id], depth, 200);
        if (!terms) break;
        if (counter.count(id, depth) != engineir::BigCount(terms->size())) {
          out.failure = "count mismatch at class " + std::to_string(id) + " depth " + std::to_string(depth);
          return out;
        }
        ++out.count_comparisons;
      }
  }
  return out;
}

}  // namespace toy
