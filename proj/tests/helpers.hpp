#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include "engineir/explore.hpp"
#include "engineir/lowering.hpp"
#include "engineir/rewrites.hpp"
#include "engineir/schedule_graph.hpp"

namespace testutil {

inline std::string workload_path(const std::string &file) {
  return std::string(ENGINEIR_WORKLOADS_DIR) + "/" + file;
}

inline std::string read_file(const std::string &path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline engineir::Workload load(const std::string &file) {
  return engineir::parse_workload(read_file(workload_path(file)), file);
}

inline std::string relu_text(std::int64_t width) {
  return "(workload (input x (" + std::to_string(width) + ")) (output (relu x)))";
}

inline engineir::Workload relu(std::int64_t width) {
  return engineir::parse_workload(relu_text(width), "relu" + std::to_string(width));
}

/// Lowered workload seeded into a fresh graph.
struct Seeded {
  engineir::ScheduleGraph graph;
  engineir::ClassId root;
};

inline Seeded seed_graph(const engineir::Workload &w) {
  Seeded s{engineir::ScheduleGraph(engineir::ScheduleLang{engineir::input_env(w)}), 0};
  s.root = engineir::add_term(s.graph, engineir::lower(w));
  s.graph.rebuild();
  return s;
}

inline engineir::BigCount saturated_count(const engineir::Workload &w,
                                          const std::vector<engineir::Rewrite> &rules,
                                          std::size_t depth = 32) {
  auto s = seed_graph(w);
  engineir::run(s.graph, rules, {64, 1000000});
  return engineir::count_terms(s.graph, s.root, depth);
}

}  // namespace testutil
