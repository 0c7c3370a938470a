// engineir: batch driver for design-space exploration over EngineIR.
//
//   engineir explore WORKLOAD [flags]   JSON report
//   engineir verify  WORKLOAD [flags]   interpreter equivalence check
//   engineir stats   WORKLOAD [flags]   per-iteration growth CSV
//
// Exit codes: 0 ok, 1 parse/shape/usage error, 2 I/O error, 3 equivalence
// failure.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "engineir/errors.hpp"
#include "engineir/explore.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitIo = 2;
constexpr int kExitMismatch = 3;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string &path, const std::string &text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("error writing " + path);
}

struct CommonFlags {
  std::string workload;
  std::string out;
  std::string rules = "all";
  bool pow2_only = false;
  bool binary_only = false;
  engineir::ExploreOptions options;

  void attach(CLI::App &cmd) {
    cmd.add_option("workload", workload, "workload file (.wl)")->required();
    cmd.add_option("--iters", options.iterations, "max saturation iterations")->capture_default_str();
    cmd.add_option("--max-nodes", options.max_nodes, "e-node cap")->capture_default_str();
    cmd.add_option("--max-classes", options.max_classes, "e-class cap");
    cmd.add_option("--time-budget-s", options.time_budget_s, "wall-clock budget in seconds");
    cmd.add_option("--rules", rules, "comma-separated rule groups: r1..r5, r1-broken, all")
        ->capture_default_str();
    cmd.add_option("--samples", options.samples, "designs to sample")->capture_default_str();
    cmd.add_option("--seed", options.seed, "sampling seed")->capture_default_str();
    cmd.add_option("--max-depth", options.max_depth, "term depth bound for counting and sampling")
        ->capture_default_str();
    cmd.add_flag("--pow2-only", pow2_only, "split only by powers of two");
    cmd.add_flag("--binary-only", binary_only, "split only by factor 2");
    cmd.add_option("--out", out, "output path (default stdout)");
  }

  engineir::ExploreOptions resolve() {
    options.rules.clear();
    std::stringstream ss(rules);
    for (std::string item; std::getline(ss, item, ',');)
      if (!item.empty()) options.rules.push_back(item);
    if (binary_only)
      options.policy = engineir::FactorPolicy::BinaryOnly;
    else if (pow2_only)
      options.policy = engineir::FactorPolicy::PowersOfTwo;
    return options;
  }

  engineir::Workload load() const {
    auto stem = std::filesystem::path(workload).stem().string();
    return engineir::parse_workload(read_file(workload), stem);
  }
};

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Design-space enumeration for hardware/software splits of ML workloads"};
  app.require_subcommand(1);

  CommonFlags explore_flags;
  auto *explore_cmd = app.add_subcommand("explore", "saturate and write a JSON report");
  explore_flags.attach(*explore_cmd);

  CommonFlags verify_flags;
  engineir::VerifyOptions verify_options;
  std::string vectors;
  auto *verify_cmd = app.add_subcommand("verify", "check sampled designs against the reference");
  verify_flags.attach(*verify_cmd);
  verify_cmd->add_option("--trials", verify_options.trials, "random input sets per design")
      ->capture_default_str();
  verify_cmd->add_option("--vectors", vectors, "directory of <input>.json test vectors");

  CommonFlags stats_flags;
  auto *stats_cmd = app.add_subcommand("stats", "per-iteration growth as CSV");
  stats_flags.attach(*stats_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (explore_cmd->parsed()) {
      auto options = explore_flags.resolve();
      auto exploration = engineir::explore(explore_flags.load(), options);
      write_output(explore_flags.out, engineir::explore_report(exploration, options).dump(2) + "\n");
      return kExitOk;
    }
    if (verify_cmd->parsed()) {
      auto options = verify_flags.resolve();
      if (!vectors.empty()) verify_options.vectors = vectors;
      auto exploration = engineir::explore(verify_flags.load(), options);
      if (!verify_flags.out.empty())
        write_output(verify_flags.out, engineir::explore_report(exploration, options).dump(2) + "\n");
      auto result = engineir::verify(exploration, options, verify_options);
      std::cout << "designs=" << result.designs << " checks=" << result.checks
                << " failures=" << result.failures << "\n";
      if (result.checks == 0) std::cout << "no checks performed (zero samples)\n";
      if (!result.passed()) {
        const auto &cx = *result.first_failure;
        std::cout << "counterexample:\n  term: " << cx.term << "\n  inputs: " << cx.source;
        if (cx.source == "random") std::cout << " (input seed " << cx.input_seed << ")";
        std::cout << "\n";
        return kExitMismatch;
      }
      return kExitOk;
    }
    if (stats_cmd->parsed()) {
      auto options = stats_flags.resolve();
      write_output(stats_flags.out, engineir::stats_csv(engineir::stats(stats_flags.load(), options)));
      return kExitOk;
    }
  } catch (const IoError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const engineir::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == "IOError" ? kExitIo : kExitInput;
  }
  return kExitInput;
}
