#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "engineir/random.hpp"
#include "engineir/term.hpp"
#include "engineir/workload.hpp"

namespace engineir {

/// Dense row-major tensor of 64-bit integers.
struct TensorValue {
  TensorShape shape;
  std::vector<std::int64_t> data;

  TensorValue() = default;
  explicit TensorValue(TensorShape s) : shape(std::move(s)), data(static_cast<std::size_t>(shape.numel())) {}
  TensorValue(TensorShape s, std::vector<std::int64_t> d);

  friend bool operator==(const TensorValue &, const TensorValue &) = default;
};

using ValueEnv = std::map<std::string, TensorValue, std::less<>>;

namespace ref {
TensorValue relu(const TensorValue &x);
TensorValue add(const TensorValue &x, const TensorValue &y);
TensorValue matmul(const TensorValue &a, const TensorValue &b);
/// Valid (no padding), stride-1, NCHW data with OIHW kernel.
TensorValue conv2d(const TensorValue &data, const TensorValue &kernel);
}  // namespace ref

TensorValue eval_workload(const Workload &w, const ValueEnv &inputs);

struct EvalOptions {
  /// Evaluate Seq/Par chunks last-to-first. The result must not change.
  bool reverse_chunks = false;
};

/// Evaluates a schedule term. Loops split the output tile along their axis
/// and evaluate their body once per chunk; an engine computes one tile from
/// slices of its full operands (convolutions read a halo of K-1 extra rows
/// and columns). The root must denote a complete value.
TensorValue eval_term(const Term &t, const ValueEnv &env, const EvalOptions &options = {});

/// Uniform integers in [-bound, bound].
TensorValue random_tensor(const TensorShape &shape, Rng &rng, std::int64_t bound = 1 << 20);
ValueEnv random_inputs(const Workload &w, Rng &rng, std::int64_t bound = 1 << 20);

/// `{"shape": [...], "data": [...]}`
nlohmann::json tensor_to_json(const TensorValue &t);
TensorValue tensor_from_json(const nlohmann::json &j);
/// Reads `<dir>/<input>.json` for every input of `w`.
ValueEnv load_inputs(const Workload &w, const std::filesystem::path &dir);

}  // namespace engineir
