#include "engineir/interpreter.hpp"

#include <algorithm>
#include <fstream>

#include "engineir/errors.hpp"
#include "engineir/lowering.hpp"

namespace engineir {

TensorValue::TensorValue(TensorShape s, std::vector<std::int64_t> d)
    : shape(std::move(s)), data(std::move(d)) {
  if (static_cast<std::int64_t>(data.size()) != shape.numel())
    throw ShapeMismatch("tensor data has " + std::to_string(data.size()) + " elements, shape " +
                        shape.str() + " needs " + std::to_string(shape.numel()));
}

namespace ref {

TensorValue relu(const TensorValue &x) {
  TensorValue out(x.shape);
  std::transform(x.data.begin(), x.data.end(), out.data.begin(),
                 [](std::int64_t v) { return std::max<std::int64_t>(v, 0); });
  return out;
}

TensorValue add(const TensorValue &x, const TensorValue &y) {
  if (x.shape != y.shape) throw ShapeMismatch("add: " + x.shape.str() + " vs " + y.shape.str());
  TensorValue out(x.shape);
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = x.data[i] + y.data[i];
  return out;
}

TensorValue matmul(const TensorValue &a, const TensorValue &b) {
  if (a.shape.rank() != 2 || b.shape.rank() != 2 || a.shape[1] != b.shape[0])
    throw ShapeMismatch("matmul: " + a.shape.str() + " x " + b.shape.str());
  const auto m = a.shape[0], k = a.shape[1], n = b.shape[1];
  TensorValue out(TensorShape{m, n});
  for (std::int64_t i = 0; i < m; ++i)
    for (std::int64_t p = 0; p < k; ++p) {
      const auto av = a.data[i * k + p];
      for (std::int64_t j = 0; j < n; ++j) out.data[i * n + j] += av * b.data[p * n + j];
    }
  return out;
}

TensorValue conv2d(const TensorValue &data, const TensorValue &kernel) {
  const auto &d = data.shape;
  const auto &w = kernel.shape;
  if (d.rank() != 4 || w.rank() != 4 || d[1] != w[1] || w[2] > d[2] || w[3] > d[3])
    throw ShapeMismatch("conv2d: " + d.str() + " * " + w.str());
  const auto nb = d[0], nc = d[1], hi = d[2], wi = d[3];
  const auto no = w[0], kh = w[2], kw = w[3];
  const auto ho = hi - kh + 1, wo = wi - kw + 1;
  TensorValue out(TensorShape{nb, no, ho, wo});
  for (std::int64_t b = 0; b < nb; ++b)
    for (std::int64_t o = 0; o < no; ++o)
      for (std::int64_t y = 0; y < ho; ++y)
        for (std::int64_t x = 0; x < wo; ++x) {
          std::int64_t acc = 0;
          for (std::int64_t c = 0; c < nc; ++c)
            for (std::int64_t r = 0; r < kh; ++r)
              for (std::int64_t s = 0; s < kw; ++s)
                acc += data.data[((b * nc + c) * hi + y + r) * wi + x + s] *
                       kernel.data[((o * nc + c) * kh + r) * kw + s];
          out.data[((b * no + o) * ho + y) * wo + x] = acc;
        }
  return out;
}

}  // namespace ref

TensorValue eval_workload(const Workload &w, const ValueEnv &inputs) {
  std::map<std::string, TensorValue> values;
  for (const auto &[name, shape] : w.inputs) {
    auto it = inputs.find(name);
    if (it == inputs.end()) throw UnboundInput(name);
    if (it->second.shape != shape)
      throw ShapeMismatch("input " + name + " is " + it->second.shape.str() + ", declared " + shape.str());
    values[name] = it->second;
  }
  for (const auto &n : w.nodes) {
    std::vector<const TensorValue *> args;
    for (const auto &a : n.args) args.push_back(&values.at(a));
    switch (n.kind) {
      case OpKind::Relu: values[n.id] = ref::relu(*args[0]); break;
      case OpKind::Add: values[n.id] = ref::add(*args[0], *args[1]); break;
      case OpKind::Matmul: values[n.id] = ref::matmul(*args[0], *args[1]); break;
      case OpKind::Conv2d: values[n.id] = ref::conv2d(*args[0], *args[1]); break;
    }
  }
  return values.at(w.output);
}

namespace {

using Offsets = std::vector<std::int64_t>;

/// Copies the box [lo, lo + extent) of a rank-4 tensor.
TensorValue slice4(const TensorValue &t, const Offsets &lo, const TensorShape &extent) {
  TensorValue out(extent);
  const auto &s = t.shape;
  std::size_t i = 0;
  for (std::int64_t a = 0; a < extent[0]; ++a)
    for (std::int64_t b = 0; b < extent[1]; ++b)
      for (std::int64_t c = 0; c < extent[2]; ++c)
        for (std::int64_t d = 0; d < extent[3]; ++d)
          out.data[i++] =
              t.data[(((lo[0] + a) * s[1] + lo[1] + b) * s[2] + lo[2] + c) * s[3] + lo[3] + d];
  return out;
}

class ScheduleEvaluator {
 public:
  ScheduleEvaluator(const ValueEnv &env, const EvalOptions &options) : env_(env), options_(options) {
    for (const auto &[name, v] : env) shapes_.emplace(name, v.shape);
  }

  TensorValue value(const Term &t) {
    switch (t.label.op) {
      case NodeOp::Input: {
        auto it = env_.find(t.label.name);
        if (it == env_.end()) throw UnboundInput(t.label.name);
        return it->second;
      }
      case NodeOp::Buffer: {
        infer_type(t, shapes_);
        auto v = complete(t.children[0]);
        v.shape = t.label.shape;  // elementwise results are produced flat
        return v;
      }
      default: return complete(t);
    }
  }

 private:
  TensorValue complete(const Term &chain) {
    auto type = infer_type(chain, shapes_);
    if (!type.complete())
      throw ShapeMismatch("cannot evaluate a partial tile " + type.shape.str() + " of " +
                          type.kernel->full.str());
    const Term *leaf = &chain;
    while (leaf->label.is_loop()) leaf = &leaf->children[0];
    std::vector<TensorValue> args;
    for (const auto &a : leaf->children) args.push_back(value(a));
    TensorValue out(type.kernel->full);
    fill(chain, Offsets(type.shape.rank(), 0), type.shape, args, out);
    return out;
  }

  void fill(const Term &t, const Offsets &at, const TensorShape &tile,
            const std::vector<TensorValue> &args, TensorValue &out) {
    if (t.label.op == NodeOp::Engine) {
      compute_tile(t.label.engine, at, args, out);
      return;
    }
    const auto axis = static_cast<std::size_t>(t.label.axis);
    const auto k = t.label.factor;
    TensorShape chunk = tile;
    chunk[axis] /= k;
    for (std::int64_t step = 0; step < k; ++step) {
      auto i = options_.reverse_chunks ? k - 1 - step : step;
      Offsets sub = at;
      sub[axis] += i * chunk[axis];
      fill(t.children[0], sub, chunk, args, out);
    }
  }

  static void compute_tile(const EngineInstance &inst, const Offsets &at,
                           const std::vector<TensorValue> &args, TensorValue &out) {
    switch (inst.kind) {
      case OpKind::Relu:
      case OpKind::Add: {
        const auto w = inst.params[0];
        auto slice = [&](const TensorValue &x) {
          return TensorValue(TensorShape{w}, {x.data.begin() + at[0], x.data.begin() + at[0] + w});
        };
        auto tile = inst.kind == OpKind::Relu ? ref::relu(slice(args[0]))
                                              : ref::add(slice(args[0]), slice(args[1]));
        std::copy(tile.data.begin(), tile.data.end(), out.data.begin() + at[0]);
        return;
      }
      case OpKind::Matmul: {
        const auto m = inst.param("M"), n = inst.param("N"), k = inst.param("K");
        const auto &a = args[0];
        const auto &b = args[1];
        TensorValue rows(TensorShape{m, k});
        for (std::int64_t i = 0; i < m; ++i)
          for (std::int64_t p = 0; p < k; ++p) rows.data[i * k + p] = a.data[(at[0] + i) * k + p];
        const auto bn = b.shape[1];
        TensorValue cols(TensorShape{k, n});
        for (std::int64_t p = 0; p < k; ++p)
          for (std::int64_t j = 0; j < n; ++j) cols.data[p * n + j] = b.data[p * bn + at[1] + j];
        auto tile = ref::matmul(rows, cols);
        const auto on = out.shape[1];
        for (std::int64_t i = 0; i < m; ++i)
          for (std::int64_t j = 0; j < n; ++j) out.data[(at[0] + i) * on + at[1] + j] = tile.data[i * n + j];
        return;
      }
      case OpKind::Conv2d: {
        const auto h = inst.param("H"), w = inst.param("W"), kk = inst.param("K");
        const auto &d = args[0];
        // Output rows [y0, y0+h) need input rows [y0, y0+h+K-1).
        auto halo = slice4(d, Offsets{0, 0, at[2], at[3]},
                           TensorShape{d.shape[0], d.shape[1], h + kk - 1, w + kk - 1});
        auto tile = ref::conv2d(halo, args[1]);
        const auto &o = out.shape;
        const auto &ts = tile.shape;
        for (std::int64_t b = 0; b < ts[0]; ++b)
          for (std::int64_t c = 0; c < ts[1]; ++c)
            for (std::int64_t y = 0; y < ts[2]; ++y)
              for (std::int64_t x = 0; x < ts[3]; ++x)
                out.data[((b * o[1] + c) * o[2] + at[2] + y) * o[3] + at[3] + x] =
                    tile.data[((b * ts[1] + c) * ts[2] + y) * ts[3] + x];
        return;
      }
    }
  }

  const ValueEnv &env_;
  EvalOptions options_;
  ShapeEnv shapes_;
};

}  // namespace

TensorValue eval_term(const Term &t, const ValueEnv &env, const EvalOptions &options) {
  return ScheduleEvaluator(env, options).value(t);
}

TensorValue random_tensor(const TensorShape &shape, Rng &rng, std::int64_t bound) {
  TensorValue out(shape);
  for (auto &v : out.data) v = uniform_between(rng, -bound, bound);
  return out;
}

ValueEnv random_inputs(const Workload &w, Rng &rng, std::int64_t bound) {
  ValueEnv env;
  for (const auto &[name, shape] : w.inputs) env.emplace(name, random_tensor(shape, rng, bound));
  return env;
}

nlohmann::json tensor_to_json(const TensorValue &t) {
  return nlohmann::json{{"shape", t.shape.dims}, {"data", t.data}};
}

TensorValue tensor_from_json(const nlohmann::json &j) {
  if (!j.is_object() || !j.contains("shape") || !j.contains("data"))
    throw ShapeMismatch("tensor JSON needs \"shape\" and \"data\"");
  TensorShape shape(j.at("shape").get<std::vector<std::int64_t>>());
  validate_shape(shape);
  return TensorValue(std::move(shape), j.at("data").get<std::vector<std::int64_t>>());
}

ValueEnv load_inputs(const Workload &w, const std::filesystem::path &dir) {
  ValueEnv env;
  for (const auto &[name, shape] : w.inputs) {
    auto path = dir / (name + ".json");
    std::ifstream in(path);
    if (!in) throw Error("IOError", "cannot read " + path.string());
    auto t = tensor_from_json(nlohmann::json::parse(in));
    if (t.shape != shape)
      throw ShapeMismatch(path.string() + ": shape " + t.shape.str() + ", declared " + shape.str());
    env.emplace(name, std::move(t));
  }
  return env;
}

}  // namespace engineir
