#pragma once

#include "engineir/term.hpp"
#include "engineir/workload.hpp"

namespace engineir {

/// Lowers a workload into its maximal-hardware design: every operator call
/// becomes one full-size engine whose output is materialized in a buffer.
/// Shapes are inferred first if the workload has not been through
/// infer_shapes. No Seq or Par nodes are introduced.
Term lower(const Workload &w);

/// Engine instance that computes `node` in one invocation.
EngineInstance full_engine(const Workload &w, const WorkloadNode &node);

/// Input shapes of `w`, as a typing environment for terms.
ShapeEnv input_env(const Workload &w);

}  // namespace engineir
