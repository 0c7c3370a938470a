import json
import os
import subprocess
from pathlib import Path

import jsonschema
import pytest

import engineir

WORKLOADS = Path(os.environ.get("ENGINEIR_WORKLOADS", Path(__file__).parents[2] / "workloads"))
SCHEMA = Path(os.environ.get("ENGINEIR_SCHEMA", Path(__file__).parents[2] / "schema" / "report.schema.json"))

RELU4 = "(workload (input x (4)) (output (relu x)))"


def test_lower_and_typecheck():
    seed = engineir.lower(WORKLOADS / "relu128.wl")
    assert seed == "(buffer (128) (engine relu (W 128) x))"
    assert engineir.typecheck_term("(seq 0 2 (engine relu (W 64) x))", {"x": (128,)}) == [128]


def test_errors_carry_codes():
    with pytest.raises(engineir.EngineIRError) as info:
        engineir.check_workload("(workload (input x (4)) (output (foo x)))")
    assert info.value.code == "UnknownOp"
    with pytest.raises(engineir.EngineIRError) as info:
        engineir.typecheck_term("(seq 0 3 (engine relu (W 64) x))", {"x": (128,)})
    assert info.value.code == "DivisibilityError"


def test_inventory():
    assert engineir.inventory("(par 0 2 (engine relu (W 64) x))") == {"relu{W=64}": 2}


def test_eval_term():
    shape, data = engineir.eval_term("(buffer (4) (seq 0 2 (engine relu (W 2) x)))",
                                     {"x": ((4,), [-1, 2, -3, 4])})
    assert shape == (4,)
    assert data == [0, 2, 0, 4]


def test_explore_counts_relu4():
    report = engineir.explore(RELU4, samples=10, seed=1)
    assert report["space"]["root_count"] == "9"
    assert report["run"]["stop_reason"] == "saturated"
    assert len(report["samples"]) == 10
    assert engineir.explore(RELU4, rules=["r1"])["space"]["root_count"] == "4"


def test_report_matches_schema():
    schema = json.loads(SCHEMA.read_text())
    for name in ("relu128.wl", "matmul16.wl", "conv_relu_add.wl"):
        jsonschema.validate(engineir.explore(WORKLOADS / name, samples=5), schema)


def test_report_is_deterministic():
    a = engineir.explore(WORKLOADS / "conv_relu_add.wl", samples=30, seed=4)
    b = engineir.explore(WORKLOADS / "conv_relu_add.wl", samples=30, seed=4)
    assert json.dumps(a) == json.dumps(b)


def test_verify():
    ok = engineir.verify(WORKLOADS / "matmul16.wl", samples=10, trials=2)
    assert ok["failures"] == 0 and ok["checks"] == 20
    bad = engineir.verify(WORKLOADS / "relu128.wl", rules=["r1-broken"], samples=20)
    assert bad["failures"] > 0
    assert "engine add" in bad["counterexample"]["term"]


def test_stats_monotone():
    rows = engineir.stats(WORKLOADS / "relu128.wl")
    counts = [r[3] for r in rows]
    assert counts[0] == 1
    assert counts == sorted(counts)
    assert counts[-1] == 3 ** 7


def test_factor_policy():
    binary = engineir.explore(RELU4, factors="binary")
    assert binary["config"]["flags"]["factors"] == "binary"
    with pytest.raises(engineir.EngineIRError):
        engineir.explore(RELU4, factors="primes")
