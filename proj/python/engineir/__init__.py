"""Python front end to the engineir design-space explorer."""

import json
from pathlib import Path

from . import _core
from ._core import NativeError, __version__

__all__ = [
    "EngineIRError",
    "check_workload",
    "lower",
    "typecheck_term",
    "inventory",
    "eval_term",
    "explore",
    "verify",
    "stats",
    "__version__",
]

EngineIRError = NativeError


def _text(workload):
    if isinstance(workload, Path):
        return workload.read_text(), workload.stem
    return workload, "workload"


def check_workload(workload):
    text, name = _text(workload)
    return _core.check_workload(text, name)


def lower(workload):
    """Initial (seed) design of a workload, in term syntax."""
    return _core.lower(_text(workload)[0])


def typecheck_term(term, shapes):
    return _core.typecheck_term(term, {k: list(v) for k, v in shapes.items()})


def inventory(term):
    """Engine instance -> copy count."""
    return dict(_core.inventory(term))


def eval_term(term, inputs):
    """Evaluate a schedule term. `inputs` maps names to (shape, flat data)."""
    payload = {k: {"shape": list(s), "data": list(d)} for k, (s, d) in inputs.items()}
    out = json.loads(_core.eval_term_json(term, json.dumps(payload)))
    return tuple(out["shape"]), out["data"]


def explore(workload, **options):
    """Saturate and sample; returns the report as a dict."""
    text, name = _text(workload)
    return json.loads(_core.explore_json(text, name, options))


def verify(workload, trials=10, **options):
    return json.loads(_core.verify_json(_text(workload)[0], options, trials))


def stats(workload, **options):
    """(iteration, nodes, classes, count_terms) per iteration."""
    return [(i, n, c, int(k)) for i, n, c, k in _core.stats(_text(workload)[0], options)]
