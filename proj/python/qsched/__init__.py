"""Batch scheduling of quantum circuits across devices with gate cutting."""

import json

from . import _core
from ._core import (
    CapacityError,
    Error,
    InfeasibleCut,
    InfeasibleJob,
    InstanceTooLarge,
    ValidationError,
)

__all__ = [
    "CapacityError",
    "Error",
    "InfeasibleCut",
    "InfeasibleJob",
    "InstanceTooLarge",
    "ValidationError",
    "estimate_cut",
    "generate_circuit",
    "run_benchmark",
    "schedule",
]


def generate_circuit(num_qubits, depth, density=0.3, seed=0):
    """Random circuit as a dict with ``id``, ``numQubits`` and ``gates``."""
    return json.loads(_core.generate_circuit(num_qubits, depth, density, seed))


def estimate_cut(circuit, max_a, max_b, fragments=False):
    """Cheapest bipartition of ``circuit`` with block sizes at most ``max_a`` and ``max_b``."""
    return json.loads(_core.estimate_cut(json.dumps(circuit), max_a, max_b, fragments))


def schedule(batch, machines, algo="heuristic", seed=1, iterations=100, rl_iterations=5000):
    """Schedule one batch; returns ``{"schedule": ..., "evaluation": ...}``."""
    doc = _core.schedule(json.dumps(batch), json.dumps(machines), algo, seed, iterations,
                         rl_iterations)
    return json.loads(doc)


def run_benchmark(scenario="builtin:5-7", schedulers=("baseline", "heuristic", "rl"),
                  overrides=(), seed=None, timing=True):
    """Run a benchmark scenario; returns ``(report_dict, csv_text)``."""
    report, csv = _core.run_benchmark(scenario, list(schedulers), list(overrides), seed, timing)
    return json.loads(report), csv
