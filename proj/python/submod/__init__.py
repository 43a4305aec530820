"""Submodular data subset selection: greedy summarization over similarity
kernels, concept covers, and dispersion models, with memoized marginal gains.

Thin JSON-friendly wrappers over the C++ core.
"""

import json as _json
import os as _os

from ._core import (
    SubmodError,
    bench_json,
    evaluate_json,
    generate,
    greedy_kernel,
    kind_names,
    summarize_json,
)

__all__ = [
    "SubmodError",
    "bench",
    "evaluate",
    "generate",
    "greedy",
    "kind_names",
    "summarize",
]


def summarize(job, base_dir=None):
    """Run a summarization job (dict, same schema as a job file) and return
    the report as a dict."""
    if base_dir is None:
        base_dir = _os.getcwd()
    return _json.loads(summarize_json(_json.dumps(job), str(base_dir)))


def evaluate(order, annotations=None, manifest=None, ground_size=0):
    """Score a selected order against segment annotations and/or concepts."""
    return _json.loads(
        evaluate_json(list(order), str(annotations or ""), str(manifest or ""),
                      int(ground_size)))


def greedy(similarity, kind, budget, **kwargs):
    """Greedy selection over a dense similarity matrix (numpy array)."""
    return _json.loads(greedy_kernel(similarity, kind, budget, **kwargs))


def bench(n, functions=(), budgets=(), repeats=1, seed=0, dpp_max_n=1000,
          lazy=True):
    """Memoized-vs-naive timing report as a dict."""
    return _json.loads(
        bench_json(n, list(functions), list(budgets), repeats, seed, dpp_max_n,
                   lazy))
