"""Monte Carlo permutation tests of balance.

``mc_test`` runs the generic loop: evaluate the statistic on the observed
graph, evaluate it on ``reps`` null draws (replicate ``k`` uses substream
``k`` of the seed), and report the fraction of null values at or below the
observed one. ``old_test``, ``new_test``, ``binned_test`` and
``structural_test`` are presets.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import ndtri

from . import kernels
from .errors import StatisticUndefined
from .graph import SignedGraph
from .nulls import (BinnedPermutation, SeedSpec, StratifiedPermutation,
                    UniformPermutation, as_seed)

MODES = ("raw_left", "add_one_left", "two_sided", "raw_right")
KEEP_SAMPLES_LIMIT = 10_000
JSON_FIELDS = ("method", "observed", "replicates", "p_value", "p_value_mode",
               "null_mean", "null_var", "seed")


@dataclass
class TestResult:
    method: str
    observed: float
    replicates: int
    p_value: float
    p_value_mode: str
    null_mean: float
    null_var: float
    seed: Optional[int]
    null_samples: Optional[np.ndarray] = field(default=None, repr=False)
    flags: tuple = ()

    __test__ = False  # not a pytest class

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in JSON_FIELDS}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False)


class UnbalancedTriangles:
    """Number of triangles with an odd number of negative edges."""

    name = "unbalanced"

    def batch(self, g: SignedGraph, neg: np.ndarray) -> np.ndarray:
        counts = kernels.census_batch(neg, g.triangles)
        return (counts[:, 1] + counts[:, 3]).astype(np.float64)

    def __call__(self, g: SignedGraph) -> float:
        return float(self.batch(g, g.negative[None, :])[0])


class EmbeddednessDifference:
    """Mean embeddedness of negative edges minus that of positive edges."""

    name = "structural"

    def batch(self, g, neg):
        eps = g.embeddedness.eps
        neg = np.asarray(neg, dtype=np.int64)
        m = neg.sum(axis=1)
        if np.any((m == 0) | (m == g.n)):
            raise StatisticUndefined(
                "statistic undefined: structural test needs both negative and positive edges")
        s_neg = neg @ eps
        s_all = int(eps.sum())
        return s_neg / m - (s_all - s_neg) / (g.n - m)

    def __call__(self, g):
        return float(self.batch(g, g.negative[None, :])[0])


def p_value(samples: np.ndarray, observed: float, mode: str) -> float:
    n_rep = len(samples)
    below = int(np.count_nonzero(samples <= observed))
    above = int(np.count_nonzero(samples >= observed))
    if mode == "raw_left":
        return below / n_rep
    if mode == "add_one_left":
        return (1 + below) / (n_rep + 1)
    if mode == "raw_right":
        return above / n_rep
    if mode == "two_sided":
        return min(1.0, 2.0 * min(below, above) / n_rep)
    raise ValueError(f"unknown p-value mode {mode!r}; expected one of {MODES}")


def null_samples(g, statistic, null, reps, seed, workers=1, chunk=256) -> np.ndarray:
    """Statistic values on replicates ``0..reps-1``, in replicate order."""
    seed = as_seed(seed)
    batched = hasattr(statistic, "batch") and hasattr(null, "draw_batch")

    def run(start):
        ks = range(start, min(reps, start + chunk))
        rngs = [seed.rng(k) for k in ks]
        if batched:
            return statistic.batch(g, null.draw_batch(g, rngs))
        out = np.empty(len(rngs))
        for r, rng in enumerate(rngs):
            out[r] = _checked(statistic(null(g, rng)))
        return out

    starts = range(0, reps, chunk)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, starts))
    else:
        parts = [run(s) for s in starts]
    return np.concatenate(parts) if parts else np.zeros(0)


def _checked(value) -> float:
    value = float(value)
    if math.isnan(value):
        raise StatisticUndefined("statistic undefined on this graph")
    return value


def mc_test(g: SignedGraph, statistic, null, reps: int, seed=None, mode: str = "raw_left", *,
            method: str = "custom", keep_samples: Optional[bool] = None, workers: int = 1) -> TestResult:
    """Generic Monte Carlo test.

    ``statistic`` maps a graph to a real; ``null`` maps ``(graph, rng)`` to a
    null graph. Objects that also expose ``batch``/``draw_batch`` (all the
    presets do) take the vectorized path, which yields identical numbers.
    """
    if reps < 1:
        raise ValueError("replicate count must be at least 1")
    if mode not in MODES:
        raise ValueError(f"unknown p-value mode {mode!r}; expected one of {MODES}")
    seed = as_seed(seed)
    observed = _checked(statistic(g))
    s = null_samples(g, statistic, null, reps, seed, workers=workers)
    if keep_samples is None:
        keep_samples = reps <= KEEP_SAMPLES_LIMIT
    return TestResult(
        method=method,
        observed=observed,
        replicates=reps,
        p_value=p_value(s, observed, mode),
        p_value_mode=mode,
        null_mean=float(s.mean()),
        null_var=float(s.var(ddof=1)) if reps > 1 else 0.0,
        seed=seed.master_seed,
        null_samples=s if keep_samples else None,
    )


def old_test(g, reps=10_000, seed=None, mode="raw_left", **kw) -> TestResult:
    """Unbalanced-triangle count against uniformly permuted signs."""
    return mc_test(g, UnbalancedTriangles(), UniformPermutation(), reps, seed, mode, method="old", **kw)


def new_test(g, reps=10_000, seed=None, mode="raw_left", **kw) -> TestResult:
    """Unbalanced-triangle count against signs permuted within embeddedness levels."""
    return mc_test(g, UnbalancedTriangles(), StratifiedPermutation(), reps, seed, mode, method="new", **kw)


def binned_test(g, bins, reps=10_000, seed=None, mode="raw_left", **kw) -> TestResult:
    return mc_test(g, UnbalancedTriangles(), BinnedPermutation(bins), reps, seed, mode,
                   method="binned", **kw)


_ALTERNATIVES = {"two-sided": "two_sided", "less": "raw_left", "greater": "raw_right"}


def structural_test(g, reps=10_000, seed=None, alternative="two-sided", **kw) -> TestResult:
    """Difference in mean embeddedness of negative vs positive edges, uniform null.

    ``alternative="less"`` tests for negatives being less embedded.
    """
    if g.m == 0 or g.m == g.n:
        raise StatisticUndefined(
            "statistic undefined: structural test needs both negative and positive edges")
    try:
        mode = _ALTERNATIVES[alternative]
    except KeyError:
        raise ValueError(f"alternative must be one of {sorted(_ALTERNATIVES)}") from None
    return mc_test(g, EmbeddednessDifference(), UniformPermutation(), reps, seed, mode,
                   method="structural", **kw)


def critical_value(source, alpha: float) -> float:
    """Lower-tail ``alpha`` critical value.

    ``source`` is a sample of null statistics (or a TestResult holding one),
    giving the empirical quantile ``min{c : F(c) >= alpha}``, or a
    GaussianSummary, giving ``mu + z_alpha * sqrt(var_u)``.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if hasattr(source, "var_u"):
        return float(source.mu + ndtri(alpha) * math.sqrt(source.var_u))
    if isinstance(source, TestResult):
        if source.null_samples is None:
            raise ValueError("TestResult does not retain its null samples")
        source = source.null_samples
    s = np.sort(np.asarray(source, dtype=np.float64))
    if s.size == 0:
        raise ValueError("empty null sample")
    k = max(1, math.ceil(alpha * s.size - 1e-12))
    return float(s[k - 1])


__all__ = ["TestResult", "mc_test", "old_test", "new_test", "binned_test", "structural_test",
           "critical_value", "p_value", "null_samples", "UnbalancedTriangles",
           "EmbeddednessDifference", "SeedSpec"]
