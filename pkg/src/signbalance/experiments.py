"""Simulation presets.

Each preset returns a :class:`Simulation`: one row per replicate (in
replicate order) plus a small summary with rejection rates at 0.05.
Replicate ``r`` draws its graph from substream ``r`` of
``seed.child(0)`` and seeds its tests with ``seed.child(1 + t, r)`` for
test ``t``, so rows do not depend on the worker count.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import generators as gen
from .gaussian import gaussian_summary, permutation_mean
from .mctest import UnbalancedTriangles, new_test, null_samples, old_test
from .nulls import SeedSpec, StratifiedPermutation, as_seed, shuffle_stratified

ALPHA = 0.05


@dataclass
class Simulation:
    preset: str
    seed: int
    columns: tuple
    rows: list
    summary: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        w.writerows(self.rows)
        return buf.getvalue()

    def summary_json(self) -> str:
        return json.dumps({"preset": self.preset, "seed": self.seed, **self.summary})

    def column(self, name) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([row[i] for row in self.rows], dtype=float)


def _map(fn, count, workers):
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(fn, range(count)))
    return [fn(r) for r in range(count)]


def _rate(p) -> float:
    return float(np.mean(np.asarray(p) <= ALPHA))


def clt_normality(seed=0, reps=10_000, ws=(3, 6, 3, 0.2), neg_frac=0.1, workers=1) -> Simulation:
    """Standardized stratified-null draws of U on one WS graph."""
    seed = as_seed(seed)
    g = gen.sign_uniform(gen.gen_ws(gen.WsSpec(*ws), seed.child(0).rng(0)), float(neg_frac),
                         seed.child(0).rng(1))
    summ = gaussian_summary(g)
    u = null_samples(g, UnbalancedTriangles(), StratifiedPermutation(), reps, seed.child(1), workers=workers)
    z = (u - summ.mu) / math.sqrt(summ.var_u)
    ks = stats.kstest(z, "norm")
    # same draws centred at the exact permutation mean instead of E[V_p]
    exact_mu = permutation_mean(g)
    ks_exact = stats.kstest((u - exact_mu) / math.sqrt(summ.var_u), "norm")
    rows = [(k, int(u[k]), float(z[k])) for k in range(reps)]
    return Simulation("clt-normality", seed.master_seed, ("replicate", "u", "z"), rows, {
        "edges": g.n, "negatives": g.m, "triangles": int(len(g.triangles)), "draws": reps,
        "mu": summ.mu, "var_u": summ.var_u, "sample_mean": float(u.mean()),
        "sample_var": float(u.var(ddof=1)), "ks_statistic": float(ks.statistic),
        "ks_pvalue": float(ks.pvalue), "permutation_mean": exact_mu,
        "ks_statistic_permutation_mean": float(ks_exact.statistic),
    })


def _both_tests(seed, graphs, reps, draw, workers):
    def one(r):
        g = draw(r)
        return (r, g.n, g.m, old_test(g, reps, seed.child(1, r)).p_value,
                new_test(g, reps, seed.child(2, r)).p_value)
    return _map(one, graphs, workers)


def ws_h0(seed=0, graphs=1000, reps=1000, ws=(1, 100, 2, 0.1), neg_ratio=0.06, workers=1) -> Simulation:
    """Positive WS graph overlaid with an ER negative graph of about
    ``neg_ratio`` times as many edges; no balance by construction."""
    seed = as_seed(seed)
    spec = gen.WsSpec(*ws)
    n_neg = int(round(neg_ratio * len(gen.ws_lattice(spec))))
    graph_seed = seed.child(0)

    def draw(r):
        rng = graph_seed.rng(r)
        pos = gen.gen_ws(spec, rng)
        return gen.compose(pos, gen.gen_er_gnm(spec.vertex_count, n_neg, rng))

    rows = _both_tests(seed, graphs, reps, draw, workers)
    sim = Simulation("ws-h0", seed.master_seed, ("replicate", "edges", "negatives", "p_old", "p_new"), rows)
    sim.summary = {"graphs": graphs, "reps": reps, "ws": list(ws), "er_edges": n_neg,
                   "reject_old": _rate(sim.column("p_old")), "reject_new": _rate(sim.column("p_new"))}
    return sim


def sbm_h1(seed=0, graphs=1000, reps=1000, models=(1, 2, 3), workers=1) -> Simulation:
    """Signed-SBM draws for each model, both tests."""
    seed = as_seed(seed)
    rows, summary = [], {"graphs": graphs, "reps": reps, "models": {}}
    for model in models:
        spec = gen.SBM_MODELS[model]
        mseed = seed.child(model)
        graph_seed = mseed.child(0)
        part = _both_tests(mseed, graphs, reps, lambda r: gen.gen_signed_sbm(spec, graph_seed.rng(r)),
                           workers)
        rows += [(model, *row) for row in part]
        p_old = np.array([row[3] for row in part])
        p_new = np.array([row[4] for row in part])
        summary["models"][str(model)] = {"reject_old": _rate(p_old), "reject_new": _rate(p_new)}
    return Simulation("sbm-h1", seed.master_seed,
                      ("model", "replicate", "edges", "negatives", "p_old", "p_new"), rows, summary)


def typei_stratified(seed=0, graphs=1000, reps=1000, ws=(1, 500, 3, 0.1), neg_frac=0.3,
                     workers=1) -> Simulation:
    """Graphs drawn from the stratified null of a fixed base, tested with the new test."""
    seed = as_seed(seed)
    base_seed = seed.child(0)
    base = gen.sign_uniform(gen.gen_ws(gen.WsSpec(*ws), base_seed.rng(0)), float(neg_frac),
                            base_seed.rng(1))
    idx = base.embeddedness
    draw_seed = seed.child(1)

    def one(r):
        g = shuffle_stratified(base, idx, draw_seed.rng(r))
        res = new_test(g, reps, seed.child(2, r))
        return (r, int(res.observed), res.p_value)

    rows = _map(one, graphs, workers)
    sim = Simulation("typeI-stratified", seed.master_seed, ("replicate", "u", "p_new"), rows)
    p = sim.column("p_new")
    sim.summary = {"graphs": graphs, "reps": reps, "edges": base.n, "negatives": base.m,
                   "reject_new": _rate(p), "reject_new_0.10": float(np.mean(p <= 0.10))}
    return sim


PRESETS = {
    "clt-normality": clt_normality,
    "ws-h0": ws_h0,
    "sbm-h1": sbm_h1,
    "typeI-stratified": typei_stratified,
}


def run_preset(name: str, **kwargs) -> Simulation:
    try:
        fn = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return fn(**kwargs)


__all__ = ["Simulation", "PRESETS", "run_preset", "clt_normality", "ws_h0", "sbm_h1",
           "typei_stratified", "SeedSpec"]
