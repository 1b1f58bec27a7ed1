"""Closed-form moments of the independent-sign model and the Gaussian test.

Under the independent model every edge ``i`` is negative with probability
``q_i`` (shared within an embeddedness level). Writing the normalized sign
``Xt_i = (X_i - r_i) / s_i`` with ``r_i = 1 - 2 q_i`` and
``s_i = 2 sqrt(q_i (1 - q_i))``, each triad count expands exactly as

    T_a - E[T_a] = sum_i c1_a(i) Xt_i + sum_{i<j} c2_a(i,j) Xt_i Xt_j
                   + sum_{i<j<k} c3_a(i,j,k) Xt_i Xt_j Xt_k

with sums over edges (pairs, triples) of a common triangle. The monomials
are orthonormal, so every covariance is a plain dot product of
coefficients. Conditioning the joint normal of (T1, T2, T3, M) on the
per-level negative counts gives the variance of the unbalanced count under
the stratified permutation null.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.special import ndtr

from .errors import DegenerateApproximation
from .graph import EmbeddednessIndex, SignedGraph, census
from .mctest import TestResult
from .nulls import RademacherSpec

# Below these sizes the normal approximation is flagged as unreliable.
SMALL_EDGES = 100
SMALL_TRIANGLES = 30
VAR_TOL = 1e-10


class ApproximationWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Decomposition:
    """Expansion coefficients of (T1, T2, T3) in normalized edge signs.

    ``linear[a, i]`` multiplies ``Xt_i``; ``pair_coef[a, p]`` multiplies
    ``Xt_i Xt_j`` for the unordered pair ``pairs[p] = (i, j)``;
    ``triple_coef[a, t]`` multiplies the product over triangle ``t``.
    Row ``a`` is ``T_{a+1}``. ``level_coef[i] = -s_i / 2`` is the
    coefficient of ``Xt_i`` in its level's centred negative count.
    """

    q: np.ndarray
    r: np.ndarray
    s: np.ndarray
    linear: np.ndarray
    pairs: np.ndarray
    pair_coef: np.ndarray
    triangles: np.ndarray
    triple_coef: np.ndarray
    level_coef: np.ndarray

    def normalize(self, negative) -> np.ndarray:
        """Normalized signs ``Xt`` for a negative-indicator vector (0 where ``s = 0``)."""
        x = 1.0 - 2.0 * np.asarray(negative, dtype=np.float64)
        out = np.zeros_like(x)
        ok = self.s > 0
        out[ok] = (x[ok] - self.r[ok]) / self.s[ok]
        return out

    def components(self, xt) -> np.ndarray:
        """``(3, 3)`` array of ``T_{a,b}``: linear, pair and triple parts for each T_a."""
        xt = np.asarray(xt, dtype=np.float64)
        pair_prod = xt[self.pairs[:, 0]] * xt[self.pairs[:, 1]]
        trip_prod = xt[self.triangles[:, 0]] * xt[self.triangles[:, 1]] * xt[self.triangles[:, 2]]
        return np.stack([self.linear @ xt, self.pair_coef @ pair_prod, self.triple_coef @ trip_prod], axis=1)


@dataclass(frozen=True)
class GaussianSummary:
    """Moments of (T1, T2, T3, M) under the independent model.

    ``sigma`` is the unnormalized covariance over ``labels``
    (``T1, T2, T3`` then one ``M`` entry per retained level or group).
    ``sigma_s`` / ``var_u`` are filled by :func:`conditional`.
    """

    mu: float
    expected_T: tuple
    sigma: np.ndarray
    labels: tuple
    dropped_levels: tuple
    sigma_s: Optional[np.ndarray] = None
    var_u: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "mu": self.mu,
            "expected_T": list(self.expected_T),
            "sigma": {"labels": list(self.labels), "values": self.sigma.tolist()},
            "sigma_s": None if self.sigma_s is None else self.sigma_s.tolist(),
            "var_u": self.var_u,
            "dropped_levels": list(self.dropped_levels),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _edge_q(g, idx, spec):
    idx = idx if idx is not None else g.embeddedness
    spec = spec if spec is not None else RademacherSpec.plug_in(idx)
    return idx, spec, spec.per_edge(idx)


def expected_counts(g: SignedGraph, idx: Optional[EmbeddednessIndex] = None,
                    spec: Optional[RademacherSpec] = None) -> tuple:
    """``(E[T1], E[T2], E[T3], E[T1 + T3])`` under independent signs."""
    _, _, q = _edge_q(g, idx, spec)
    tri = g.triangles
    qa, qb, qc = q[tri[:, 0]], q[tri[:, 1]], q[tri[:, 2]]
    pa, pb, pc = 1 - qa, 1 - qb, 1 - qc
    e1 = float(np.sum(qa * pb * pc + pa * qb * pc + pa * pb * qc))
    e2 = float(np.sum(qa * qb * pc + qa * pb * qc + pa * qb * qc))
    e3 = float(np.sum(qa * qb * qc))
    return e1, e2, e3, e1 + e3


def permutation_mean(g: SignedGraph, idx: Optional[EmbeddednessIndex] = None) -> float:
    """Exact ``E[U]`` under the stratified permutation null.

    Edges of one level are drawn without replacement, so two or three
    edges of a triangle sharing a level are negative together with the
    hypergeometric rather than the product probability. The difference
    from ``E[V_p]`` is small relative to the null spread on large graphs.
    """
    idx = idx if idx is not None else g.embeddedness
    tri = g.triangles
    if len(tri) == 0:
        return 0.0
    n_lv = np.zeros(idx.L + 1)
    m_lv = np.zeros(idx.L + 1)
    for lv in idx.levels:
        n_lv[lv], m_lv[lv] = idx.n_l[lv], idx.m_l[lv]
    lv = idx.eps[tri]

    def falling(x, k):
        # x (x-1) ... (x-k+1) for k <= 3
        out = np.ones_like(x)
        for j in range(3):
            out = out * np.where(j < k, x - j, 1.0)
        return out

    def joint(cols):
        """P(all edges in ``cols`` negative), rows = triangles."""
        sub = lv[:, cols]
        pr = np.ones(len(sub))
        done = np.zeros(sub.shape, dtype=bool)
        for c in range(sub.shape[1]):
            same = (sub == sub[:, [c]]) & ~done
            k = same.sum(axis=1)
            done |= same
            level = sub[:, c]
            use = k > 0
            nl, ml = n_lv[level[use]], m_lv[level[use]]
            pr[use] *= falling(ml, k[use]) / falling(nl, k[use])
        return pr

    p1 = joint([0]) + joint([1]) + joint([2])
    p2 = joint([0, 1]) + joint([0, 2]) + joint([1, 2])
    p3 = joint([0, 1, 2])
    # P(odd number negative) by inclusion-exclusion on indicators
    return float(np.sum(p1 - 2 * p2 + 4 * p3))


def coefficients(g: SignedGraph, idx: Optional[EmbeddednessIndex] = None,
                 spec: Optional[RademacherSpec] = None) -> Decomposition:
    _, _, q = _edge_q(g, idx, spec)
    n = g.n
    s = 2.0 * np.sqrt(q * (1.0 - q))
    r = 1.0 - 2.0 * q
    tri = g.triangles

    linear = np.zeros((3, n))
    # edge a with the other two edges b, c of its triangle
    for a_col, b_col, c_col in ((0, 1, 2), (1, 0, 2), (2, 0, 1)):
        a, b, c = tri[:, a_col], tri[:, b_col], tri[:, c_col]
        qb, qc = q[b], q[c]
        one_neg = qb * (1 - qc) + (1 - qb) * qc
        half_s = s[a] / 2
        contrib = (
            half_s * (one_neg - (1 - qb) * (1 - qc)),
            half_s * (qb * qc - one_neg),
            -half_s * qb * qc,
        )
        for row in range(3):
            linear[row] += np.bincount(a, weights=contrib[row], minlength=n)

    # pairs (i, j) sharing a triangle, with the third edge k; unique per pair
    pi = np.concatenate([tri[:, 0], tri[:, 0], tri[:, 1]])
    pj = np.concatenate([tri[:, 1], tri[:, 2], tri[:, 2]])
    pk = np.concatenate([tri[:, 2], tri[:, 1], tri[:, 0]])
    order = np.lexsort((pj, pi))
    pi, pj, pk = pi[order], pj[order], pk[order]
    ss4 = s[pi] * s[pj] / 4
    qk = q[pk]
    pair_coef = np.stack([ss4 * (3 * qk - 2), ss4 * (1 - 3 * qk), ss4 * qk])

    sss8 = s[tri[:, 0]] * s[tri[:, 1]] * s[tri[:, 2]] / 8
    triple_coef = np.stack([-3 * sss8, 3 * sss8, -sss8])

    return Decomposition(q=q, r=r, s=s, linear=linear, pairs=np.stack([pi, pj], axis=1),
                         pair_coef=pair_coef, triangles=tri, triple_coef=triple_coef,
                         level_coef=-s / 2)


def _groups(idx: EmbeddednessIndex, q: np.ndarray, pooled: bool):
    """Retained conditioning groups ``(label, edge indices)`` and dropped levels."""
    if pooled:
        all_edges = np.arange(len(idx.eps))
        qv = q[0] if len(q) else 0.0
        if len(q) and 0.0 < qv < 1.0:
            return [("M", all_edges)], ()
        return [], tuple(idx.levels)
    kept, dropped = [], []
    for lv in idx.levels:
        members = idx.strata[lv]
        ql = q[members[0]]
        if 0.0 < ql < 1.0:
            kept.append((f"M{lv}", members))
        else:
            dropped.append(lv)
    return kept, tuple(dropped)


def covariance(g: SignedGraph, idx: Optional[EmbeddednessIndex] = None,
               spec: Optional[RademacherSpec] = None, pooled: bool = False,
               decomposition: Optional[Decomposition] = None) -> GaussianSummary:
    """Unnormalized covariance of (T1, T2, T3, M...) under independent signs.

    With ``pooled=True`` the per-level counts are replaced by the single
    total negative count (the uniform-null variant).
    """
    idx, spec, q = _edge_q(g, idx, spec)
    dec = decomposition if decomposition is not None else coefficients(g, idx, spec)
    groups, dropped = _groups(idx, q, pooled)

    k = len(groups)
    sigma = np.zeros((3 + k, 3 + k))
    sigma[:3, :3] = (dec.linear @ dec.linear.T + dec.pair_coef @ dec.pair_coef.T
                     + dec.triple_coef @ dec.triple_coef.T)
    for col, (_, members) in enumerate(groups, start=3):
        h = dec.level_coef[members]
        sigma[:3, col] = dec.linear[:, members] @ h
        sigma[col, :3] = sigma[:3, col]
        sigma[col, col] = h @ h
    e1, e2, e3, ev = expected_counts(g, idx, spec)
    labels = ("T1", "T2", "T3") + tuple(label for label, _ in groups)
    return GaussianSummary(mu=ev, expected_T=(e1, e2, e3), sigma=sigma, labels=labels,
                           dropped_levels=dropped)


def conditional(summary: GaussianSummary) -> GaussianSummary:
    """Condition (T1, T2, T3) on the retained counts via the Schur complement."""
    sigma = summary.sigma
    s_tt = sigma[:3, :3]
    s_tm = sigma[:3, 3:]
    s_mm = sigma[3:, 3:]
    if s_mm.size:
        if np.any(np.diag(s_mm) <= 0):
            raise np.linalg.LinAlgError("singular count covariance after dropping degenerate levels")
        sigma_s = s_tt - s_tm @ np.linalg.solve(s_mm, s_tm.T)
    else:
        sigma_s = s_tt.copy()
    sigma_s = (sigma_s + sigma_s.T) / 2
    var_u = float(sigma_s[0, 0] + sigma_s[2, 2] + 2 * sigma_s[0, 2])
    return replace(summary, sigma_s=sigma_s, var_u=var_u)


def gaussian_summary(g: SignedGraph, mode: str = "stratified",
                     spec: Optional[RademacherSpec] = None) -> GaussianSummary:
    idx = g.embeddedness
    if mode == "stratified":
        spec = spec if spec is not None else RademacherSpec.plug_in(idx)
        return conditional(covariance(g, idx, spec))
    if mode == "uniform":
        return conditional(covariance(g, idx, RademacherSpec.uniform(idx), pooled=True))
    raise ValueError("mode must be 'stratified' or 'uniform'")


def gaussian_test(g: SignedGraph, mode: str = "stratified", center: str = "rademacher") -> TestResult:
    """Left-tailed normal approximation ``Phi((U - mu) / sqrt(var_u))``.

    ``mu`` is ``E[V_p]`` by default; ``center="permutation"`` uses the exact
    permutation-null mean instead (stratified mode only).
    """
    if center not in ("rademacher", "permutation"):
        raise ValueError("center must be 'rademacher' or 'permutation'")
    if center == "permutation" and mode != "stratified":
        raise ValueError("center='permutation' needs mode='stratified'")
    if len(g.triangles) == 0:
        raise DegenerateApproximation("no triangles: the unbalanced count is identically 0")
    summ = gaussian_summary(g, mode)
    if summ.var_u <= VAR_TOL:
        raise DegenerateApproximation(f"degenerate approximation: var_u = {summ.var_u:.3g}")
    flags = ()
    if g.n < SMALL_EDGES or len(g.triangles) < SMALL_TRIANGLES:
        flags = ("small_graph",)
        warnings.warn("graph is small; the normal approximation may be poor", ApproximationWarning,
                      stacklevel=2)
    u = census(g).u
    mu = summ.mu if center == "rademacher" else permutation_mean(g)
    p = float(ndtr((u - mu) / math.sqrt(summ.var_u)))
    return TestResult(method="gaussian", observed=float(u), replicates=0, p_value=p,
                      p_value_mode="raw_left", null_mean=mu, null_var=summ.var_u,
                      seed=None, flags=flags)
