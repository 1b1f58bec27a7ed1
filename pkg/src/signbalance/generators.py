"""Graph generators used by the simulation experiments.

Unsigned graphs are returned as all-positive :class:`SignedGraph` objects.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .graph import SignedGraph

MAX_REWIRE_TRIES = 100


@dataclass(frozen=True)
class WsSpec:
    d: int
    n_per_dim: int
    k: int
    rewire_p: float

    def __post_init__(self):
        if self.d < 1 or self.n_per_dim < 2 or self.k < 1:
            raise ValueError("need d >= 1, n_per_dim >= 2, k >= 1")
        if not 0.0 <= self.rewire_p <= 1.0:
            raise ValueError("rewire_p must lie in [0, 1]")

    @property
    def vertex_count(self) -> int:
        return self.n_per_dim ** self.d


@dataclass(frozen=True)
class SbmSpec:
    """Two equal communities; ``p_*`` within, ``q_*`` between."""

    n_vertices: int
    p_plus: float
    q_plus: float
    p_minus: float
    q_minus: float

    def __post_init__(self):
        for name in ("p_plus", "q_plus", "p_minus", "q_minus"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {val}")
        if self.n_vertices < 0:
            raise ValueError("n_vertices must be nonnegative")


# Models 1-3 of the signed-SBM power study.
SBM_MODELS = {
    1: SbmSpec(100, 0.4, 0.1, 0.03, 0.1),
    2: SbmSpec(50, 0.3, 0.0, 0.0, 0.3),
    3: SbmSpec(50, 0.3, 0.2, 0.2, 0.3),
}


def _from_pairs(n_vertices, pairs, negative=None) -> SignedGraph:
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    pairs = np.sort(pairs, axis=1)
    order = np.lexsort((pairs[:, 1], pairs[:, 0]))
    pairs = pairs[order]
    signs = np.ones(len(pairs), dtype=np.int8)
    if negative is not None:
        signs[np.asarray(negative, dtype=bool)[order]] = -1
    return SignedGraph(n_vertices, pairs, signs)


def lattice_offsets(d: int, n_per_dim: int, k: int) -> list:
    """Offsets within periodic L1 distance ``k`` of the origin (origin excluded)."""
    half = n_per_dim // 2
    axis = list(range(-((n_per_dim - 1) // 2), half + 1))
    out = []
    for off in itertools.product(axis, repeat=d):
        dist = sum(min(abs(x), n_per_dim - abs(x)) for x in off)
        if 0 < dist <= k:
            out.append(off)
    return out


def ws_lattice(spec: WsSpec) -> set:
    n, d = spec.n_per_dim, spec.d
    coords = np.array(list(itertools.product(range(n), repeat=d)), dtype=np.int64)
    weights = n ** np.arange(d - 1, -1, -1)
    ids = coords @ weights
    edges = set()
    for off in lattice_offsets(d, n, spec.k):
        nbr = ((coords + np.asarray(off)) % n) @ weights
        for u, v in zip(ids.tolist(), nbr.tolist()):
            if u != v:
                edges.add((u, v) if u < v else (v, u))
    return edges


def gen_ws(spec: WsSpec, rng: np.random.Generator) -> SignedGraph:
    """Periodic d-dimensional lattice linking vertices within ``k`` hops, then
    rewire each endpoint of each edge with probability ``rewire_p``.

    A rewired endpoint moves to a uniform vertex; self-loops and duplicate
    edges are resampled, and after ``MAX_REWIRE_TRIES`` failures the
    endpoint is left in place, so the edge count never changes.
    """
    N = spec.vertex_count
    base = sorted(ws_lattice(spec))
    present = set(base)
    for edge in base:
        ends = list(edge)
        for end in (0, 1):
            if rng.random() >= spec.rewire_p:
                continue
            keep = ends[1 - end]
            for _ in range(MAX_REWIRE_TRIES):
                w = int(rng.integers(N))
                cand = (keep, w) if keep < w else (w, keep)
                if w != keep and cand not in present:
                    present.discard(tuple(sorted(ends)))
                    present.add(cand)
                    ends[end] = w
                    break
    return _from_pairs(N, sorted(present))


def gen_er_gnm(n_vertices: int, m: int, rng: np.random.Generator) -> SignedGraph:
    """Uniformly random ``m``-subset of the vertex pairs."""
    total = n_vertices * (n_vertices - 1) // 2
    if m < 0 or m > total:
        raise ValueError(f"cannot place {m} edges on {n_vertices} vertices (max {total})")
    codes = np.sort(rng.choice(total, size=m, replace=False)) if m else np.zeros(0, dtype=np.int64)
    return _from_pairs(n_vertices, _decode_pairs(codes, n_vertices))


def _decode_pairs(codes, n_vertices):
    """Map codes ``0..C(N,2)-1`` to pairs ``(u, v)``, ``u < v``, in lexicographic order."""
    codes = np.asarray(codes, dtype=np.int64)
    # row u starts at u*N - u*(u+1)/2
    starts = np.array([u * n_vertices - u * (u + 1) // 2 for u in range(max(n_vertices, 1))],
                      dtype=np.int64)
    u = np.searchsorted(starts, codes, side="right") - 1
    v = codes - starts[u] + u + 1
    return np.stack([u, v], axis=1)


def sign_uniform(g: SignedGraph, count_or_fraction, rng: np.random.Generator) -> SignedGraph:
    """Make a uniformly random subset of edges negative.

    An ``int`` is an exact count; a ``float`` is a fraction of ``n`` (rounded).
    """
    if isinstance(count_or_fraction, (float, np.floating)):
        if not 0.0 <= count_or_fraction <= 1.0:
            raise ValueError("fraction must lie in [0, 1]")
        m = int(round(count_or_fraction * g.n))
    else:
        m = int(count_or_fraction)
    if not 0 <= m <= g.n:
        raise ValueError(f"negative count {m} outside [0, {g.n}]")
    neg = np.zeros(g.n, dtype=bool)
    neg[rng.choice(g.n, size=m, replace=False)] = True
    return g.with_negative(neg)


def compose(positive: SignedGraph, negative: SignedGraph) -> SignedGraph:
    """Union of two supports; an edge present in ``negative`` is negative."""
    if positive.vertex_count != negative.vertex_count:
        raise ValueError("graphs must share the vertex set")
    neg_set = set(map(tuple, negative.edges.tolist()))
    pairs = sorted(set(map(tuple, positive.edges.tolist())) | neg_set)
    flags = [p in neg_set for p in pairs]
    return _from_pairs(positive.vertex_count, pairs, flags)


def gen_signed_sbm(spec: SbmSpec, rng: np.random.Generator, clash: str = "void") -> SignedGraph:
    """Overlay a positive and a negative two-block SBM on the same communities.

    Vertices ``0..n//2-1`` form community 0, the rest community 1. A pair
    drawn by both blockmodels gets no edge (``clash="void"``) or a negative
    edge (``clash="negative"``).
    """
    if clash not in ("void", "negative"):
        raise ValueError("clash must be 'void' or 'negative'")
    n = spec.n_vertices
    iu, iv = np.triu_indices(n, k=1)
    half = n // 2
    same = (iu < half) == (iv < half)
    p_pos = np.where(same, spec.p_plus, spec.q_plus)
    p_neg = np.where(same, spec.p_minus, spec.q_minus)
    draw_pos = rng.random(len(iu)) < p_pos
    draw_neg = rng.random(len(iu)) < p_neg
    if clash == "void":
        keep = draw_pos ^ draw_neg
        negative = draw_neg[keep]
    else:
        keep = draw_pos | draw_neg
        negative = draw_neg[keep]
    pairs = np.stack([iu[keep], iv[keep]], axis=1)
    return _from_pairs(n, pairs, negative)
