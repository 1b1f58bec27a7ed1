"""Signed graph model, triangle enumeration, embeddedness and triad census."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from . import kernels
from .errors import GraphValidationError

_SIGN_TOKENS = {"+": 1, "+1": 1, "1": 1, "-": -1, "-1": -1}


def _frozen(a, dtype):
    a = np.ascontiguousarray(a, dtype=dtype)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class SignedGraph:
    """Undirected signed graph on vertices ``0..N-1``.

    Edges are canonical ``(u, v)`` pairs with ``u < v``, sorted
    lexicographically; ``signs[i]`` is the sign of ``edges[i]``. Arrays are
    read-only. Use :func:`from_edge_list` to build one from raw input.
    """

    vertex_count: int
    edges: np.ndarray
    signs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "edges", _frozen(np.reshape(self.edges, (-1, 2)), np.int64))
        object.__setattr__(self, "signs", _frozen(self.signs, np.int8))

    @property
    def n(self) -> int:
        return len(self.edges)

    @property
    def m(self) -> int:
        return int(np.count_nonzero(self.signs < 0))

    @cached_property
    def negative(self) -> np.ndarray:
        """uint8 indicator of negative edges."""
        return _frozen(self.signs < 0, np.uint8)

    @cached_property
    def triangles(self) -> np.ndarray:
        return _frozen(_enumerate_triangles(self), np.int64)

    @cached_property
    def embeddedness(self) -> "EmbeddednessIndex":
        return EmbeddednessIndex.from_graph(self)

    def with_signs(self, signs) -> "SignedGraph":
        """Same support, new signs; support-derived caches are carried over."""
        signs = np.asarray(signs)
        if signs.shape != (self.n,):
            raise ValueError("sign vector length does not match edge count")
        if not np.all(np.abs(signs) == 1):
            raise ValueError("signs must be +1 or -1")
        g = SignedGraph(self.vertex_count, self.edges, signs)
        if "triangles" in self.__dict__:
            g.__dict__["triangles"] = self.triangles
        return g

    def with_negative(self, neg) -> "SignedGraph":
        neg = np.asarray(neg, dtype=bool)
        return self.with_signs(np.where(neg, -1, 1))

    def __eq__(self, other):
        if not isinstance(other, SignedGraph):
            return NotImplemented
        return (self.vertex_count == other.vertex_count
                and np.array_equal(self.edges, other.edges)
                and np.array_equal(self.signs, other.signs))

    __hash__ = None

    def __repr__(self):
        return f"SignedGraph(N={self.vertex_count}, n={self.n}, m={self.m})"


def from_edge_list(vertex_count: int, pairs: Iterable, lines: Optional[list] = None) -> SignedGraph:
    """Validate and canonicalize ``(u, v, sign)`` triples into a SignedGraph.

    ``lines`` optionally maps each entry to a source line number for error
    messages; by default entries are numbered from 1.
    """
    pairs = list(pairs)
    if vertex_count < 0:
        raise GraphValidationError("vertex count must be nonnegative")
    seen = {}
    for pos, item in enumerate(pairs):
        line = lines[pos] if lines is not None else pos + 1
        try:
            u, v, s = item
        except (TypeError, ValueError):
            raise GraphValidationError(f"expected (u, v, sign), got {item!r}", line) from None
        s = _parse_sign(s, line)
        try:
            u, v = int(u), int(v)
        except (TypeError, ValueError):
            raise GraphValidationError(f"non-integer vertex in {item!r}", line) from None
        if u == v:
            raise GraphValidationError(f"self-loop at vertex {u}", line)
        if min(u, v) < 0 or max(u, v) >= vertex_count:
            raise GraphValidationError(
                f"vertex out of range in edge ({u}, {v}) for N={vertex_count}", line)
        key = (u, v) if u < v else (v, u)
        if key in seen:
            raise GraphValidationError(f"duplicate edge {key} (first on line {seen[key][0]})", line)
        seen[key] = (line, s)
    keys = sorted(seen)
    edges = np.array(keys, dtype=np.int64).reshape(-1, 2)
    signs = np.array([seen[k][1] for k in keys], dtype=np.int8)
    return SignedGraph(vertex_count, edges, signs)


def _parse_sign(s, line):
    if isinstance(s, str):
        tok = s.strip()
        if tok in _SIGN_TOKENS:
            return _SIGN_TOKENS[tok]
        raise GraphValidationError(f"invalid sign token {s!r}", line)
    if isinstance(s, (bool, np.bool_)) or s not in (1, -1):
        raise GraphValidationError(f"invalid sign {s!r}", line)
    return int(s)


def unsigned(vertex_count: int, pairs) -> SignedGraph:
    """All-positive graph from plain ``(u, v)`` pairs."""
    return from_edge_list(vertex_count, [(u, v, 1) for u, v in pairs])


# -- edge-list text format -------------------------------------------------

def parse_edge_list(text: str) -> SignedGraph:
    """Parse ``u v s`` lines; ``#`` comments; optional ``N <count>`` header."""
    header_n = None
    entries, lines = [], []
    max_idx = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.split()
        if tok[0] == "N":
            if len(tok) != 2 or header_n is not None:
                raise GraphValidationError("malformed or repeated 'N <count>' header", lineno)
            try:
                header_n = int(tok[1])
            except ValueError:
                raise GraphValidationError(f"bad vertex count {tok[1]!r}", lineno) from None
            continue
        if len(tok) != 3:
            raise GraphValidationError(f"expected 'u v s', got {line!r}", lineno)
        try:
            u, v = int(tok[0]), int(tok[1])
        except ValueError:
            raise GraphValidationError(f"non-integer vertex in {line!r}", lineno) from None
        sign = _parse_sign(tok[2], lineno)
        entries.append((u, v, sign))
        lines.append(lineno)
        max_idx = max(max_idx, u, v)
    n_vertices = header_n if header_n is not None else max_idx + 1
    return from_edge_list(n_vertices, entries, lines)


def read_edge_list(path) -> SignedGraph:
    with open(path) as fh:
        return parse_edge_list(fh.read())


def format_edge_list(g: SignedGraph) -> str:
    out = [f"N {g.vertex_count}"]
    out += [f"{u} {v} {'+1' if s > 0 else '-1'}" for (u, v), s in zip(g.edges.tolist(), g.signs.tolist())]
    return "\n".join(out) + "\n"


def write_edge_list(g: SignedGraph, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_edge_list(g))


# -- triangles and embeddedness ---------------------------------------------

def _oriented_csr(g: SignedGraph):
    """Adjacency with each edge pointing from lower to higher (degree, index)
    rank, in CSR form over ranks: ``(indptr, neighbour ranks, edge ids)``."""
    u, v = g.edges[:, 0], g.edges[:, 1]
    deg = np.bincount(np.concatenate([u, v]), minlength=g.vertex_count)
    order = np.lexsort((np.arange(g.vertex_count), deg))
    rank = np.empty(g.vertex_count, dtype=np.int64)
    rank[order] = np.arange(g.vertex_count)
    ru, rv = rank[u], rank[v]
    src = np.minimum(ru, rv)
    dst = np.maximum(ru, rv)
    eid = np.arange(g.n, dtype=np.int64)
    srt = np.lexsort((dst, src))
    src, dst, eid = src[srt], dst[srt], eid[srt]
    indptr = np.zeros(g.vertex_count + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=g.vertex_count), out=indptr[1:])
    return indptr, np.ascontiguousarray(dst), np.ascontiguousarray(eid)


def _enumerate_triangles(g: SignedGraph) -> np.ndarray:
    if g.n < 3:
        return np.zeros((0, 3), dtype=np.int64)
    tri = kernels.triangles(*_oriented_csr(g))
    if len(tri) == 0:
        return np.zeros((0, 3), dtype=np.int64)
    tri = np.sort(tri, axis=1)
    return tri[np.lexsort((tri[:, 2], tri[:, 1], tri[:, 0]))]


def triangles(g: SignedGraph) -> np.ndarray:
    """Edge-index triples ``(i, j, k)``, ``i < j < k``, sorted lexicographically."""
    return g.triangles


def _abs_adjacency(g: SignedGraph, signed=False):
    data = g.signs.astype(np.int64) if signed else np.ones(g.n, dtype=np.int64)
    a = sp.coo_matrix((data, (g.edges[:, 0], g.edges[:, 1])), shape=(g.vertex_count,) * 2)
    return (a + a.T).tocsr()


def embeddedness_matrix(g: SignedGraph) -> np.ndarray:
    """Per-edge embeddedness read off ``|A| o |A|^2`` (independent of enumeration)."""
    a = _abs_adjacency(g)
    common = (a @ a).multiply(a).tocsr()
    if g.n == 0:
        return np.zeros(0, dtype=np.int64)
    return np.asarray(common[g.edges[:, 0], g.edges[:, 1]]).ravel().astype(np.int64)


def unbalanced_trace(g: SignedGraph) -> int:
    """Unbalanced triangle count from ``tr(|A|^3 - A^3) / 12``."""
    a_abs = _abs_adjacency(g)
    a = _abs_adjacency(g, signed=True)
    # tr(B^3) = sum((B @ B) o B) for symmetric B
    tr_abs = int((a_abs @ a_abs).multiply(a_abs).sum())
    tr_sgn = int((a @ a).multiply(a).sum())
    diff = tr_abs - tr_sgn
    assert diff % 12 == 0
    return diff // 12


@dataclass(frozen=True, eq=False)
class EmbeddednessIndex:
    """Per-edge embeddedness and the strata it induces.

    ``strata[l]`` lists the edge indices with embeddedness ``l``; only
    occupied levels appear. ``p[l] = m[l] / n[l]``.
    """

    eps: np.ndarray
    strata: dict
    n_l: dict
    m_l: dict
    p: dict
    L: int
    L_minus: int

    @classmethod
    def from_graph(cls, g: SignedGraph) -> "EmbeddednessIndex":
        eps = np.bincount(g.triangles.ravel(), minlength=g.n).astype(np.int64)
        return cls.from_eps(eps, g.negative)

    @classmethod
    def from_eps(cls, eps, negative) -> "EmbeddednessIndex":
        eps = _frozen(eps, np.int64)
        negative = np.asarray(negative, dtype=bool)
        strata, n_l, m_l, p = {}, {}, {}, {}
        for level in np.unique(eps).tolist():
            members = _frozen(np.flatnonzero(eps == level), np.int64)
            strata[level] = members
            n_l[level] = len(members)
            m_l[level] = int(np.count_nonzero(negative[members]))
            p[level] = m_l[level] / n_l[level]
        neg_levels = [lv for lv, c in m_l.items() if c > 0]
        return cls(eps, strata, n_l, m_l, p,
                   L=max(strata) if strata else 0,
                   L_minus=max(neg_levels) if neg_levels else 0)

    @property
    def levels(self) -> list:
        return sorted(self.strata)


def embeddedness(g: SignedGraph) -> EmbeddednessIndex:
    return g.embeddedness


@dataclass(frozen=True)
class TriadCensus:
    t0: int
    t1: int
    t2: int
    t3: int

    @property
    def u(self) -> int:
        return self.t1 + self.t3

    @property
    def total(self) -> int:
        return self.t0 + self.t1 + self.t2 + self.t3


def census(g: SignedGraph) -> TriadCensus:
    counts = kernels.census_batch(g.negative[None, :], g.triangles)[0]
    return TriadCensus(*(int(c) for c in counts))


def unbalanced_count(g: SignedGraph) -> int:
    return census(g).u


def sign_subgraph(g: SignedGraph, sign: int) -> SignedGraph:
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    keep = g.signs == sign
    return SignedGraph(g.vertex_count, g.edges[keep], g.signs[keep])


# -- descriptive summaries --------------------------------------------------

@dataclass(frozen=True)
class SummaryStats:
    edge_count: int
    density: float
    transitivity: float
    mean_path_length: Optional[float]
    component_count: int

    def to_dict(self) -> dict:
        return {
            "edge_count": self.edge_count,
            "density": self.density,
            "transitivity": self.transitivity,
            "mean_path_length": self.mean_path_length,
            "component_count": self.component_count,
        }


def summary(g: SignedGraph) -> SummaryStats:
    """Density, global transitivity, mean path length, and the number of
    components with at least two vertices, on the unsigned skeleton."""
    N, n = g.vertex_count, g.n
    possible = N * (N - 1) // 2
    density = n / possible if possible else 0.0
    deg = np.bincount(g.edges.ravel(), minlength=N) if N else np.zeros(0, dtype=np.int64)
    triples = int(np.sum(deg * (deg - 1) // 2))
    transitivity = 3 * len(g.triangles) / triples if triples else 0.0

    mean_path = None
    components = 0
    if N and n:
        a = _abs_adjacency(g)
        n_comp, labels = csgraph.connected_components(a, directed=False)
        sizes = np.bincount(labels)
        components = int(np.count_nonzero(sizes >= 2))
        total, pairs = 0.0, 0
        sources = np.flatnonzero(deg > 0)
        for start in range(0, len(sources), 256):
            dist = csgraph.shortest_path(a, directed=False, unweighted=True,
                                         indices=sources[start:start + 256])
            finite = dist[np.isfinite(dist) & (dist > 0)]
            total += float(finite.sum())
            pairs += finite.size
        if pairs:
            mean_path = total / pairs
    return SummaryStats(n, density, transitivity, mean_path, components)


# -- diagnostics -------------------------------------------------------------

@dataclass(frozen=True)
class Diagnostics:
    """``embeddedness_gap`` is ``(1-p)^2 * mean(eps) - mean(eps over negatives)``
    with ``p = m/n``; large positive values mean the uniform null is expected
    to overstate the unbalanced count. ``None`` when there are no negatives."""

    n: int
    m: int
    triangle_count: int
    L: int
    L_minus: int
    max_eps_sq_over_n: float
    embeddedness_gap: Optional[float]

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def diagnostics(g: SignedGraph) -> Diagnostics:
    idx = g.embeddedness
    n, m = g.n, g.m
    eps = idx.eps
    max_ratio = float(eps.max() ** 2 / n) if n else 0.0
    gap = None
    if m > 0:
        p = m / n
        gap = (1 - p) ** 2 * eps.sum() / n - eps[g.signs < 0].sum() / m
        gap = float(gap)
    return Diagnostics(n, m, len(g.triangles), idx.L, idx.L_minus, max_ratio, gap)
