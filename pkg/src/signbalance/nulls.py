"""Null models for edge signs on a fixed support.

Permutation nulls shuffle the existing signs within segments of edges:
one segment for the uniform null, one per embeddedness level for the
stratified null, one per bin for the binned variant. The Rademacher null
draws every sign independently with a per-level probability.

All samplers consume exactly ``n`` uniforms per draw from the supplied
generator, so a draw is a pure function of ``(graph, substream)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from . import kernels
from .graph import EmbeddednessIndex, SignedGraph


@dataclass(frozen=True)
class SeedSpec:
    """Master seed; replicate ``k`` draws from the substream keyed by ``(seed, k)``."""

    master_seed: int

    def rng(self, k: int) -> np.random.Generator:
        return substream(self.master_seed, k)

    def child(self, *key: int) -> "SeedSpec":
        """Independent master seed for a nested experiment, keyed by ``key``."""
        ss = np.random.SeedSequence(self.master_seed, spawn_key=tuple(key))
        return SeedSpec(int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1)))


def substream(master_seed: int, k: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(master_seed, spawn_key=(k,))))


def as_seed(seed) -> SeedSpec:
    if isinstance(seed, SeedSpec):
        return seed
    if seed is None:
        return SeedSpec(int(np.random.SeedSequence().entropy) % (1 << 63))
    return SeedSpec(int(seed))


class PermutationNull:
    """Shuffle signs within fixed segments of the edge set."""

    method = "permutation"

    def segments(self, g: SignedGraph) -> list:
        raise NotImplementedError

    def _layout(self, g):
        segs = [np.asarray(s, dtype=np.int64) for s in self.segments(g) if len(s)]
        slots = np.concatenate(segs) if segs else np.zeros(0, dtype=np.int64)
        bounds = np.zeros(len(segs) + 1, dtype=np.int64)
        np.cumsum([len(s) for s in segs], out=bounds[1:])
        return np.ascontiguousarray(slots), bounds

    def draw_batch(self, g: SignedGraph, rngs: Sequence[np.random.Generator]) -> np.ndarray:
        """Negative indicators, one row per generator."""
        slots, bounds = self._layout(g)
        u = np.empty((len(rngs), len(slots)), dtype=np.float64)
        for r, rng in enumerate(rngs):
            u[r] = rng.random(len(slots))
        values = np.repeat(g.negative[None, :], len(rngs), axis=0)
        kernels.permute_segments(values, slots, bounds, u)
        return values

    def __call__(self, g: SignedGraph, rng: np.random.Generator) -> SignedGraph:
        return g.with_negative(self.draw_batch(g, [rng])[0])


class UniformPermutation(PermutationNull):
    method = "old"

    def segments(self, g):
        return [np.arange(g.n)]


class StratifiedPermutation(PermutationNull):
    """One segment per occupied embeddedness level, level 0 included."""

    method = "new"

    def __init__(self, index: Optional[EmbeddednessIndex] = None):
        self.index = index

    def segments(self, g):
        idx = self.index if self.index is not None else g.embeddedness
        return [idx.strata[lv] for lv in idx.levels]


class BinnedPermutation(PermutationNull):
    """Segments are unions of embeddedness levels, one per bin."""

    method = "binned"

    def __init__(self, bins: Sequence[Sequence[int]], index: Optional[EmbeddednessIndex] = None):
        self.bins = [sorted(set(int(lv) for lv in b)) for b in bins]
        self.index = index

    def segments(self, g):
        idx = self.index if self.index is not None else g.embeddedness
        check_bins(self.bins, idx.levels)
        out = []
        for b in self.bins:
            members = [idx.strata[lv] for lv in b if lv in idx.strata]
            if members:
                out.append(np.sort(np.concatenate(members)))
        return out


def check_bins(bins, occupied) -> None:
    seen = {}
    for pos, b in enumerate(bins):
        for lv in b:
            if lv in seen:
                raise ValueError(f"level {lv} appears in bins {seen[lv]} and {pos}")
            seen[lv] = pos
    missing = sorted(set(occupied) - set(seen))
    if missing:
        raise ValueError(f"bins do not cover occupied levels {missing}")


def parse_bins(text: str, max_level: int) -> list:
    """Parse ``"0-1,2+"`` / ``"0,1,2-4,5+"`` into explicit level lists."""
    bins = []
    for part in text.split(","):
        part = part.strip()
        if part.endswith("+"):
            lo = int(part[:-1])
            bins.append(list(range(lo, max(lo, max_level) + 1)))
        elif "-" in part:
            lo, hi = (int(x) for x in part.split("-"))
            bins.append(list(range(lo, hi + 1)))
        else:
            bins.append([int(part)])
    return bins


@dataclass(frozen=True)
class RademacherSpec:
    """Per-level probability that an edge is negative."""

    q: Mapping[int, float]

    def __post_init__(self):
        for lv, val in self.q.items():
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"probability for level {lv} outside [0, 1]: {val}")

    @classmethod
    def plug_in(cls, index: EmbeddednessIndex) -> "RademacherSpec":
        return cls(dict(index.p))

    @classmethod
    def uniform(cls, index: EmbeddednessIndex, q: Optional[float] = None) -> "RademacherSpec":
        if q is None:
            n = sum(index.n_l.values())
            q = sum(index.m_l.values()) / n if n else 0.0
        return cls({lv: q for lv in index.levels})

    def per_edge(self, index: EmbeddednessIndex) -> np.ndarray:
        missing = [lv for lv in index.levels if lv not in self.q]
        if missing:
            raise ValueError(f"no probability for embeddedness levels {missing}")
        q = np.empty(len(index.eps), dtype=np.float64)
        for lv in index.levels:
            q[index.strata[lv]] = self.q[lv]
        return q


class RademacherNull:
    """Independent signs: edge ``i`` negative with probability ``q[eps_i]``."""

    method = "rademacher"

    def __init__(self, spec: Optional[RademacherSpec] = None):
        self.spec = spec

    def draw_batch(self, g, rngs):
        idx = g.embeddedness
        spec = self.spec if self.spec is not None else RademacherSpec.plug_in(idx)
        q = spec.per_edge(idx)
        out = np.empty((len(rngs), g.n), dtype=np.uint8)
        for r, rng in enumerate(rngs):
            out[r] = rng.random(g.n) < q
        return out

    def __call__(self, g, rng):
        return g.with_negative(self.draw_batch(g, [rng])[0])


def shuffle_uniform(g: SignedGraph, rng) -> SignedGraph:
    return UniformPermutation()(g, rng)


def shuffle_stratified(g: SignedGraph, idx: Optional[EmbeddednessIndex] = None, rng=None) -> SignedGraph:
    return StratifiedPermutation(idx)(g, _rng(rng))


def shuffle_binned(g: SignedGraph, idx: Optional[EmbeddednessIndex], bins, rng=None) -> SignedGraph:
    return BinnedPermutation(bins, idx)(g, _rng(rng))


def sample_rademacher(g: SignedGraph, spec: Optional[RademacherSpec] = None, rng=None) -> SignedGraph:
    return RademacherNull(spec)(g, _rng(rng))


def _rng(rng):
    if rng is None:
        raise TypeError("a numpy Generator is required")
    return rng
