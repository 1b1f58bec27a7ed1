"""Pure numpy implementations of the hot kernels.

Every function here has a twin in ``_kernels.pyx`` with the same signature
and bit-identical output; ``kernels.py`` picks one at import time.
"""

import numpy as np

# Rows of the (B, T, 3) gather processed at once; bounds peak memory.
_CHUNK_CELLS = 1 << 24


def triangles(indptr, indices, eids):
    """Enumerate triangles of a rank-oriented adjacency structure.

    ``indptr``/``indices`` describe, for every vertex, its out-neighbours in
    a degree ordering (each undirected edge stored once, from lower to
    higher rank), sorted ascending. ``eids`` carries the edge index of every
    stored arc. Returns an ``(T, 3)`` int64 array of edge indices, one row
    per triangle, in discovery order.
    """
    n_vertices = len(indptr) - 1
    out = []
    for u in range(n_vertices):
        lo, hi = indptr[u], indptr[u + 1]
        nbrs = {int(indices[a]): int(eids[a]) for a in range(lo, hi)}
        for a in range(lo, hi):
            v = int(indices[a])
            e_uv = int(eids[a])
            for b in range(indptr[v], indptr[v + 1]):
                w = int(indices[b])
                e_uw = nbrs.get(w)
                if e_uw is not None:
                    out.append((e_uv, e_uw, int(eids[b])))
    if not out:
        return np.zeros((0, 3), dtype=np.int64)
    return np.asarray(out, dtype=np.int64)


def census_batch(neg, tri):
    """Triad census for every row of a ``(B, n)`` negative-indicator matrix.

    Returns ``(B, 4)`` int64 counts of triangles with 0..3 negative edges.
    """
    neg = np.asarray(neg, dtype=np.uint8)
    b_total = neg.shape[0]
    out = np.zeros((b_total, 4), dtype=np.int64)
    n_tri = len(tri)
    if n_tri == 0 or b_total == 0:
        return out
    chunk = max(1, _CHUNK_CELLS // (3 * n_tri))
    for start in range(0, b_total, chunk):
        block = neg[start:start + chunk]
        k = (block[:, tri[:, 0]] + block[:, tri[:, 1]] + block[:, tri[:, 2]])
        for level in range(4):
            out[start:start + chunk, level] = np.count_nonzero(k == level, axis=1)
    return out


def permute_segments(values, slots, bounds, u):
    """In-place Fisher-Yates shuffle of ``values`` within each segment.

    ``slots[bounds[s]:bounds[s+1]]`` lists the columns of segment ``s``.
    ``u`` holds one uniform draw per slot per row; position ``i`` of a
    segment swaps with ``floor(u * (i + 1))``. Slot 0 of a segment consumes
    its draw without using it.
    """
    b_total = values.shape[0]
    rows = np.arange(b_total)
    for s in range(len(bounds) - 1):
        start, stop = int(bounds[s]), int(bounds[s + 1])
        cols = slots[start:stop]
        seg = values[:, cols]
        for i in range(stop - start - 1, 0, -1):
            j = (u[:, start + i] * (i + 1)).astype(np.int64)
            np.minimum(j, i, out=j)
            a = seg[:, i].copy()
            seg[:, i] = seg[rows, j]
            seg[rows, j] = a
        values[:, cols] = seg
    return values
