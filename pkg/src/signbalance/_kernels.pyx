# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: triangle enumeration, batched triad census and the
segment-wise Fisher-Yates shuffle. Mirrors ``_fallback.py`` exactly."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t i64
ctypedef cnp.uint8_t u8


def triangles(const i64[::1] indptr, const i64[::1] indices, const i64[::1] eids):
    cdef Py_ssize_t n_vertices = indptr.shape[0] - 1
    cdef Py_ssize_t u, a, b, lo, hi, vlo, vhi, p, q
    cdef i64 count = 0
    cdef i64 v, w, x
    # pass 1 counts, pass 2 fills; both are sorted-list merges
    for u in range(n_vertices):
        lo = indptr[u]
        hi = indptr[u + 1]
        for a in range(lo, hi):
            v = indices[a]
            p = a + 1
            q = indptr[v]
            vhi = indptr[v + 1]
            while p < hi and q < vhi:
                w = indices[p]
                x = indices[q]
                if w == x:
                    count += 1
                    p += 1
                    q += 1
                elif w < x:
                    p += 1
                else:
                    q += 1
    out_arr = np.empty((count, 3), dtype=np.int64)
    cdef i64[:, ::1] out = out_arr
    cdef i64 t = 0
    for u in range(n_vertices):
        lo = indptr[u]
        hi = indptr[u + 1]
        for a in range(lo, hi):
            v = indices[a]
            p = a + 1
            q = indptr[v]
            vhi = indptr[v + 1]
            while p < hi and q < vhi:
                w = indices[p]
                x = indices[q]
                if w == x:
                    out[t, 0] = eids[a]
                    out[t, 1] = eids[p]
                    out[t, 2] = eids[q]
                    t += 1
                    p += 1
                    q += 1
                elif w < x:
                    p += 1
                else:
                    q += 1
    return out_arr


def census_batch(neg, const i64[:, ::1] tri):
    cdef const u8[:, ::1] nv = np.ascontiguousarray(neg, dtype=np.uint8)
    cdef Py_ssize_t b_total = nv.shape[0]
    cdef Py_ssize_t n_tri = tri.shape[0]
    out_arr = np.zeros((b_total, 4), dtype=np.int64)
    cdef i64[:, ::1] out = out_arr
    cdef Py_ssize_t r, t
    cdef int k
    with nogil:
        for r in range(b_total):
            for t in range(n_tri):
                k = nv[r, tri[t, 0]] + nv[r, tri[t, 1]] + nv[r, tri[t, 2]]
                out[r, k] += 1
    return out_arr


def permute_segments(values, const i64[::1] slots, const i64[::1] bounds, const double[:, ::1] u):
    cdef u8[:, ::1] vals = values
    cdef Py_ssize_t b_total = vals.shape[0]
    cdef Py_ssize_t n_seg = bounds.shape[0] - 1
    cdef Py_ssize_t r, s, start, stop, i
    cdef i64 j, ci, cj
    cdef u8 tmp
    with nogil:
        for r in range(b_total):
            for s in range(n_seg):
                start = bounds[s]
                stop = bounds[s + 1]
                for i in range(stop - start - 1, 0, -1):
                    j = <i64>(u[r, start + i] * (i + 1))
                    if j > i:
                        j = i
                    ci = slots[start + i]
                    cj = slots[start + j]
                    tmp = vals[r, ci]
                    vals[r, ci] = vals[r, cj]
                    vals[r, cj] = tmp
    return values
