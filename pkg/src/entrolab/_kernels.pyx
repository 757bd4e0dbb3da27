# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled separated-set greedy kernel (hot inner loop of the Bowen
estimator).  Semantics identical to ``_kernels_py.greedy_separated``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport floor, fabs, INFINITY

IMPL = "cython"


cdef inline double _dist(int e1, double o1, int e2, double o2,
                         int[:] edge_u, int[:] edge_v, double[:] edge_len,
                         double[:, :] vdist) nogil:
    cdef int u1 = edge_u[e1], v1 = edge_v[e1]
    cdef int u2 = edge_u[e2], v2 = edge_v[e2]
    cdef double L1 = edge_len[e1], L2 = edge_len[e2]
    cdef double d, c
    d = o1 + vdist[u1, u2] + o2
    c = o1 + vdist[u1, v2] + (L2 - o2)
    if c < d: d = c
    c = (L1 - o1) + vdist[v1, u2] + o2
    if c < d: d = c
    c = (L1 - o1) + vdist[v1, v2] + (L2 - o2)
    if c < d: d = c
    if e1 == e2:
        c = fabs(o1 - o2)
        if c < d: d = c
    return d


def greedy_separated(cnp.ndarray[cnp.int32_t, ndim=2] orb_e,
                     cnp.ndarray[cnp.float64_t, ndim=2] orb_o,
                     double eps,
                     cnp.ndarray[cnp.int32_t, ndim=1] edge_u_a,
                     cnp.ndarray[cnp.int32_t, ndim=1] edge_v_a,
                     cnp.ndarray[cnp.float64_t, ndim=1] edge_len_a,
                     cnp.ndarray[cnp.float64_t, ndim=2] vdist_a,
                     cnp.ndarray[cnp.float64_t, ndim=1] key0,
                     cnp.ndarray[cnp.float64_t, ndim=1] key1):
    cdef int[:, :] oe = orb_e
    cdef double[:, :] oo = orb_o
    cdef int[:] edge_u = edge_u_a
    cdef int[:] edge_v = edge_v_a
    cdef double[:] edge_len = edge_len_a
    cdef double[:, :] vdist = vdist_a
    cdef Py_ssize_t N = orb_e.shape[0]
    cdef Py_ssize_t n = orb_e.shape[1]
    cdef Py_ssize_t i, k, w
    cdef int d0, d1
    cdef long b0, b1
    cdef bint rejected, near
    cdef double d
    cdef dict buckets = {}
    cdef list selected = []
    cdef list lst
    cdef object key
    cdef long[:] sel_view

    cdef cnp.ndarray[cnp.int64_t, ndim=1] kb0 = np.floor(key0 / eps).astype(np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] kb1 = np.floor(key1 / eps).astype(np.int64)
    cdef long[:] B0 = kb0
    cdef long[:] B1 = kb1

    for i in range(N):
        b0 = B0[i]
        b1 = B1[i]
        rejected = False
        for d0 in range(-1, 2):
            if rejected:
                break
            for d1 in range(-1, 2):
                if rejected:
                    break
                key = (b0 + d0, b1 + d1)
                lst = <list> buckets.get(key)
                if lst is None:
                    continue
                for w in range(len(lst)):
                    s = <Py_ssize_t> <long> lst[w]
                    near = True
                    for k in range(n):
                        d = _dist(oe[i, k], oo[i, k], oe[s, k], oo[s, k],
                                  edge_u, edge_v, edge_len, vdist)
                        if d > eps:
                            near = False
                            break
                    if near:
                        rejected = True
                        break
        if not rejected:
            selected.append(i)
            key = (b0, b1)
            lst = <list> buckets.get(key)
            if lst is None:
                buckets[key] = [i]
            else:
                lst.append(i)
    return np.asarray(selected, dtype=np.int64)


def cover_radius(cnp.ndarray[cnp.int32_t, ndim=2] orb_e,
                 cnp.ndarray[cnp.float64_t, ndim=2] orb_o,
                 cnp.ndarray[cnp.int64_t, ndim=1] selected,
                 double eps,
                 cnp.ndarray[cnp.int32_t, ndim=1] edge_u_a,
                 cnp.ndarray[cnp.int32_t, ndim=1] edge_v_a,
                 cnp.ndarray[cnp.float64_t, ndim=1] edge_len_a,
                 cnp.ndarray[cnp.float64_t, ndim=2] vdist_a):
    cdef int[:, :] oe = orb_e
    cdef double[:, :] oo = orb_o
    cdef long[:] sel = selected
    cdef int[:] edge_u = edge_u_a
    cdef int[:] edge_v = edge_v_a
    cdef double[:] edge_len = edge_len_a
    cdef double[:, :] vdist = vdist_a
    cdef Py_ssize_t N = orb_e.shape[0]
    cdef Py_ssize_t n = orb_e.shape[1]
    cdef Py_ssize_t S = selected.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double worst = 0.0, best, dn, d
    if S == 0:
        return INFINITY
    for i in range(N):
        best = INFINITY
        for j in range(S):
            dn = 0.0
            for k in range(n):
                d = _dist(oe[i, k], oo[i, k], oe[sel[j], k], oo[sel[j], k],
                          edge_u, edge_v, edge_len, vdist)
                if d > dn:
                    dn = d
                if dn >= best:
                    break
            if dn < best:
                best = dn
        if best > worst:
            worst = best
    return worst
