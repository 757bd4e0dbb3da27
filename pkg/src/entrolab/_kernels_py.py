"""Pure-Python (numpy) implementation of the separated-set greedy kernel.

Same semantics as the compiled extension in ``_kernels.pyx``: candidates are
scanned in canonical grid order; a candidate joins the separated set unless
some already-selected point stays within eps at every orbit step.  Selected
points are bucketed by two 1-Lipschitz landmark coordinates (distance to a
landmark vertex at two orbit steps), so only nearby selected points are
checked.
"""

from __future__ import annotations

import math

import numpy as np

IMPL = "python"


def _dist_vec(e1, o1, idx_e, idx_o, edge_u, edge_v, edge_len, vdist):
    u1, v1 = edge_u[e1], edge_v[e1]
    L1 = edge_len[e1]
    u2 = edge_u[idx_e]
    v2 = edge_v[idx_e]
    L2 = edge_len[idx_e]
    d = np.minimum(
        np.minimum(o1 + vdist[u1, u2] + idx_o,
                   o1 + vdist[u1, v2] + (L2 - idx_o)),
        np.minimum((L1 - o1) + vdist[v1, u2] + idx_o,
                   (L1 - o1) + vdist[v1, v2] + (L2 - idx_o)))
    same = idx_e == e1
    if same.any():
        d = np.minimum(d, np.where(same, np.abs(idx_o - o1), np.inf))
    return d


def greedy_separated(orb_e, orb_o, eps, edge_u, edge_v, edge_len, vdist,
                     key0, key1):
    """Indices of the greedy maximal (n, eps)-separated subset."""
    N, n = orb_e.shape
    b0 = np.floor(key0 / eps).astype(np.int64)
    b1 = np.floor(key1 / eps).astype(np.int64)
    buckets: dict[tuple[int, int], list[int]] = {}
    selected: list[int] = []
    for i in range(N):
        cands: list[int] = []
        for d0 in (-1, 0, 1):
            for d1 in (-1, 0, 1):
                lst = buckets.get((b0[i] + d0, b1[i] + d1))
                if lst:
                    cands.extend(lst)
        rejected = False
        if cands:
            W = np.asarray(cands, dtype=np.int64)
            alive = np.ones(len(W), dtype=bool)
            for k in range(n):
                idx = W[alive]
                if len(idx) == 0:
                    break
                d = _dist_vec(orb_e[i, k], orb_o[i, k],
                              orb_e[idx, k], orb_o[idx, k],
                              edge_u, edge_v, edge_len, vdist)
                alive[alive] = d <= eps
            rejected = bool(alive.any())
        if not rejected:
            selected.append(i)
            buckets.setdefault((int(b0[i]), int(b1[i])), []).append(i)
    return np.asarray(selected, dtype=np.int64)


def cover_radius(orb_e, orb_o, selected, eps, edge_u, edge_v, edge_len, vdist):
    """Max over grid points of the d_n distance to the selected set
    (infinity if the selected set is empty)."""
    N, n = orb_e.shape
    if len(selected) == 0:
        return math.inf
    worst = 0.0
    for i in range(N):
        dn = np.zeros(len(selected))
        for k in range(n):
            d = _dist_vec(orb_e[i, k], orb_o[i, k],
                          orb_e[selected, k], orb_o[selected, k],
                          edge_u, edge_v, edge_len, vdist)
            np.maximum(dn, d, out=dn)
        best = dn.min()
        if best > worst:
            worst = float(best)
    return worst
