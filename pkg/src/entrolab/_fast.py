"""Float mirror of a map and its graph for the separated-set estimator.

Orbit tables and distances are computed in float64 over vectorized numpy
arrays; grids are built exactly (Fractions) and converted once.  Exact
rational evaluation stays in :mod:`entrolab.markov`; this module only serves
the numerical entropy estimator, where counts are compared against wide
tolerance bands.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


class FloatSystem:
    """Preconverted arrays: graph geometry, piece charts, image paths."""

    def __init__(self, f):
        self.f = f
        g = f.graph
        self.vidx = {v: i for i, v in enumerate(g.vertices)}
        E = len(g.edges)
        self.edge_u = np.array([self.vidx[e.u] for e in g.edges], dtype=np.int32)
        self.edge_v = np.array([self.vidx[e.v] for e in g.edges], dtype=np.int32)
        self.edge_len = np.array([float(e.length) for e in g.edges], dtype=np.float64)
        vd = g.vertex_distances()
        V = len(g.vertices)
        self.vdist = np.zeros((V, V), dtype=np.float64)
        for a in g.vertices:
            for b in g.vertices:
                self.vdist[self.vidx[a], self.vidx[b]] = float(vd[a][b])

        # piece-locating cells: per edge, sorted cell starts with the piece
        # index, the chart parameter at the cell start, and the direction
        self.cells: list[tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]] = []
        for e in g.edges:
            rows = []
            for pi, piece in enumerate(f.splitting.pieces):
                dom = f.domain_chart(pi)
                for k, seg in enumerate(dom.segments):
                    if seg.edge != e.id:
                        continue
                    t_at_a = dom.cum[k]
                    if seg.b >= seg.a:
                        rows.append((float(seg.lo()), float(seg.hi()), pi,
                                     float(t_at_a), 1.0))
                    else:
                        rows.append((float(seg.lo()), float(seg.hi()), pi,
                                     float(t_at_a + seg.length()), -1.0))
            rows.sort()
            los = np.array([r[0] for r in rows], dtype=np.float64)
            pidx = np.array([r[2] for r in rows], dtype=np.int64)
            t0 = np.array([r[3] for r in rows], dtype=np.float64)
            drc = np.array([r[4] for r in rows], dtype=np.float64)
            self.cells.append((los, pidx, t0, drc))

        # image path charts per piece
        self.speed = np.array([float(f.speed(i)) for i in range(f.n_pieces())])
        self.paths = []
        for i in range(f.n_pieces()):
            img = f.image_path(i)
            cum = np.array([float(c) for c in img.cum], dtype=np.float64)
            seg_e = np.array([g.edge_index(s.edge) for s in img.segments], dtype=np.int64)
            seg_a = np.array([float(s.a) for s in img.segments], dtype=np.float64)
            seg_d = np.array([1.0 if s.b >= s.a else -1.0 for s in img.segments])
            self.paths.append((cum, seg_e, seg_a, seg_d))

    # -- vectorized dynamics -------------------------------------------------

    def locate_params(self, pe: np.ndarray, po: np.ndarray):
        """Piece index and chart parameter for each (edge, offset) point."""
        n = len(pe)
        piece = np.empty(n, dtype=np.int64)
        t = np.empty(n, dtype=np.float64)
        for ei in range(len(self.edge_len)):
            mask = pe == ei
            if not mask.any():
                continue
            los, pidx, t0, drc = self.cells[ei]
            off = po[mask]
            j = np.clip(np.searchsorted(los, off, side="right") - 1, 0, len(los) - 1)
            piece[mask] = pidx[j]
            t[mask] = t0[j] + drc[j] * (off - los[j])
        return piece, t

    def step(self, pe: np.ndarray, po: np.ndarray):
        """One map application on an array of points."""
        piece, t = self.locate_params(pe, po)
        ne = np.empty_like(pe)
        no = np.empty_like(po)
        for i in range(self.f.n_pieces()):
            mask = piece == i
            if not mask.any():
                continue
            cum, seg_e, seg_a, seg_d = self.paths[i]
            s = t[mask] * self.speed[i]
            j = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(seg_e) - 1)
            ne[mask] = seg_e[j]
            no[mask] = seg_a[j] + seg_d[j] * (s - cum[j])
        np.clip(no, 0.0, self.edge_len[ne], out=no)
        return ne, no

    def orbit_table(self, pe: np.ndarray, po: np.ndarray, n: int):
        """(N, n) tables of edge indices and offsets for the first n iterates."""
        N = len(pe)
        oe = np.empty((N, n), dtype=np.int32)
        oo = np.empty((N, n), dtype=np.float64)
        oe[:, 0], oo[:, 0] = pe, po
        for k in range(1, n):
            pe, po = self.step(pe, po)
            oe[:, k], oo[:, k] = pe, po
        return oe, oo

    def landmark_coords(self, pe: np.ndarray, po: np.ndarray, w: int):
        """Distance from each point to landmark vertex w (1-Lipschitz chart)."""
        du = po + self.vdist[self.edge_u[pe], w]
        dv = self.edge_len[pe] - po + self.vdist[self.edge_v[pe], w]
        return np.minimum(du, dv)

    def dist_vec(self, e1: int, o1: float, e2: np.ndarray, o2: np.ndarray):
        """Distances from one point to an array of points."""
        u1, v1 = self.edge_u[e1], self.edge_v[e1]
        L1 = self.edge_len[e1]
        u2, v2 = self.edge_u[e2], self.edge_v[e2]
        L2 = self.edge_len[e2]
        d = np.minimum(
            np.minimum(o1 + self.vdist[u1, u2] + o2,
                       o1 + self.vdist[u1, v2] + (L2 - o2)),
            np.minimum((L1 - o1) + self.vdist[v1, u2] + o2,
                       (L1 - o1) + self.vdist[v1, v2] + (L2 - o2)))
        same = e2 == e1
        if same.any():
            np.minimum(d, np.where(same, np.abs(o2 - o1), np.inf), out=d)
        return d


def exact_grid(g, spacing: Fraction) -> list:
    """Deterministic arclength grid: per edge in order, offsets 0, s, 2s, ...
    and the far endpoint; duplicate vertex points are kept once (first
    occurrence), so the scan order is canonical."""
    pts = []
    seen_vertices = set()
    for e in g.edges:
        k = int(e.length / spacing)
        offs = [spacing * j for j in range(k + 1)]
        if offs[-1] != e.length:
            offs.append(e.length)
        for off in offs:
            p = g.point(e.id, off)
            if p.is_vertex():
                if p.vertex in seen_vertices:
                    continue
                seen_vertices.add(p.vertex)
            pts.append((e.id, off, p))
    return pts


def grid_arrays(fs: FloatSystem, grid: list):
    g = fs.f.graph
    pe = np.empty(len(grid), dtype=np.int32)
    po = np.empty(len(grid), dtype=np.float64)
    for i, (eid, off, _p) in enumerate(grid):
        pe[i] = g.edge_index(eid)
        po[i] = float(off)
    return pe, po
