"""Finite metric graphs with exact rational edge lengths.

A metric graph is a connected multigraph (self-loops allowed) whose edges
carry positive rational lengths.  Points live on edges at rational offsets;
the metric is the geodesic (shortest-path) metric, which is convex: every
pair of points has an exact midpoint.  All arithmetic is done with
``fractions.Fraction`` so that equality tests are exact.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


class GraphError(ValueError):
    """Raised for malformed graphs or points that do not lie on a graph."""


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise GraphError("lengths and offsets must be exact rationals, got float %r" % x)
    return Fraction(x)


@dataclass(frozen=True)
class Edge:
    id: str
    u: str
    v: str
    length: Fraction

    def __post_init__(self):
        object.__setattr__(self, "length", _frac(self.length))
        if self.length <= 0:
            raise GraphError("edge %r: length must be positive" % self.id)


@dataclass(frozen=True)
class GraphPoint:
    """A location on a metric graph.

    Either a vertex (``edge is None``) or an interior point of an edge at a
    rational offset in the open interval (0, length).  Points at offset 0 or
    at the full edge length are canonicalized to the vertex form, so equality
    of coincident points holds.
    """

    vertex: str | None
    edge: str | None = None
    offset: Fraction | None = None

    @staticmethod
    def at_vertex(v: str) -> "GraphPoint":
        return GraphPoint(vertex=v)

    def is_vertex(self) -> bool:
        return self.vertex is not None

    def __repr__(self):
        if self.is_vertex():
            return "GraphPoint(%s)" % self.vertex
        return "GraphPoint(%s @ %s)" % (self.edge, self.offset)


class MetricGraph:
    """A finite connected multigraph with positive rational edge lengths."""

    def __init__(self, vertices: Iterable[str], edges: Iterable[Edge | tuple]):
        self.vertices: tuple[str, ...] = tuple(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError("duplicate vertex ids")
        built = []
        for e in edges:
            if not isinstance(e, Edge):
                e = Edge(e[0], e[1], e[2], _frac(e[3]))
            if e.u not in self.vertices or e.v not in self.vertices:
                raise GraphError("edge %r: unknown endpoint" % e.id)
            built.append(e)
        self.edges: tuple[Edge, ...] = tuple(built)
        ids = [e.id for e in self.edges]
        if len(set(ids)) != len(ids):
            raise GraphError("duplicate edge ids")
        if not self.edges:
            raise GraphError("a metric graph must have at least one edge")
        self._edge_by_id = {e.id: e for e in self.edges}
        self._edge_index = {e.id: i for i, e in enumerate(self.edges)}
        self._incident: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            self._incident[e.u].append(e)
            if e.v != e.u:
                self._incident[e.v].append(e)
        self._check_connected()
        self._vdist: dict[str, dict[str, Fraction]] | None = None

    # -- basic structure ---------------------------------------------------

    def edge(self, edge_id: str) -> Edge:
        try:
            return self._edge_by_id[edge_id]
        except KeyError:
            raise GraphError("unknown edge %r" % edge_id) from None

    def edge_index(self, edge_id: str) -> int:
        return self._edge_index[edge_id]

    def incident_edges(self, v: str) -> list[Edge]:
        return self._incident[v]

    def total_length(self) -> Fraction:
        return sum((e.length for e in self.edges), Fraction(0))

    def _check_connected(self):
        seen = {self.edges[0].u}
        stack = [self.edges[0].u]
        while stack:
            u = stack.pop()
            for e in self._incident[u]:
                for w in (e.u, e.v):
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
        if seen != set(self.vertices):
            raise GraphError("graph is not connected")

    # -- points ------------------------------------------------------------

    def point(self, edge_id: str, offset) -> GraphPoint:
        """Canonical point on ``edge_id`` at arclength ``offset`` from its u end."""
        e = self.edge(edge_id)
        off = _frac(offset)
        if off < 0 or off > e.length:
            raise GraphError("offset %s outside edge %r of length %s" % (off, edge_id, e.length))
        if off == 0:
            return GraphPoint.at_vertex(e.u)
        if off == e.length:
            return GraphPoint.at_vertex(e.v)
        return GraphPoint(vertex=None, edge=edge_id, offset=off)

    def check_point(self, p: GraphPoint):
        if p.is_vertex():
            if p.vertex not in self._incident:
                raise GraphError("point at unknown vertex %r" % p.vertex)
            return
        e = self.edge(p.edge)
        if p.offset is None or p.offset <= 0 or p.offset >= e.length:
            raise GraphError("non-canonical or out-of-range point %r" % (p,))

    def _ends(self, p: GraphPoint) -> list[tuple[str, Fraction]]:
        """(vertex, arclength from p to that vertex) pairs reachable along p's edge."""
        if p.is_vertex():
            return [(p.vertex, Fraction(0))]
        e = self.edge(p.edge)
        return [(e.u, p.offset), (e.v, e.length - p.offset)]

    # -- metric ------------------------------------------------------------

    def vertex_distances(self) -> dict[str, dict[str, Fraction]]:
        """All-pairs shortest vertex distances (Floyd-Warshall, exact)."""
        if self._vdist is None:
            inf = None
            d = {u: {v: inf for v in self.vertices} for u in self.vertices}
            for u in self.vertices:
                d[u][u] = Fraction(0)
            for e in self.edges:
                if e.u != e.v:
                    if d[e.u][e.v] is None or e.length < d[e.u][e.v]:
                        d[e.u][e.v] = e.length
                        d[e.v][e.u] = e.length
            for k in self.vertices:
                dk = d[k]
                for i in self.vertices:
                    dik = d[i][k]
                    if dik is None:
                        continue
                    di = d[i]
                    for j in self.vertices:
                        dkj = dk[j]
                        if dkj is None:
                            continue
                        nd = dik + dkj
                        if di[j] is None or nd < di[j]:
                            di[j] = nd
            self._vdist = d
        return self._vdist

    def distance(self, p: GraphPoint, q: GraphPoint) -> Fraction:
        """Geodesic distance between two points, exact."""
        self.check_point(p)
        self.check_point(q)
        best = None
        if (not p.is_vertex()) and (not q.is_vertex()) and p.edge == q.edge:
            best = abs(p.offset - q.offset)
        vd = self.vertex_distances()
        for a, da in self._ends(p):
            for b, db in self._ends(q):
                dab = vd[a][b]
                if dab is None:
                    continue
                cand = da + dab + db
                if best is None or cand < best:
                    best = cand
        return best

    def diameter_lower_bound(self) -> Fraction:
        """Max distance over vertices and edge midpoints (exact lower bound
        on the diameter; equals the diameter for these graphs)."""
        pts = [GraphPoint.at_vertex(v) for v in self.vertices]
        pts += [self.point(e.id, e.length / 2) for e in self.edges]
        best = Fraction(0)
        for i, p in enumerate(pts):
            for q in pts[i + 1:]:
                d = self.distance(p, q)
                if d > best:
                    best = d
        return best

    def geodesic_segments(self, p: GraphPoint, q: GraphPoint) -> list["Segment"]:
        """A shortest directed path from p to q as edge subsegments.

        Ties between equally short routes are broken by the lexicographic
        sequence of traversed edge ids, so the result is deterministic.
        """
        self.check_point(p)
        self.check_point(q)
        if p == q:
            raise GraphError("degenerate geodesic: p == q")

        # Candidate routes: (length, edge-id tuple, segments).  Search over
        # vertex states with (dist, edge-path) lexicographic keys; graphs are
        # small so the extra tuple comparisons are cheap.
        candidates: list[tuple[Fraction, tuple[str, ...], list[Segment]]] = []
        if (not p.is_vertex()) and (not q.is_vertex()) and p.edge == q.edge:
            seg = Segment(p.edge, p.offset, q.offset)
            candidates.append((seg.length(), (p.edge,), [seg]))

        # Dijkstra with path tie-breaking from every end of p's edge.
        starts: list[tuple[Fraction, tuple[str, ...], str, list]] = []
        if p.is_vertex():
            starts.append((Fraction(0), (), p.vertex, []))
        else:
            e = self.edge(p.edge)
            starts.append((p.offset, (e.id,), e.u, [Segment(e.id, p.offset, Fraction(0))]))
            starts.append((e.length - p.offset, (e.id,), e.v,
                           [Segment(e.id, p.offset, e.length)]))

        best_label: dict[str, tuple[Fraction, tuple[str, ...]]] = {}
        heap = []
        ctr = 0
        for d0, path0, v0, segs0 in starts:
            heap.append((d0, path0, ctr, v0, segs0))
            ctr += 1
        heapq.heapify(heap)
        finals: dict[str, tuple[Fraction, tuple[str, ...], list]] = {}
        while heap:
            d, path, _, u, segs = heapq.heappop(heap)
            if u in best_label and best_label[u] <= (d, path):
                continue
            best_label[u] = (d, path)
            finals[u] = (d, path, segs)
            for e in self._incident[u]:
                for (a, b) in ((e.u, e.v), (e.v, e.u)):
                    if a != u:
                        continue
                    nd = d + e.length
                    npath = path + (e.id,)
                    if b in best_label and best_label[b] <= (nd, npath):
                        continue
                    nseg = Segment(e.id, Fraction(0) if a == e.u else e.length,
                                   e.length if a == e.u else Fraction(0))
                    heapq.heappush(heap, (nd, npath, ctr, b, segs + [nseg]))
                    ctr += 1

        if q.is_vertex():
            if q.vertex in finals:
                d, path, segs = finals[q.vertex]
                candidates.append((d, path, segs))
        else:
            e = self.edge(q.edge)
            for (end, tail_from) in ((e.u, Fraction(0)), (e.v, e.length)):
                if end not in finals:
                    continue
                d, path, segs = finals[end]
                seg = Segment(e.id, tail_from, q.offset)
                candidates.append((d + seg.length(), path + (e.id,), segs + [seg]))

        if not candidates:
            raise GraphError("no path between %r and %r" % (p, q))
        candidates.sort(key=lambda c: (c[0], c[1]))
        total, _, segs = candidates[0]
        segs = [s for s in segs if s.length() > 0]
        assert sum((s.length() for s in segs), Fraction(0)) == total
        return segs

    def geodesic(self, p: GraphPoint, q: GraphPoint) -> list[GraphPoint]:
        """Waypoints of a shortest path: endpoints, traversed vertices, and
        the midpoint of every traversed subsegment (so arclength is
        recoverable from consecutive same-edge waypoints)."""
        segs = self.geodesic_segments(p, q)
        pts: list[GraphPoint] = [p]
        for s in segs:
            mid = self.point(s.edge, (s.a + s.b) / 2)
            end = self.point(s.edge, s.b)
            for w in (mid, end):
                if w != pts[-1]:
                    pts.append(w)
        if pts[-1] != q:
            pts.append(q)
        return pts


@dataclass(frozen=True)
class Segment:
    """A directed subsegment of one edge, from offset ``a`` to offset ``b``.

    ``a > b`` means the segment runs against the edge orientation.
    Zero-length segments are permitted only as construction intermediates.
    """

    edge: str
    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", _frac(self.a))
        object.__setattr__(self, "b", _frac(self.b))

    def length(self) -> Fraction:
        return abs(self.b - self.a)

    def reversed(self) -> "Segment":
        return Segment(self.edge, self.b, self.a)

    def lo(self) -> Fraction:
        return min(self.a, self.b)

    def hi(self) -> Fraction:
        return max(self.a, self.b)

    def at(self, t: Fraction) -> Fraction:
        """Offset at arclength t from the segment start (0 <= t <= length)."""
        return self.a + t if self.b >= self.a else self.a - t


def path_arclength(segments: Sequence[Segment]) -> Fraction:
    return sum((s.length() for s in segments), Fraction(0))


def path_is_continuous(g: MetricGraph, segments: Sequence[Segment]) -> bool:
    for s, t in zip(segments, segments[1:]):
        if g.point(s.edge, s.b) != g.point(t.edge, t.a):
            return False
    return True


class Piece:
    """A named connected union of edge subsegments (one splitting member).

    For map pieces the segments must form a directed chain; for plain
    splitting members any connected union is accepted.
    """

    def __init__(self, name: str, segments: Sequence[Segment]):
        self.name = name
        self.segments: tuple[Segment, ...] = tuple(segments)
        if not self.segments:
            raise GraphError("piece %r has no segments" % name)

    def length(self) -> Fraction:
        return path_arclength(self.segments)

    def intervals_on(self, edge_id: str) -> list[tuple[Fraction, Fraction]]:
        out = [(s.lo(), s.hi()) for s in self.segments if s.edge == edge_id]
        return _merge_intervals(out)

    def edge_ids(self) -> list[str]:
        seen = []
        for s in self.segments:
            if s.edge not in seen:
                seen.append(s.edge)
        return seen

    def contains_point(self, g: MetricGraph, p: GraphPoint) -> bool:
        if p.is_vertex():
            for s in self.segments:
                e = g.edge(s.edge)
                if (e.u == p.vertex and s.lo() == 0) or (e.v == p.vertex and s.hi() == e.length):
                    return True
            return False
        for s in self.segments:
            if s.edge == p.edge and s.lo() <= p.offset <= s.hi():
                return True
        return False

    def __repr__(self):
        return "Piece(%s: %s)" % (self.name, " ".join(
            "%s[%s:%s]" % (s.edge, s.a, s.b) for s in self.segments))


def _merge_intervals(ivals: list[tuple[Fraction, Fraction]]) -> list[tuple[Fraction, Fraction]]:
    if not ivals:
        return []
    ivals = sorted(ivals)
    out = [ivals[0]]
    for lo, hi in ivals[1:]:
        plo, phi = out[-1]
        if lo <= phi:
            out[-1] = (plo, max(phi, hi))
        else:
            out.append((lo, hi))
    return out


class Splitting:
    """A finite cover of the graph by non-degenerate pieces meeting only in
    the finite boundary set P."""

    def __init__(self, graph: MetricGraph, pieces: Sequence[Piece], boundary: Sequence[GraphPoint]):
        self.graph = graph
        self.pieces: tuple[Piece, ...] = tuple(pieces)
        self.boundary: tuple[GraphPoint, ...] = tuple(boundary)
        self._locator: dict[str, list[tuple[Fraction, Fraction, int]]] | None = None

    def piece_index(self, name: str) -> int:
        for i, a in enumerate(self.pieces):
            if a.name == name:
                return i
        raise GraphError("unknown piece %r" % name)

    def pieces_containing(self, p: GraphPoint) -> list[int]:
        return [i for i, a in enumerate(self.pieces) if a.contains_point(self.graph, p)]

    def locate(self, p: GraphPoint) -> int:
        """Index of the lowest-index piece containing p."""
        idxs = self.pieces_containing(p)
        if not idxs:
            raise GraphError("point %r not covered by the splitting" % (p,))
        return idxs[0]


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    reason: str | None = None

    def __bool__(self):
        return self.ok


def _piece_connected(g: MetricGraph, piece: Piece) -> bool:
    # Union-find over segments; join segments sharing a point.
    n = len(piece.segments)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        parent[find(i)] = find(j)

    keypoints = []
    for s in piece.segments:
        keypoints.append((g.point(s.edge, s.a), g.point(s.edge, s.b)))
    for i in range(n):
        for j in range(i + 1, n):
            si, sj = piece.segments[i], piece.segments[j]
            touch = False
            if si.edge == sj.edge and si.lo() <= sj.hi() and sj.lo() <= si.hi():
                touch = True
            else:
                pi, pj = keypoints[i], keypoints[j]
                if set(pi) & set(pj):
                    touch = True
                else:
                    # vertex of one segment interior to the other
                    for p in pi:
                        if p.is_vertex() and piece_segment_contains(g, sj, p):
                            touch = True
                    for p in pj:
                        if p.is_vertex() and piece_segment_contains(g, si, p):
                            touch = True
            if touch:
                union(i, j)
    return len({find(i) for i in range(n)}) == 1


def piece_segment_contains(g: MetricGraph, s: Segment, p: GraphPoint) -> bool:
    if p.is_vertex():
        e = g.edge(s.edge)
        return (e.u == p.vertex and s.lo() == 0) or (e.v == p.vertex and s.hi() == e.length)
    return s.edge == p.edge and s.lo() <= p.offset <= s.hi()


def _piece_vertices(g: MetricGraph, piece: Piece) -> set[str]:
    out = set()
    for s in piece.segments:
        e = g.edge(s.edge)
        if s.lo() == 0:
            out.add(e.u)
        if s.hi() == e.length:
            out.add(e.v)
    return out


def _covers_direction(g: MetricGraph, piece: Piece, p: GraphPoint,
                      edge_id: str, at: Fraction, inward: int) -> bool:
    """Does the piece cover a one-sided neighborhood of offset ``at`` on
    ``edge_id`` in direction ``inward`` (+1/-1)?"""
    for lo, hi in piece.intervals_on(edge_id):
        if inward > 0 and lo <= at < hi:
            return True
        if inward < 0 and lo < at <= hi:
            return True
    return False


def _is_boundary_point(g: MetricGraph, piece: Piece, p: GraphPoint) -> bool:
    """Topological boundary test: p is interior to the piece iff the piece
    covers every local direction at p (free arc tips have one direction)."""
    if p.is_vertex():
        for e in g.incident_edges(p.vertex):
            if e.u == p.vertex:
                if not _covers_direction(g, piece, p, e.id, Fraction(0), +1):
                    return True
            if e.v == p.vertex:
                if not _covers_direction(g, piece, p, e.id, e.length, -1):
                    return True
        return False
    ok = (_covers_direction(g, piece, p, p.edge, p.offset, +1)
          and _covers_direction(g, piece, p, p.edge, p.offset, -1))
    return not ok


def validate_splitting(g: MetricGraph, s: Splitting) -> ValidationResult:
    """Check the splitting invariants; report the first violation."""
    pset = set(s.boundary)
    # non-degenerate pieces of valid segments
    for a in s.pieces:
        for seg in a.segments:
            e = g.edge(seg.edge)
            if seg.lo() < 0 or seg.hi() > e.length:
                return ValidationResult(False, "piece %s: segment outside edge %s" % (a.name, seg.edge))
            if seg.length() == 0:
                return ValidationResult(False, "piece %s: degenerate segment" % a.name)
        if a.length() <= 0:
            return ValidationResult(False, "piece %s: degenerate piece" % a.name)
        if not _piece_connected(g, a):
            return ValidationResult(False, "piece %s: not connected" % a.name)
    # cover
    for e in g.edges:
        ivals = _merge_intervals([iv for a in s.pieces for iv in a.intervals_on(e.id)])
        if not ivals or ivals[0][0] > 0 or ivals[-1][1] < e.length or len(ivals) > 1:
            return ValidationResult(False, "edge %s not fully covered" % e.id)
    # pairwise intersections finite and inside P
    for i in range(len(s.pieces)):
        for j in range(i + 1, len(s.pieces)):
            ai, aj = s.pieces[i], s.pieces[j]
            for e_id in set(ai.edge_ids()) & set(aj.edge_ids()):
                for lo1, hi1 in ai.intervals_on(e_id):
                    for lo2, hi2 in aj.intervals_on(e_id):
                        lo, hi = max(lo1, lo2), min(hi1, hi2)
                        if lo > hi:
                            continue
                        if lo < hi:
                            return ValidationResult(
                                False, "pieces %s,%s share a positive-length arc: "
                                "non-finite intersection" % (ai.name, aj.name))
                        if g.point(e_id, lo) not in pset:
                            return ValidationResult(
                                False, "pieces %s,%s meet at %r outside P"
                                % (ai.name, aj.name, g.point(e_id, lo)))
            for v in _piece_vertices(g, ai) & _piece_vertices(g, aj):
                if GraphPoint.at_vertex(v) not in pset:
                    return ValidationResult(
                        False, "pieces %s,%s meet at vertex %s outside P"
                        % (ai.name, aj.name, v))
    # P contains every piece boundary
    for a in s.pieces:
        cands: list[GraphPoint] = []
        for seg in a.segments:
            for off in (seg.a, seg.b):
                pt = g.point(seg.edge, off)
                if pt not in cands:
                    cands.append(pt)
        for pt in cands:
            if _is_boundary_point(g, a, pt) and pt not in pset:
                return ValidationResult(
                    False, "boundary point %r of piece %s not in P" % (pt, a.name))
    return ValidationResult(True, None)


# -- convenience builders used across the package and the tests ------------

def interval_graph(length=1) -> MetricGraph:
    return MetricGraph(["v0", "v1"], [Edge("e0", "v0", "v1", _frac(length))])


def circle_graph(half=Fraction(1, 2)) -> MetricGraph:
    h = _frac(half)
    return MetricGraph(["v0", "v1"],
                       [Edge("e0", "v0", "v1", h), Edge("e1", "v0", "v1", h)])


def star_graph(arms: int, arm_length=1) -> MetricGraph:
    L = _frac(arm_length)
    vs = ["a"] + ["t%d" % i for i in range(arms)]
    es = [Edge("arm%d" % i, "a", "t%d" % i, L) for i in range(arms)]
    return MetricGraph(vs, es)
