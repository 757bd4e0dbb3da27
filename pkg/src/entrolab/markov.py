"""Piecewise-Lipschitz Markov maps on metric graphs.

A map is given piece by piece: each splitting piece is a directed arc
(a chain of edge subsegments) that is traversed at constant speed onto a
directed image path.  The finite boundary set P is forward-invariant and
contains all points where pieces meet, so continuity is decided exactly at
finitely many points.  All evaluation is exact rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .graph import (GraphError, GraphPoint, MetricGraph, Piece, Segment,
                    Splitting, path_arclength, validate_splitting)


class InvariantError(ValueError):
    """A structural invariant of a map or splitting is violated."""


def normalize_path(segments: Sequence[Segment]) -> list[Segment]:
    """Drop zero-length segments and merge consecutive co-directional runs
    on the same edge, so path corners are genuine turning points."""
    out: list[Segment] = []
    for s in segments:
        if s.length() == 0:
            continue
        if out:
            p = out[-1]
            if p.edge == s.edge and p.b == s.a:
                same_dir = (p.b - p.a > 0) == (s.b - s.a > 0)
                if same_dir:
                    out[-1] = Segment(p.edge, p.a, s.b)
                    continue
        out.append(s)
    return out


class _Path:
    """A directed continuous path of segments with an arclength chart."""

    def __init__(self, g: MetricGraph, segments: Sequence[Segment]):
        self.g = g
        self.segments = normalize_path(segments)
        if not self.segments:
            raise InvariantError("empty path")
        for s, t in zip(self.segments, self.segments[1:]):
            if g.point(s.edge, s.b) != g.point(t.edge, t.a):
                raise InvariantError("discontinuous path at %r -> %r" % (s, t))
        self.cum: list[Fraction] = [Fraction(0)]
        for s in self.segments:
            self.cum.append(self.cum[-1] + s.length())
        self.total: Fraction = self.cum[-1]

    def point_at(self, s: Fraction) -> GraphPoint:
        if s < 0 or s > self.total:
            raise GraphError("arclength %s outside path of length %s" % (s, self.total))
        for i, seg in enumerate(self.segments):
            if s <= self.cum[i + 1]:
                return self.g.point(seg.edge, seg.at(s - self.cum[i]))
        return self.g.point(self.segments[-1].edge, self.segments[-1].b)

    def locate(self, p: GraphPoint) -> Fraction:
        """Smallest arclength at which the path passes through p."""
        for i, seg in enumerate(self.segments):
            if p.is_vertex():
                e = self.g.edge(seg.edge)
                offs = []
                if e.u == p.vertex:
                    offs.append(Fraction(0))
                if e.v == p.vertex:
                    offs.append(e.length)
                for off in offs:
                    if seg.lo() <= off <= seg.hi():
                        return self.cum[i] + abs(off - seg.a)
            elif seg.edge == p.edge and seg.lo() <= p.offset <= seg.hi():
                return self.cum[i] + abs(p.offset - seg.a)
        raise GraphError("point %r not on path" % (p,))

    def start(self) -> GraphPoint:
        return self.g.point(self.segments[0].edge, self.segments[0].a)

    def end(self) -> GraphPoint:
        return self.g.point(self.segments[-1].edge, self.segments[-1].b)

    def interior_hits(self, points: set[GraphPoint]) -> list[Fraction]:
        """Arclengths in (0, total) where the path meets any of ``points``,
        including every revisit."""
        hits: set[Fraction] = set()
        for i, seg in enumerate(self.segments):
            e = self.g.edge(seg.edge)
            for p in points:
                offs = []
                if p.is_vertex():
                    if e.u == p.vertex:
                        offs.append(Fraction(0))
                    if e.v == p.vertex:
                        offs.append(e.length)
                elif p.edge == seg.edge:
                    offs.append(p.offset)
                for off in offs:
                    if seg.lo() <= off <= seg.hi():
                        s = self.cum[i] + abs(off - seg.a)
                        if 0 < s < self.total:
                            hits.add(s)
        return sorted(hits)


@dataclass(frozen=True)
class Lap:
    """One maximal monotone run of a piece map: the sub-interval
    [t0, t1] of the piece's chart maps affinely onto the whole target
    piece (orientation +1/-1)."""

    piece: int
    target: int
    t0: Fraction
    t1: Fraction
    orientation: int


@dataclass(frozen=True)
class Itinerary:
    pieces: tuple[int, ...]

    def __len__(self):
        return len(self.pieces)


class PLMarkovMap:
    """A continuous self-map of a metric graph, affine on each splitting piece.

    ``images`` maps each piece name to the directed path its piece traverses,
    at constant speed, from the image of the chain start to the image of the
    chain end.
    """

    def __init__(self, splitting: Splitting, images: dict[str, Sequence[Segment]],
                 boundary: Sequence[GraphPoint] | None = None, name: str = "system"):
        self.name = name
        self.splitting = splitting
        self.graph = splitting.graph
        g = self.graph
        verdict = validate_splitting(g, splitting)
        if not verdict:
            raise InvariantError("invalid splitting: %s" % verdict.reason)
        self.boundary: tuple[GraphPoint, ...] = tuple(
            boundary if boundary is not None else splitting.boundary)

        self._domains: list[_Path] = []
        self._images: list[_Path] = []
        for a in splitting.pieces:
            dom = _Path(g, a.segments)
            self._check_injective(dom, a.name)
            if a.name not in images:
                raise InvariantError("piece %s has no image path" % a.name)
            img = _Path(g, images[a.name])
            if img.total <= 0:
                raise InvariantError("piece %s: degenerate image" % a.name)
            self._domains.append(dom)
            self._images.append(img)
        self._speeds: list[Fraction] = [img.total / dom.total
                                        for dom, img in zip(self._domains, self._images)]
        self._check_continuity()
        self._check_boundary_invariant()
        self._laps: list[Lap] | None = None
        self.meta: dict = {}
        self.default_kept: tuple[int, ...] = tuple(range(self.n_pieces()))

    # -- validation ---------------------------------------------------------

    @staticmethod
    def _check_injective(dom: _Path, name: str):
        segs = dom.segments
        for i in range(len(segs)):
            for j in range(i + 1, len(segs)):
                si, sj = segs[i], segs[j]
                if si.edge != sj.edge:
                    continue
                lo, hi = max(si.lo(), sj.lo()), min(si.hi(), sj.hi())
                if lo < hi:
                    raise InvariantError("piece %s: domain chain overlaps itself" % name)

    def _check_continuity(self):
        for p in self.boundary:
            vals = []
            for idx in self.splitting.pieces_containing(p):
                vals.append(self._evaluate_in_piece(idx, p))
            if len({v for v in vals}) > 1:
                raise InvariantError("discontinuity at %r: images %r" % (p, vals))

    def _check_boundary_invariant(self):
        pset = set(self.boundary)
        for p in self.boundary:
            if self.evaluate(p) not in pset:
                raise InvariantError(
                    "boundary set not forward-invariant: %r -> %r" % (p, self.evaluate(p)))

    # -- evaluation -----------------------------------------------------------

    def n_pieces(self) -> int:
        return len(self.splitting.pieces)

    def piece(self, i: int) -> Piece:
        return self.splitting.pieces[i]

    def piece_names(self) -> list[str]:
        return [a.name for a in self.splitting.pieces]

    def domain_chart(self, i: int) -> _Path:
        return self._domains[i]

    def image_path(self, i: int) -> _Path:
        return self._images[i]

    def speed(self, i: int) -> Fraction:
        return self._speeds[i]

    def _evaluate_in_piece(self, i: int, x: GraphPoint) -> GraphPoint:
        t = self._domains[i].locate(x)
        return self._images[i].point_at(t * self._speeds[i])

    def evaluate(self, x: GraphPoint) -> GraphPoint:
        """Image of x; boundary points evaluate consistently from any
        containing piece (continuity is checked at construction)."""
        return self._evaluate_in_piece(self.splitting.locate(x), x)

    def iterate(self, x: GraphPoint, n: int) -> GraphPoint:
        for _ in range(n):
            x = self.evaluate(x)
        return x

    def orbit(self, x: GraphPoint, n: int) -> list[GraphPoint]:
        out = [x]
        for _ in range(n - 1):
            out.append(self.evaluate(out[-1]))
        return out

    def lipschitz_profile(self) -> dict[str, Fraction]:
        """Per-piece stretch factors (image arclength / piece arclength)."""
        return {a.name: s for a, s in zip(self.splitting.pieces, self._speeds)}

    def global_lipschitz(self) -> Fraction:
        return max(self._speeds)

    # -- symbolic structure ---------------------------------------------------

    def frontier_points(self) -> set[GraphPoint]:
        """Boundary-set points that are topological boundary of some piece."""
        from .graph import _is_boundary_point
        out = set()
        for p in self.boundary:
            for a in self.splitting.pieces:
                if a.contains_point(self.graph, p) and _is_boundary_point(self.graph, a, p):
                    out.add(p)
                    break
        return out

    def laps(self) -> list[Lap]:
        """Markov lap decomposition: each piece chart is cut at path corners
        and at frontier crossings; every resulting run must map affinely onto
        exactly one full piece.  Raises InvariantError otherwise."""
        if self._laps is not None:
            return self._laps
        frontier = self.frontier_points()
        laps: list[Lap] = []
        for i, a in enumerate(self.splitting.pieces):
            img = self._images[i]
            speed = self._speeds[i]
            cuts = set(img.cum[1:-1])
            cuts.update(img.interior_hits(frontier))
            svals = [Fraction(0)] + sorted(cuts) + [img.total]
            for s0, s1 in zip(svals, svals[1:]):
                if s0 == s1:
                    continue
                target = self._match_full_piece(img, s0, s1)
                if target is None:
                    raise InvariantError(
                        "piece %s: image run [%s,%s] is not a full piece; "
                        "map is not Markov at the lap level" % (a.name, s0, s1))
                t0, t1 = s0 / speed, s1 / speed
                laps.append(Lap(i, target, t0, t1, self._orientation(img, s0, s1, target)))
        self._laps = laps
        return laps

    def _orientation(self, img: _Path, s0: Fraction, s1: Fraction, target: int) -> int:
        # probe the quarter point: unambiguous even when the target chart is
        # a closed loop whose start and end coincide
        q = img.point_at(s0 + (s1 - s0) / 4)
        tq = self._domains[target].locate(q)
        L = self._domains[target].total
        if tq == L / 4:
            return +1
        if tq == 3 * L / 4:
            return -1
        raise InvariantError("lap does not traverse its target affinely")

    def _match_full_piece(self, img: _Path, s0: Fraction, s1: Fraction) -> int | None:
        # collect the covered intervals of the sub-path [s0, s1]
        cover: dict[str, list[tuple[Fraction, Fraction]]] = {}
        for k, seg in enumerate(img.segments):
            lo_s, hi_s = img.cum[k], img.cum[k + 1]
            a, b = max(lo_s, s0), min(hi_s, s1)
            if a >= b:
                continue
            o1, o2 = seg.at(a - lo_s), seg.at(b - lo_s)
            cover.setdefault(seg.edge, []).append((min(o1, o2), max(o1, o2)))
        from .graph import _merge_intervals
        cover = {e: _merge_intervals(iv) for e, iv in cover.items()}
        for j, b in enumerate(self.splitting.pieces):
            want = {e: b.intervals_on(e) for e in b.edge_ids()}
            if cover == want:
                return j
        return None

    def itinerary(self, x: GraphPoint, n: int) -> Itinerary:
        """An admissible symbol sequence (A_0, ..., A_{n-1}) with
        f^i(x) in A_i.  At boundary hits the lowest-index admissible
        containing piece is chosen, so the result is deterministic."""
        from .transition import transition_matrix
        M = transition_matrix(self)
        pts = self.orbit(x, n)
        seq: list[int] = []
        for i, p in enumerate(pts):
            cands = self.splitting.pieces_containing(p)
            if not cands:
                raise GraphError("orbit left the splitting at %r" % (p,))
            if i == 0:
                seq.append(cands[0])
                continue
            prev = seq[-1]
            pick = None
            for c in cands:
                if M.m[prev][c]:
                    pick = c
                    break
            if pick is None:
                raise InvariantError(
                    "no admissible continuation from %s at %r"
                    % (self.piece(prev).name, p))
            seq.append(pick)
        return Itinerary(tuple(seq))

    # -- exact branch tracking (periodic-point certificates) -----------------

    def lap_for_param(self, i: int, t: Fraction) -> Lap:
        for lap in self.laps():
            if lap.piece == i and lap.t0 <= t < lap.t1:
                return lap
        for lap in reversed(self.laps()):
            if lap.piece == i and lap.t1 == t:
                return lap
        raise GraphError("no lap at parameter %s of piece %d" % (t, i))

    def push_interval(self, i: int, lo: Fraction, hi: Fraction):
        """Largest single-lap forward image of the chart interval [lo, hi] of
        piece i: returns (target piece, new interval, affine fwd map data)."""
        best = None
        for lap in self.laps():
            if lap.piece != i:
                continue
            a, b = max(lo, lap.t0), min(hi, lap.t1)
            if a >= b:
                continue
            if best is None or (b - a) > (best[1] - best[0]):
                best = (a, b, lap)
        if best is None:
            raise GraphError("interval [%s,%s] misses every lap of piece %d" % (lo, hi, i))
        a, b, lap = best
        speed = self._speeds[i]
        target_len = self._domains[lap.target].total
        ori = lap.orientation
        lap_len = lap.t1 - lap.t0

        def to_target(t: Fraction) -> Fraction:
            frac = (t - lap.t0) / lap_len
            pos = frac * target_len
            return pos if ori > 0 else target_len - pos

        u, v = to_target(a), to_target(b)
        return lap.target, (min(u, v), max(u, v)), (a, b, lap, ori, speed)
