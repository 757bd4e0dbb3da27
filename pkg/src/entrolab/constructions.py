"""Factories for the explicit chaotic systems on metric graphs.

Each factory returns a :class:`PLMarkovMap` together with construction
metadata in ``map.meta`` (parameters, the canonical kept subset for the
frequency-weighted entropy bound, realized stretch constants).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .graph import Edge, GraphPoint, MetricGraph, Piece, Segment, Splitting, star_graph
from .markov import PLMarkovMap


class ParameterError(ValueError):
    """A construction parameter is out of range or inconsistent."""


def _lap_path(edge_id: str, length: Fraction, m: int, start_low: bool = True) -> list[Segment]:
    """m alternating full traversals of one edge, starting from the low end."""
    segs = []
    lo, hi = Fraction(0), length
    a, b = (lo, hi) if start_low else (hi, lo)
    for i in range(m):
        segs.append(Segment(edge_id, a, b) if i % 2 == 0 else Segment(edge_id, b, a))
    return segs


def _attach_meta(f: PLMarkovMap, **meta) -> PLMarkovMap:
    f.meta = dict(meta)
    kept = meta.get("kept_names")
    if kept is not None:
        f.default_kept = tuple(f.splitting.piece_index(nm) for nm in kept)
    else:
        f.default_kept = tuple(range(f.n_pieces()))
    return f


def tent_family(k: int) -> PLMarkovMap:
    """The k-lap sawtooth on the unit interval: fixes 0 and maps each
    [(i-1)/k, i/k] onto the whole interval, alternating orientation."""
    if k < 2:
        raise ParameterError("tent_family needs k >= 2")
    g = MetricGraph(["v0", "v1"], [Edge("e0", "v0", "v1", Fraction(1))])
    pieces = [Piece("A%d" % j, [Segment("e0", Fraction(j, k), Fraction(j + 1, k))])
              for j in range(k)]
    P = [g.point("e0", Fraction(j, k)) for j in range(k + 1)]
    images = {}
    for j in range(k):
        images["A%d" % j] = [Segment("e0", Fraction(0), Fraction(1))] if j % 2 == 0 \
            else [Segment("e0", Fraction(1), Fraction(0))]
    f = PLMarkovMap(Splitting(g, pieces, P), images, name="tent(k=%d)" % k)
    return _attach_meta(f, kind="tent", k=k, kept_names=[p.name for p in pieces])


def star_devaney(k: int, m: int = 2) -> PLMarkovMap:
    """Cyclic map on a (k+1)-arm star: arms 1..k-1 shift isometrically, the
    two remaining arms return via m-fold surjections fixing the center.
    Transitive but not totally transitive (pure cycle of period k+1)."""
    if k < 2 or m < 2:
        raise ParameterError("star_devaney needs k >= 2 and m >= 2")
    g = star_graph(k + 1)
    one = Fraction(1)
    pieces = [Piece("X%d" % i, [Segment("arm%d" % i, Fraction(0), one)]) for i in range(k + 1)]
    P = [GraphPoint.at_vertex("a")]
    images: dict[str, list[Segment]] = {}
    images["X0"] = _lap_path("arm1", one, m)
    for i in range(1, k):
        images["X%d" % i] = [Segment("arm%d" % (i + 1), Fraction(0), one)]
    images["X%d" % k] = _lap_path("arm0", one, m)
    f = PLMarkovMap(Splitting(g, pieces, P), images, name="star_devaney(k=%d,m=%d)" % (k, m))
    return _attach_meta(f, kind="star_devaney", k=k, m=m,
                        kept_names=["X%d" % i for i in range(1, k)])


def star_exact(k: int, m: int = 2) -> PLMarkovMap:
    """Exactly chaotic map on a (k+1)-arm star: like the cyclic map, but the
    arm X0 surjects onto X1 and X2 through the center, adding the chord
    X0 -> X2 that makes the transition matrix primitive."""
    if k < 2 or m < 2:
        raise ParameterError("star_exact needs k >= 2 and m >= 2")
    g = star_graph(k + 1)
    one = Fraction(1)
    pieces = [Piece("X%d" % i, [Segment("arm%d" % i, Fraction(0), one)]) for i in range(k + 1)]
    P = [GraphPoint.at_vertex("a")]
    images: dict[str, list[Segment]] = {}
    images["X0"] = [Segment("arm1", Fraction(0), one),
                    Segment("arm1", one, Fraction(0)),
                    Segment("arm2", Fraction(0), one)]
    for i in range(1, k):
        images["X%d" % i] = [Segment("arm%d" % (i + 1), Fraction(0), one)]
    images["X%d" % k] = _lap_path("arm0", one, m)
    f = PLMarkovMap(Splitting(g, pieces, P), images, name="star_exact(k=%d,m=%d)" % (k, m))
    return _attach_meta(f, kind="star_exact", k=k, m=m,
                        kept_names=["X%d" % i for i in range(1, k)])


def star_minimal(n: int) -> PLMarkovMap:
    """The minimal-entropy pattern on an n-arm star: arms cycle isometrically
    and the last arm returns 2-fold, giving spectral radius 2^(1/n)."""
    if n < 2:
        raise ParameterError("star_minimal needs n >= 2")
    g = star_graph(n)
    one = Fraction(1)
    pieces = [Piece("Y%d" % i, [Segment("arm%d" % i, Fraction(0), one)]) for i in range(n)]
    P = [GraphPoint.at_vertex("a")]
    images: dict[str, list[Segment]] = {}
    for i in range(n - 1):
        images["Y%d" % i] = [Segment("arm%d" % (i + 1), Fraction(0), one)]
    images["Y%d" % (n - 1)] = _lap_path("arm0", one, 2)
    f = PLMarkovMap(Splitting(g, pieces, P), images, name="star_minimal(n=%d)" % n)
    return _attach_meta(f, kind="star_minimal", n=n,
                        kept_names=["Y%d" % i for i in range(n - 1)])


def free_arc_cycle(k: int, exact: bool, m: int = 3) -> PLMarkovMap:
    """Cycle of k+1 unit arcs glued end to end (a circle): arcs 1..k-1 shift
    isometrically; the closing legs are multi-lap surjections.  Endpoint
    conditions force odd lap counts on the closing legs, so m must be odd.
    ``exact=True`` replaces the X0 leg by a two-branch surjection onto
    X1 and X2, making the matrix primitive."""
    if k < 2:
        raise ParameterError("free_arc_cycle needs k >= 2")
    if m < 3 or m % 2 == 0:
        raise ParameterError("closing legs need an odd lap count m >= 3 "
                             "(a path between the attachment points covers the "
                             "target an odd number of times)")
    one = Fraction(1)
    vs = ["a%d" % i for i in range(k + 1)]
    es = [Edge("E0", "a%d" % k, "a0", one)]
    es += [Edge("E%d" % i, "a%d" % (i - 1), "a%d" % i, one) for i in range(1, k + 1)]
    g = MetricGraph(vs, es)
    pieces = [Piece("X%d" % i, [Segment("E%d" % i, Fraction(0), one)]) for i in range(k + 1)]
    P = [GraphPoint.at_vertex(v) for v in vs]
    images: dict[str, list[Segment]] = {}
    if exact:
        images["X0"] = [Segment("E1", Fraction(0), one),
                        Segment("E2", Fraction(0), one),
                        Segment("E2", one, Fraction(0))]
    else:
        images["X0"] = _lap_path("E1", one, m)
    for i in range(1, k):
        images["X%d" % i] = [Segment("E%d" % (i + 1), Fraction(0), one)]
    images["X%d" % k] = _lap_path("E0", one, m)
    f = PLMarkovMap(Splitting(g, pieces, P), images,
                    name="free_arc_cycle(k=%d,exact=%s,m=%d)" % (k, exact, m))
    return _attach_meta(f, kind="free_arc_cycle", k=k, exact=exact, m=m,
                        kept_names=["X%d" % i for i in range(1, k)])


def arr_example(n: int, loop_length=Fraction(1)) -> PLMarkovMap:
    """Slow-climbing map on an arc glued to a loop at its endpoints.

    The arc carries n+1 pieces X0, X1-, X1+, X2, ..., X_{n-1} whose lengths
    grow geometrically with ratio lam = 2^(1/(n-2)) (realized as a rational
    approximation), so the realized stretch profile is
    (1, 1, lam, ..., lam, L, L) with L depending on the loop length.  The
    loop G closes the cycle: X_{n-1} -> G -> X0."""
    if n < 3:
        raise ParameterError("arr_example needs n >= 3")
    gamma = Fraction(loop_length)
    if gamma <= 0:
        raise ParameterError("loop length must be positive")
    lam = Fraction(2 ** (1.0 / (n - 2))).limit_denominator(10 ** 6)
    half = Fraction(1, 2)
    lengths = [Fraction(1), half, half]  # X0, X1-, X1+
    w = (lam - 1) / 2
    for i in range(2, n):
        lengths.append(w)
        w *= lam
    cuts = [Fraction(0)]
    for L in lengths:
        cuts.append(cuts[-1] + L)
    arc_len = cuts[-1]
    g = MetricGraph(["w0", "w1"], [Edge("arc", "w0", "w1", arc_len),
                                   Edge("loop", "w1", "w0", gamma)])
    names = ["X0", "X1m", "X1p"] + ["X%d" % i for i in range(2, n)]
    pieces = [Piece(nm, [Segment("arc", cuts[j], cuts[j + 1])]) for j, nm in enumerate(names)]
    pieces.append(Piece("G", [Segment("loop", Fraction(0), gamma)]))
    P = [g.point("arc", c) for c in cuts]
    images: dict[str, list[Segment]] = {
        "X0": [Segment("arc", cuts[1], cuts[3])],          # onto X1- u X1+
        "X1m": [Segment("arc", cuts[3], cuts[2])],         # onto X1+, reversed
        "X1p": [Segment("arc", cuts[2], cuts[4])],         # onto X1+ u X2
        "X%d" % (n - 1): [Segment("loop", Fraction(0), gamma)],
        "G": [Segment("arc", Fraction(0), cuts[1])],       # onto X0
    }
    for i in range(2, n - 1):
        images["X%d" % i] = [Segment("arc", cuts[i + 2], cuts[i + 3])]
    f = PLMarkovMap(Splitting(g, pieces, P), images, name="arr_example(n=%d)" % n)
    kept = [nm for nm in names if nm != "X%d" % (n - 1)]
    return _attach_meta(f, kind="arr_example", n=n, lam=lam, loop_length=gamma,
                        kept_names=kept)


def two_piece_swap(shape: str, m: int = 2) -> PLMarkovMap:
    """Period-two swap of two arcs: one leg is an m-fold surjection, the
    other an isometry, so the second iterate is m-fold on each piece.

    On the circle the two arcs share both endpoints and continuity forces
    odd lap counts; the pair-of-arcs shape has free ends and admits any m."""
    if m < 2:
        raise ParameterError("two_piece_swap needs m >= 2")
    one = Fraction(1)
    if shape == "circle":
        if m % 2 == 0:
            raise ParameterError(
                "on the circle both swap legs fix the two shared endpoints, "
                "so lap counts are odd: use m=3,5,... or shape='dendrite-pair'")
        g = MetricGraph(["a", "b"], [Edge("c0", "a", "b", one), Edge("c1", "a", "b", one)])
        pieces = [Piece("X0", [Segment("c0", Fraction(0), one)]),
                  Piece("X1", [Segment("c1", Fraction(0), one)])]
        P = [GraphPoint.at_vertex("a"), GraphPoint.at_vertex("b")]
        images = {"X0": _lap_path("c1", one, m),
                  "X1": [Segment("c0", Fraction(0), one)]}
    elif shape == "dendrite-pair":
        g = MetricGraph(["c", "t0", "t1"], [Edge("d0", "c", "t0", one),
                                            Edge("d1", "c", "t1", one)])
        pieces = [Piece("X0", [Segment("d0", Fraction(0), one)]),
                  Piece("X1", [Segment("d1", Fraction(0), one)])]
        P = [GraphPoint.at_vertex("c"), GraphPoint.at_vertex("t0"),
             GraphPoint.at_vertex("t1")]
        images = {"X0": _lap_path("d1", one, m),
                  "X1": [Segment("d0", Fraction(0), one)]}
    else:
        raise ParameterError("shape must be 'circle' or 'dendrite-pair'")
    f = PLMarkovMap(Splitting(g, pieces, P), images,
                    name="two_piece_swap(%s,m=%d)" % (shape, m))
    return _attach_meta(f, kind="two_piece_swap", shape=shape, m=m, kept_names=["X1"])


@dataclass
class ConstructionSpec:
    """Parametrized request for one of the named constructions."""

    kind: str
    params: dict = field(default_factory=dict)

    def build(self) -> PLMarkovMap:
        return build_construction(self.kind, **self.params)


_FACTORIES = {
    "tent": tent_family,
    "star_devaney": star_devaney,
    "star_exact": star_exact,
    "star_minimal": star_minimal,
    "free_arc_cycle": free_arc_cycle,
    "arr_example": arr_example,
    "two_piece_swap": two_piece_swap,
}


def build_construction(kind: str, **params) -> PLMarkovMap:
    if kind not in _FACTORIES:
        raise ParameterError("unknown construction kind %r (choose from %s)"
                             % (kind, ", ".join(sorted(_FACTORIES))))
    try:
        return _FACTORIES[kind](**params)
    except TypeError as exc:
        raise ParameterError("bad parameters for %s: %s" % (kind, exc)) from None


def describe(f: PLMarkovMap) -> str:
    """Human-readable summary of pieces, boundary points and constants."""
    lines = ["system %s" % f.name,
             "graph: %d vertices, %d edges, total length %s"
             % (len(f.graph.vertices), len(f.graph.edges), f.graph.total_length())]
    prof = f.lipschitz_profile()
    for a in f.splitting.pieces:
        img = f.image_path(f.splitting.piece_index(a.name))
        lines.append("  piece %-4s length %-10s stretch %-10s image %s"
                     % (a.name, a.length(), prof[a.name],
                        " ".join("%s[%s:%s]" % (s.edge, s.a, s.b) for s in img.segments)))
    lines.append("boundary set: %s" % ", ".join(repr(p) for p in f.boundary))
    return "\n".join(lines)
