"""Self-check suites runnable from the command line (``entrolab verify``).

Each suite replays the core invariants on seeded random inputs and the
construction family, printing one line per property.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

from .constructions import (arr_example, free_arc_cycle, star_devaney,
                            star_exact, star_minimal, tent_family,
                            two_piece_swap)
from .entropy import lipschitz_bound, perron_entropy, piecewise_lipschitz_bound
from .graph import Edge, GraphPoint, MetricGraph, path_arclength
from .transition import (TransitionMatrix, max_outside_frequency,
                         outside_count_dp, outside_frequency_dp_limit,
                         transition_matrix)


def construction_family(heavy: bool = False):
    """The representative systems exercised by the invariant suites."""
    fam = [
        tent_family(2), tent_family(3),
        star_devaney(3, 2), star_exact(3, 2), star_exact(8, 2),
        star_minimal(2), star_minimal(4),
        free_arc_cycle(3, False), free_arc_cycle(3, True),
        two_piece_swap("dendrite-pair", 2), two_piece_swap("circle", 3),
        arr_example(3), arr_example(5), arr_example(8),
    ]
    if heavy:
        fam += [arr_example(12), star_exact(16, 2), star_devaney(8, 3)]
    return fam


def random_metric_graph(rng: random.Random, max_edges: int = 10) -> MetricGraph:
    nv = rng.randint(2, 5)
    vs = ["v%d" % i for i in range(nv)]
    edges = []
    for i in range(1, nv):
        j = rng.randrange(i)
        edges.append(("t%d" % i, vs[j], vs[i], Fraction(rng.randint(1, 8), rng.randint(1, 4))))
    extra = rng.randint(0, max(0, max_edges - len(edges)))
    for k in range(extra):
        a, b = rng.choice(vs), rng.choice(vs)
        edges.append(("x%d" % k, a, b, Fraction(rng.randint(1, 8), rng.randint(1, 4))))
    return MetricGraph(vs, [Edge(*e) for e in edges])


def random_point(rng: random.Random, g: MetricGraph) -> GraphPoint:
    e = rng.choice(g.edges)
    off = e.length * Fraction(rng.randint(0, 16), 16)
    return g.point(e.id, off)


def random_row_nonzero_matrix(rng: random.Random, max_n: int = 8) -> TransitionMatrix:
    n = rng.randint(2, max_n)
    rows = [[1 if rng.random() < 0.3 else 0 for _ in range(n)] for _ in range(n)]
    for r in rows:
        if not any(r):
            r[rng.randrange(n)] = 1
    return TransitionMatrix(rows)


def _suite_metric(log) -> bool:
    rng = random.Random(20240811)
    ok = True
    for gi in range(30):
        g = random_metric_graph(rng)
        pts = [random_point(rng, g) for _ in range(6)]
        for p in pts:
            if g.distance(p, p) != 0:
                log("FAIL metric: d(p,p) != 0 on graph %d" % gi)
                ok = False
        for p in pts:
            for q in pts:
                if g.distance(p, q) != g.distance(q, p):
                    log("FAIL metric: asymmetry on graph %d" % gi)
                    ok = False
        for a in pts[:4]:
            for b in pts[:4]:
                for c in pts[:4]:
                    if g.distance(a, b) > g.distance(a, c) + g.distance(c, b):
                        log("FAIL metric: triangle inequality on graph %d" % gi)
                        ok = False
        for p, q in zip(pts, pts[1:]):
            if p == q:
                continue
            segs = g.geodesic_segments(p, q)
            if path_arclength(segs) != g.distance(p, q):
                log("FAIL metric: geodesic arclength mismatch on graph %d" % gi)
                ok = False
    log("ok metric: identity, symmetry, triangle inequality, geodesic arclength"
        " (30 random graphs)")
    return ok


def _suite_theta(log, n_random: int = 500) -> bool:
    rng = random.Random(987654321)
    ok = True
    for f in construction_family():
        M = transition_matrix(f)
        th = max_outside_frequency(M, f.default_kept)
        dp = outside_frequency_dp_limit(M, f.default_kept)
        if th.value != dp:
            log("FAIL theta-oracle: %s cycle=%s dp=%s" % (f.name, th.value, dp))
            ok = False
    log("ok theta-oracle: cycle value equals DP limit on %d constructions"
        % len(construction_family()))
    bad = 0
    for t in range(n_random):
        M = random_row_nonzero_matrix(rng)
        kept = frozenset(i for i in range(M.n) if rng.random() < 0.5)
        if len(kept) == M.n:
            kept = frozenset(list(kept)[:-1])
        th = max_outside_frequency(M, kept)
        dp = outside_frequency_dp_limit(M, kept)
        if th.value != dp:
            bad += 1
            if bad <= 3:
                log("FAIL theta-oracle: random digraph %d: %s vs %s" % (t, th.value, dp))
        n_probe = 4 * M.n
        kn = outside_count_dp(M, kept, n_probe)
        if abs(kn - th.value) > Fraction(M.n, n_probe):
            bad += 1
            log("FAIL theta-oracle: transient bound violated on digraph %d" % t)
    if bad:
        ok = False
    else:
        log("ok theta-oracle: cycle value equals DP limit on %d random digraphs"
            % n_random)
    return ok


def _suite_bounds(log) -> bool:
    ok = True
    for f in construction_family(heavy=True):
        h, herr = perron_entropy(f)
        pw = piecewise_lipschitz_bound(f)
        lb = lipschitz_bound(f)
        if h > pw + 1e-9 or h > lb + 1e-9:
            log("FAIL bounds: %s entropy %.6f exceeds bound (pw=%.6f lip=%.6f)"
                % (f.name, h, pw, lb))
            ok = False
    log("ok bounds: spectral entropy within piecewise and Lipschitz bounds "
        "on %d systems" % len(construction_family(heavy=True)))
    return ok


SUITES = {
    "metric": _suite_metric,
    "theta-oracle": _suite_theta,
    "bounds": _suite_bounds,
}


def run_suite(name: str, log=print) -> bool:
    if name == "all":
        results = [run_suite(s, log) for s in SUITES]
        return all(results)
    if name not in SUITES:
        raise KeyError("unknown suite %r (choose from %s, all)"
                       % (name, ", ".join(SUITES)))
    return SUITES[name](log)
