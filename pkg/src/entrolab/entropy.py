"""Entropy machinery: exact bounds, Bowen separated-set estimation, and the
chaos classification report.

Three independent routes to the entropy of a covering Markov map live here:

* the spectral oracle (log Perron root of the lap matrix),
* the piecewise-Lipschitz upper bound (stretch profile + excursion
  frequency of the transition graph),
* the numerical Bowen estimate (growth rate of maximal separated sets on
  refining arclength grids).

Periodic-point certificates are exact: an affine branch of some iterate is
pinned down symbolically and its fixed point solved in rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._fast import FloatSystem, exact_grid, grid_arrays
from . import kernels
from .graph import GraphError, GraphPoint, MetricGraph
from .markov import InvariantError, PLMarkovMap
from .transition import (FrequencySpec, TransitionMatrix, is_irreducible,
                         is_primitive, lap_matrix, max_outside_frequency,
                         min_cycle_log_expansion, period, perron_root,
                         transition_matrix)


def _logplus(x: float) -> float:
    return max(math.log(x), 0.0) if x > 0 else 0.0


def lipschitz_bound(f: PLMarkovMap) -> float:
    """One-dimensional Lipschitz entropy bound: log+ of the global stretch."""
    return _logplus(float(f.global_lipschitz()))


def piecewise_lipschitz_bound(f: PLMarkovMap, kept=None, frequency_factor: int = 2,
                              matrix: TransitionMatrix | None = None) -> float:
    """Entropy bound from the stretch profile: log+ of the stretch on the
    kept pieces plus ``frequency_factor`` times the maximal excursion
    frequency times log+ of the global stretch.

    ``frequency_factor=2`` is the proven form; ``frequency_factor=1`` is the
    optimistic single-factor variant reported alongside it for the
    arc-plus-loop family (see the analysis notes in the README)."""
    if kept is None:
        kept = f.default_kept
    kept = tuple(kept)
    if not kept:
        raise GraphError("kept subset must be nonempty")
    M = matrix if matrix is not None else transition_matrix(f)
    speeds = [f.speed(i) for i in range(f.n_pieces())]
    l_kept = max(float(speeds[i]) for i in kept)
    l_all = max(float(s) for s in speeds)
    theta = max_outside_frequency(M, kept).value
    return _logplus(l_kept) + frequency_factor * float(theta) * _logplus(l_all)


def perron_entropy(f: PLMarkovMap) -> tuple[float, float]:
    """log of the lap-matrix spectral radius, with its error bound: the
    entropy oracle for covering Markov maps."""
    rho, err = perron_root(lap_matrix(f))
    if rho <= 0:
        return 0.0, err
    return math.log(rho), err / rho + 1e-15


# -- separated / spanning counts ----------------------------------------------


def _check_eps(g: MetricGraph, eps: Fraction):
    if eps <= 0:
        raise GraphError("epsilon must be positive")
    if eps >= g.diameter_lower_bound():
        raise GraphError("epsilon %s is not below the diameter" % eps)


def static_separated_count(g: MetricGraph, eps, spacing=None) -> int:
    """Greedy maximal eps-separated subset of an arclength grid, exact
    rational arithmetic, canonical scan order."""
    eps = Fraction(eps)
    _check_eps(g, eps)
    spacing = Fraction(spacing) if spacing is not None else eps / 4
    grid = [p for (_e, _o, p) in exact_grid(g, spacing)]
    chosen: list = []
    for p in grid:
        if all(g.distance(p, q) > eps for q in chosen):
            chosen.append(p)
    return len(chosen)


def separated_count(f: PLMarkovMap, n: int, eps, spacing=None,
                    method: str = "exact") -> int:
    """Size of a greedy maximal (n, eps)-separated subset of an arclength
    grid.  The set is grown incrementally in n (a (j, eps)-separated set is
    (j+1, eps)-separated), so the count is nondecreasing in n for a fixed
    grid.  Lower-bounds the true separated-set cardinality.

    ``method='exact'`` uses rational arithmetic (small grids);
    ``method='fast'`` uses the float kernel in one shot."""
    if n < 1:
        raise GraphError("n must be positive")
    g = f.graph
    eps = Fraction(eps)
    _check_eps(g, eps)
    spacing = Fraction(spacing) if spacing is not None else eps / 4
    if method == "fast":
        return len(_fast_separated(f, n, eps, spacing)[0])
    grid = [p for (_e, _o, p) in exact_grid(g, spacing)]
    orbits = {p: f.orbit(p, n) for p in grid}
    chosen: list = []
    chosen_set: set = set()
    for j in range(1, n + 1):
        for p in grid:
            if p in chosen_set:
                continue
            ok = True
            for q in chosen:
                op, oq = orbits[p], orbits[q]
                if all(g.distance(op[i], oq[i]) <= eps for i in range(j)):
                    ok = False
                    break
            if ok:
                chosen.append(p)
                chosen_set.add(p)
    return len(chosen)


def _fast_separated(f: PLMarkovMap, n: int, eps: Fraction, spacing: Fraction,
                    fs: FloatSystem | None = None):
    fs = fs or FloatSystem(f)
    grid = exact_grid(f.graph, spacing)
    pe, po = grid_arrays(fs, grid)
    oe, oo = fs.orbit_table(pe, po, n)
    k0 = fs.landmark_coords(oe[:, n - 1], oo[:, n - 1], 0)
    k1 = fs.landmark_coords(oe[:, n // 2], oo[:, n // 2], 0)
    sel = kernels.greedy_separated(
        oe, oo, float(eps), fs.edge_u, fs.edge_v, fs.edge_len, fs.vdist, k0, k1)
    return sel, (oe, oo, fs)


def separated_cover_radius(f: PLMarkovMap, n: int, eps, spacing=None) -> float:
    """d_n covering radius of the greedy separated set over its own grid:
    at most eps, witnessing that maximal separated sets are spanning."""
    eps = Fraction(eps)
    spacing = Fraction(spacing) if spacing is not None else eps / 4
    sel, (oe, oo, fs) = _fast_separated(f, n, eps, spacing)
    return float(kernels.cover_radius(oe, oo, sel, float(eps),
                                      fs.edge_u, fs.edge_v, fs.edge_len, fs.vdist))


def separated_bound_check(g: MetricGraph, eps_list, spacing_divisor: int = 4):
    """For each eps: greedy separated count against the length bound
    2 * total_length / eps; returns per-eps records with margins."""
    out = []
    two_len = 2 * g.total_length()
    for eps in eps_list:
        eps = Fraction(eps)
        count = static_separated_count(g, eps, eps / spacing_divisor)
        bound = two_len / eps
        out.append({"eps": eps, "count": count, "bound": bound,
                    "ok": count <= bound, "margin": float(bound) - count})
    return out


# -- Bowen estimator -----------------------------------------------------------


@dataclass
class EpsDiagnostics:
    eps: Fraction
    refine: float
    ns: list[int]
    grid_sizes: list[int]
    counts: list[int]
    slope: float
    residual: float
    fit_range: tuple[int, int]


@dataclass
class BowenResult:
    estimate: float
    flat: bool
    per_eps: list[EpsDiagnostics]
    params: dict

    def count_table(self):
        """(eps, n, grid_size, count) rows for CSV export."""
        rows = []
        for d in self.per_eps:
            for n, gs, c in zip(d.ns, d.grid_sizes, d.counts):
                rows.append((d.eps, n, gs, c))
        return rows


def default_eps_list(g: MetricGraph) -> list[Fraction]:
    d = float(g.diameter_lower_bound())
    return [Fraction(d / 2 ** j).limit_denominator(4096) for j in range(4, 8)]


def default_refine_rate(f: PLMarkovMap, matrix: TransitionMatrix | None = None) -> float:
    """Grid refinement rate per extra orbit step: the fastest sustainable
    mean stretch along symbolic cycles (floored so grids always refine).
    Derived from the stretch profile and the transition graph only, so the
    estimator stays independent of the spectral oracle."""
    from .transition import max_cycle_log_expansion
    M = matrix if matrix is not None else transition_matrix(f)
    speeds = [f.speed(i) for i in range(f.n_pieces())]
    rate = math.exp(max_cycle_log_expansion(M, speeds))
    return min(max(rate, 1.25), max(float(f.global_lipschitz()), 1.25))


def bowen_estimate(f: PLMarkovMap, eps_list=None, n_max: int | None = None,
                   grid_divisor: int = 4, budget: int = 200_000,
                   burn_in: int = 4, refine: float | None = None) -> BowenResult:
    """Slope of log separated-count versus n, per eps; the estimate is the
    largest per-eps slope.

    Grids refine geometrically with n (rate ``refine``, by default the
    fastest symbolic mean stretch) so that counts keep tracking the true
    separated numbers instead of saturating at the grid size; the point
    budget caps how deep in n each eps can go.  Counts come from the float
    kernel."""
    g = f.graph
    if eps_list is None:
        eps_list = default_eps_list(g)
    if n_max is None:
        # depth must span a couple of symbolic periods to see the growth
        n_max = max(12, 2 * f.n_pieces() + 2)
    eps_list = sorted((Fraction(e) for e in eps_list), reverse=True)
    for e in eps_list:
        _check_eps(g, e)
    total = float(g.total_length())
    r = refine if refine is not None else default_refine_rate(f)
    fs = FloatSystem(f)
    per_eps = []
    slopes = []
    flat = True
    for eps in eps_list:
        base = float(eps) / grid_divisor
        ns, counts, sizes = [], [], []
        for n in range(1, n_max + 1):
            spacing = Fraction(base / r ** (n - 1)).limit_denominator(10 ** 7)
            approx_pts = total / float(spacing) + len(g.edges) + 1
            if n > 1 and approx_pts > budget:
                break
            sel, (oe, _oo, _fs) = _fast_separated(f, n, eps, spacing, fs)
            ns.append(n)
            sizes.append(oe.shape[0])
            counts.append(int(len(sel)))
        lo = min(burn_in, max(1, ns[-1] - 1))
        fit_n = [n for n in ns if n >= lo]
        fit_c = [c for n, c in zip(ns, counts) if n >= lo]
        slope, resid = _fit_slope(fit_n, fit_c)
        if any(c != counts[0] for c in counts):
            flat = False
        slopes.append(slope)
        per_eps.append(EpsDiagnostics(eps=eps, refine=r, ns=ns, grid_sizes=sizes,
                                      counts=counts, slope=slope, residual=resid,
                                      fit_range=(fit_n[0], fit_n[-1])))
    estimate = max(0.0, max(slopes))
    return BowenResult(estimate=estimate, flat=flat, per_eps=per_eps,
                       params={"eps_list": [str(e) for e in eps_list],
                               "n_max": n_max, "grid_divisor": grid_divisor,
                               "budget": budget, "burn_in": burn_in,
                               "refine": r, "kernel": kernels.IMPL})


def _fit_slope(ns, counts):
    ys = [math.log(c) if c > 0 else 0.0 for c in counts]
    xs = [float(n) for n in ns]
    if len(xs) < 2 or max(ys) == min(ys):
        return 0.0, 0.0
    mx = sum(xs) / len(xs)
    my = sum(ys) / len(ys)
    var = sum((x - mx) ** 2 for x in xs)
    cov = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    slope = cov / var
    resid = math.sqrt(sum((y - (my + slope * (x - mx))) ** 2
                          for x, y in zip(xs, ys)) / len(xs))
    return slope, resid


# -- periodic-point certificates ------------------------------------------------


@dataclass(frozen=True)
class PeriodicCertificate:
    piece: str
    point: GraphPoint
    period: int
    target: GraphPoint
    distance_bound: Fraction


def _bfs_piece_path(M: TransitionMatrix, start: int, goal: int) -> list[int]:
    if start == goal:
        return [start]
    prev = {start: None}
    queue = [start]
    while queue:
        u = queue.pop(0)
        for v in M.successors(u):
            if v not in prev:
                prev[v] = u
                if v == goal:
                    path = [v]
                    while prev[path[-1]] is not None:
                        path.append(prev[path[-1]])
                    return list(reversed(path))
                queue.append(v)
    raise GraphError("no transition path from piece %d to %d" % (start, goal))


def periodic_point_near(f: PLMarkovMap, x: GraphPoint, radius,
                        max_steps: int = 5000) -> PeriodicCertificate:
    """Exact periodic point within ``radius`` of x (arclength inside x's
    piece).  Tracks a monotone branch of the iterates until it covers a full
    piece, routes back to the start piece along the transition graph, and
    solves the resulting affine return branch for its fixed point."""
    radius = Fraction(radius)
    if radius <= 0:
        raise GraphError("radius must be positive")
    i0 = f.splitting.locate(x)
    dom0 = f.domain_chart(i0)
    tx = dom0.locate(x)
    lo, hi = max(Fraction(0), tx - radius), min(dom0.total, tx + radius)
    assert hi > lo
    piece, cur = i0, (lo, hi)
    records = []
    for _ in range(max_steps):
        if cur == (Fraction(0), f.domain_chart(piece).total):
            break
        target, nxt, data = f.push_interval(piece, cur[0], cur[1])
        records.append(data)
        piece, cur = target, nxt
    else:
        raise InvariantError("branch tracking did not reach a full piece "
                             "within %d steps" % max_steps)
    M = transition_matrix(f)
    path = _bfs_piece_path(M, piece, i0)
    k = (Fraction(0), f.domain_chart(i0).total)
    for b, c in reversed(list(zip(path, path[1:]))):
        k = _pull_through_piece(f, b, c, k)
    for data in reversed(records):
        k = _pull_through_lap(f, data, k)
    w0, w1 = k
    assert lo <= w0 < w1 <= hi
    n_total = len(records) + (len(path) - 1)
    p0, p1 = dom0.point_at(w0), dom0.point_at(w1)
    y0 = dom0.locate(f.iterate(p0, n_total))
    y1 = dom0.locate(f.iterate(p1, n_total))
    t_star = _affine_fixed_point(w0, w1, y0, y1)
    q = dom0.point_at(t_star)
    if f.iterate(q, n_total) != q:
        raise InvariantError("periodic certificate failed verification")
    return PeriodicCertificate(piece=f.piece(i0).name, point=q, period=n_total,
                               target=x, distance_bound=radius)


def _pull_through_piece(f: PLMarkovMap, b: int, c: int, k):
    """Preimage of chart interval k of piece c inside the first lap of piece
    b that covers c."""
    lap = next(l for l in f.laps() if l.piece == b and l.target == c)
    return _invert_lap(f, lap, k)


def _invert_lap(f: PLMarkovMap, lap, k):
    L = f.domain_chart(lap.target).total
    span = lap.t1 - lap.t0

    def back(y):
        frac = y / L if lap.orientation > 0 else (L - y) / L
        return lap.t0 + frac * span

    a, b = back(k[0]), back(k[1])
    return (min(a, b), max(a, b))


def _pull_through_lap(f: PLMarkovMap, data, k):
    a, b, lap, _ori, _speed = data
    out = _invert_lap(f, lap, k)
    assert a <= out[0] < out[1] <= b, "branch inversion left its window"
    return out


def _affine_fixed_point(w0: Fraction, w1: Fraction, y0: Fraction, y1: Fraction) -> Fraction:
    slope = (y1 - y0) / (w1 - w0)
    if slope == 1:
        if y0 == w0:
            return (w0 + w1) / 2
        raise InvariantError("slope-one branch without fixed point")
    t = (y0 - slope * w0) / (1 - slope)
    assert w0 <= t <= w1
    return t


def dense_periodic_certificates(f: PLMarkovMap, resolution,
                                targets_per_piece: int = 3) -> list[PeriodicCertificate]:
    """One exact periodic point within ``resolution`` of evenly spaced
    targets in every piece."""
    out = []
    for i in range(f.n_pieces()):
        dom = f.domain_chart(i)
        for j in range(1, targets_per_piece + 1):
            t = dom.total * Fraction(j, targets_per_piece + 1)
            out.append(periodic_point_near(f, dom.point_at(t), resolution))
    return out


# -- classification report -------------------------------------------------------


@dataclass
class EntropyReport:
    name: str
    meta: dict
    labels: list[str]
    matrix: list[list[int]]
    covering: bool
    irreducible: bool
    period: int | None
    primitive: bool
    expansion_margin: float
    perron_entropy: float | None
    perron_error: float | None
    lipschitz_bound: float
    kept: list[str]
    frequency: FrequencySpec
    piecewise_bound: float
    piecewise_bound_single_factor: float
    profile: dict
    classification: dict | None
    classification_note: str
    certificates: list[PeriodicCertificate] = field(default_factory=list)
    bowen: BowenResult | None = None


def devaney_report(f: PLMarkovMap, eps_list=None, n_max: int | None = None,
                   budget: int = 120_000, run_bowen: bool = True,
                   classify: bool = True, resolution=Fraction(1, 1000),
                   targets_per_piece: int = 3, kept=None) -> EntropyReport:
    """Full analysis of one system: transition invariants, entropy numbers
    and bounds, Bowen estimate, chaos classification with periodic-point
    certificates."""
    M = transition_matrix(f)
    irr = is_irreducible(M)
    per = period(M) if irr else None
    prim = is_primitive(M)
    speeds = [f.speed(i) for i in range(f.n_pieces())]
    expansion = min_cycle_log_expansion(M, speeds)
    try:
        h, herr = perron_entropy(f)
    except InvariantError:
        # not Markov at the lap level: no spectral oracle for this map
        h, herr = None, None
    kept = tuple(kept) if kept is not None else f.default_kept
    freq = max_outside_frequency(M, kept)
    pb = piecewise_lipschitz_bound(f, kept, 2, matrix=M)
    pb1 = piecewise_lipschitz_bound(f, kept, 1, matrix=M)
    lb = lipschitz_bound(f)

    classification = None
    note = ""
    certs: list[PeriodicCertificate] = []
    if classify:
        if not M.covering:
            note = "matrix criteria inapplicable: covering property fails"
        elif expansion <= 1e-12:
            note = ("matrix criteria inapplicable: a symbolic cycle does not "
                    "expand arclength")
        else:
            try:
                certs = dense_periodic_certificates(f, resolution, targets_per_piece)
                dense = True
            except (InvariantError, GraphError) as exc:
                dense = False
                note = "periodic certificates incomplete: %s" % exc
            classification = {
                "transitive": irr,
                "totally_transitive": prim,
                "exact": prim,
                "dense_periodic": dense,
                "devaney": irr and dense,
                "exactly_devaney": prim and dense,
            }
    bowen = None
    if run_bowen:
        bowen = bowen_estimate(f, eps_list=eps_list, n_max=n_max, budget=budget)
    return EntropyReport(
        name=f.name, meta=dict(getattr(f, "meta", {})),
        labels=list(M.labels), matrix=[list(r) for r in M.m],
        covering=M.covering, irreducible=irr, period=per, primitive=prim,
        expansion_margin=expansion,
        perron_entropy=h, perron_error=herr, lipschitz_bound=lb,
        kept=[f.piece(i).name for i in kept], frequency=freq,
        piecewise_bound=pb, piecewise_bound_single_factor=pb1,
        profile={f.piece(i).name: speeds[i] for i in range(f.n_pieces())},
        classification=classification, classification_note=note,
        certificates=certs, bowen=bowen)
