"""Transition structure of a piecewise Markov map and its invariants.

Two directed graphs are derived from a map: the piece-level transition
matrix (an edge A -> B whenever the image of A meets the interior of B) and
the finer lap-level matrix (one vertex per maximal monotone run).  The
piece matrix drives the classification and frequency computations; the lap
matrix is the exact entropy oracle for covering Markov maps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .graph import GraphError, _merge_intervals, _is_boundary_point
from .markov import InvariantError, PLMarkovMap


class TransitionMatrix:
    """0/1 matrix over named states, with the covering flag
    (true iff every edge A -> B has f(A) containing all of B)."""

    def __init__(self, rows: Sequence[Sequence[int]], labels: Sequence[str] | None = None,
                 covering: bool = False):
        self.m: tuple[tuple[int, ...], ...] = tuple(tuple(int(bool(x)) for x in r) for r in rows)
        n = len(self.m)
        if any(len(r) != n for r in self.m):
            raise GraphError("transition matrix must be square")
        self.labels: tuple[str, ...] = tuple(labels) if labels is not None else tuple(
            str(i) for i in range(n))
        self.covering = covering

    @property
    def n(self) -> int:
        return len(self.m)

    def successors(self, i: int) -> list[int]:
        return [j for j, x in enumerate(self.m[i]) if x]

    def rows_nonzero(self) -> bool:
        return all(any(r) for r in self.m)

    def grid(self) -> str:
        return "\n".join(" ".join(str(x) for x in r) for r in self.m)

    def __repr__(self):
        return "TransitionMatrix(%d states, covering=%s)" % (self.n, self.covering)


def _image_cover(f: PLMarkovMap, i: int) -> dict[str, list[tuple[Fraction, Fraction]]]:
    cover: dict[str, list] = {}
    for seg in f.image_path(i).segments:
        cover.setdefault(seg.edge, []).append((seg.lo(), seg.hi()))
    return {e: _merge_intervals(iv) for e, iv in cover.items()}


def transition_matrix(f: PLMarkovMap) -> TransitionMatrix:
    """Piece-level transition matrix: entry (A, B) is 1 iff the image of A
    intersects the interior of B (decided exactly on segment intervals).
    Cached on the (immutable) map."""
    cached = getattr(f, "_matrix_cache", None)
    if cached is not None:
        return cached
    g = f.graph
    n = f.n_pieces()
    rows = [[0] * n for _ in range(n)]
    covering = True
    covers = [_image_cover(f, i) for i in range(n)]
    for i in range(n):
        for j, b in enumerate(f.splitting.pieces):
            hit = False
            # positive-length overlap
            for e_id in b.edge_ids():
                if e_id not in covers[i]:
                    continue
                for lo1, hi1 in covers[i][e_id]:
                    for lo2, hi2 in b.intervals_on(e_id):
                        if min(hi1, hi2) > max(lo1, lo2):
                            hit = True
            if not hit:
                # isolated touch at an interior point of B
                for e_id in b.edge_ids():
                    if e_id not in covers[i]:
                        continue
                    for lo1, hi1 in covers[i][e_id]:
                        for lo2, hi2 in b.intervals_on(e_id):
                            lo, hi = max(lo1, lo2), min(hi1, hi2)
                            if lo == hi:
                                p = g.point(e_id, lo)
                                if not _is_boundary_point(g, b, p):
                                    hit = True
            if hit:
                rows[i][j] = 1
                if not _contains_piece(covers[i], b):
                    covering = False
    M = TransitionMatrix(rows, labels=f.piece_names(), covering=covering)
    if not M.rows_nonzero():
        raise InvariantError("a piece has no transition: image degenerate?")
    f._matrix_cache = M
    return M


def _contains_piece(cover: dict, piece) -> bool:
    for e_id in piece.edge_ids():
        ivals = cover.get(e_id, [])
        for lo, hi in piece.intervals_on(e_id):
            if not any(l <= lo and hi <= h for l, h in ivals):
                return False
    return True


def lap_matrix(f: PLMarkovMap) -> TransitionMatrix:
    """Lap-level Markov matrix: one vertex per monotone lap; a lap mapping
    onto piece B points to every lap of B.  Spectral radius of this matrix
    is the entropy oracle for covering Markov maps."""
    laps = f.laps()
    by_piece: dict[int, list[int]] = {}
    for k, lap in enumerate(laps):
        by_piece.setdefault(lap.piece, []).append(k)
    n = len(laps)
    rows = [[0] * n for _ in range(n)]
    for k, lap in enumerate(laps):
        for j in by_piece[lap.target]:
            rows[k][j] = 1
    labels = ["%s/%d" % (f.piece(l.piece).name, i)
              for i, l in enumerate(laps)]
    return TransitionMatrix(rows, labels=labels, covering=True)


# -- digraph invariants ------------------------------------------------------


def _reach(m, start: int, reverse=False) -> set[int]:
    n = len(m)
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in range(n):
            x = m[v][u] if reverse else m[u][v]
            if x and v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def is_irreducible(M: TransitionMatrix) -> bool:
    n = M.n
    if n == 0:
        return False
    return len(_reach(M.m, 0)) == n and len(_reach(M.m, 0, reverse=True)) == n


def period(M: TransitionMatrix) -> int:
    """gcd of cycle lengths of an irreducible transition digraph."""
    if not is_irreducible(M):
        raise GraphError("period is defined for irreducible matrices only")
    level = {0: 0}
    queue = [0]
    g = 0
    while queue:
        u = queue.pop(0)
        for v in M.successors(u):
            if v not in level:
                level[v] = level[u] + 1
                queue.append(v)
            else:
                g = math.gcd(g, level[u] + 1 - level[v])
    return abs(g)


def is_primitive(M: TransitionMatrix) -> bool:
    return is_irreducible(M) and period(M) == 1


def strongly_connected_components(m) -> list[list[int]]:
    """Kosaraju's algorithm; components in reverse topological order."""
    n = len(m)
    order: list[int] = []
    seen = [False] * n
    for s in range(n):
        if seen[s]:
            continue
        stack = [(s, 0)]
        seen[s] = True
        while stack:
            u, it = stack.pop()
            adv = False
            for v in range(it, n):
                if m[u][v] and not seen[v]:
                    stack.append((u, v + 1))
                    stack.append((v, 0))
                    seen[v] = True
                    adv = True
                    break
            if not adv:
                order.append(u)
    comp = [-1] * n
    comps: list[list[int]] = []
    for s in reversed(order):
        if comp[s] != -1:
            continue
        cur = [s]
        comp[s] = len(comps)
        stack = [s]
        while stack:
            u = stack.pop()
            for v in range(n):
                if m[v][u] and comp[v] == -1:
                    comp[v] = comp[s]
                    cur.append(v)
                    stack.append(v)
        comps.append(sorted(cur))
    return comps


def perron_root(M: TransitionMatrix | Sequence[Sequence[int]],
                tol: float = 1e-10) -> tuple[float, float]:
    """Spectral radius of a nonnegative integer matrix with a certified
    absolute error bound, via Collatz-Wielandt bracketing of A + I on each
    strongly connected component."""
    m = M.m if isinstance(M, TransitionMatrix) else tuple(tuple(r) for r in M)
    best = 0.0
    err = 1e-12
    for comp in strongly_connected_components(m):
        if len(comp) == 1:
            u = comp[0]
            if not m[u][u]:
                continue
        sub = np.array([[m[u][v] for v in comp] for u in comp], dtype=np.float64)
        np.fill_diagonal(sub, sub.diagonal() + 1.0)
        x = np.ones(len(comp))
        lo, hi = 0.0, float("inf")
        for _ in range(200000):
            y = sub @ x
            ratios = y / x
            lo, hi = float(ratios.min()), float(ratios.max())
            if hi - lo < tol:
                break
            x = y / y.max()
        val = (lo + hi) / 2.0 - 1.0
        e = (hi - lo) / 2.0 + 1e-12
        if val > best:
            best, err = val, e
    return best, err


def matrix_power_trace(M: TransitionMatrix, n: int) -> int:
    """trace(M^n) with exact integer arithmetic: a lower bound on the number
    of fixed points of the n-th iterate for covering Markov maps."""
    if not M.covering:
        raise InvariantError("periodic-orbit counts need the covering property")
    if n < 1:
        raise GraphError("n must be positive")
    a = np.array(M.m, dtype=object)
    out = np.eye(M.n, dtype=object)
    p = a
    k = n
    while k:
        if k & 1:
            out = out @ p
        p = p @ p
        k >>= 1
    return int(np.trace(out))


periodic_count_lower_bound = matrix_power_trace


# -- excursion frequency (max mean cycle) -------------------------------------


@dataclass(frozen=True)
class FrequencySpec:
    """Maximal asymptotic fraction of time admissible paths spend outside a
    kept piece subset, with a witnessing cycle."""

    kept: frozenset[int]
    value: Fraction
    witness: tuple[int, ...]


def _vertex_weights(M: TransitionMatrix, kept) -> list[int]:
    kept = set(kept)
    for i in kept:
        if not 0 <= i < M.n:
            raise GraphError("kept subset contains invalid index %r" % i)
    return [0 if v in kept else 1 for v in range(M.n)]


def max_outside_frequency(M: TransitionMatrix, kept) -> FrequencySpec:
    """Exact maximum over directed cycles of (vertices outside ``kept``) /
    (cycle length), computed per strongly connected component by Karp's
    algorithm; the witness is the shortest optimal cycle, ties broken by
    lowest starting vertex with lowest-index predecessors."""
    w = _vertex_weights(M, kept)
    best: Fraction | None = None
    per_comp: list[tuple[list[int], Fraction]] = []
    for comp in strongly_connected_components(M.m):
        if len(comp) == 1 and not M.m[comp[0]][comp[0]]:
            continue
        mu = _karp_max_mean(M.m, comp, w)
        per_comp.append((comp, mu))
        if best is None or mu > best:
            best = mu
    if best is None:
        raise GraphError("transition graph has no cycle")
    starts = sorted(v for comp, mu in per_comp if mu == best for v in comp)
    witness = _optimal_cycle_witness(M.m, w, best, starts)
    return FrequencySpec(kept=frozenset(kept), value=best, witness=witness)


def _karp_max_mean(m, comp: list[int], w: list[int]) -> Fraction:
    n = len(comp)
    pos = {v: i for i, v in enumerate(comp)}
    NEG = None
    D = [[NEG] * n for _ in range(n + 1)]
    D[0][pos[comp[0]]] = 0
    for k in range(1, n + 1):
        for v in comp:
            acc = NEG
            for u in comp:
                if m[u][v] and D[k - 1][pos[u]] is not None:
                    cand = D[k - 1][pos[u]] + w[v]
                    if acc is None or cand > acc:
                        acc = cand
            D[k][pos[v]] = acc
    best = None
    for v in comp:
        if D[n][pos[v]] is None:
            continue
        worst = None
        for k in range(n):
            if D[k][pos[v]] is None:
                continue
            r = Fraction(D[n][pos[v]] - D[k][pos[v]], n - k)
            if worst is None or r < worst:
                worst = r
        if worst is not None and (best is None or worst > best):
            best = worst
    assert best is not None
    return best


def _optimal_cycle_witness(m, w: list[int], mu: Fraction,
                           starts: list[int]) -> tuple[int, ...]:
    """Shortest cycle with mean exactly mu in the weight-shifted digraph
    (all cycles have nonpositive shifted weight; optimal ones have zero).
    A cycle of mean p/q in lowest terms has length a multiple of q, so the
    search stops early once a length-q witness is found."""
    n = len(m)
    shifted = [Fraction(w[v]) - mu for v in range(n)]
    min_len = mu.denominator
    best_len = None
    best_cycle = None
    for s in starts:
        if best_len == min_len:
            break
        cap = best_len - 1 if best_len is not None else n
        parent = [[-1] * n for _ in range(cap + 1)]
        dists = [[None] * n for _ in range(cap + 1)]
        dists[0][s] = Fraction(0)
        for l in range(1, cap + 1):
            for v in range(n):
                acc, par = None, -1
                for u in range(n):
                    if m[u][v] and dists[l - 1][u] is not None:
                        cand = dists[l - 1][u] + shifted[v]
                        if acc is None or cand > acc:
                            acc, par = cand, u
                dists[l][v] = acc
                parent[l][v] = par
            if dists[l][s] == 0:
                cyc = []
                v, k = s, l
                while k > 0:
                    cyc.append(v)
                    v = parent[k][v]
                    k -= 1
                cyc.reverse()
                best_len, best_cycle = l, tuple(cyc)
                break
    assert best_cycle is not None
    total_out = sum(w[v] for v in best_cycle)
    assert Fraction(total_out, len(best_cycle)) == mu
    return best_cycle


def outside_count_dp(M: TransitionMatrix, kept, n: int) -> Fraction:
    """Exact maximum fraction of out-of-subset vertices over all admissible
    paths on n vertices (layered dynamic program, the independent oracle for
    the cycle-based frequency)."""
    if n < 1:
        raise GraphError("n must be positive")
    w = _vertex_weights(M, kept)
    D = list(w)
    for _ in range(n - 1):
        ND = [None] * M.n
        for v in range(M.n):
            acc = None
            for u in range(M.n):
                if M.m[u][v] and D[u] is not None:
                    if acc is None or D[u] > acc:
                        acc = D[u]
            ND[v] = None if acc is None else acc + w[v]
        D = ND
    vals = [d for d in D if d is not None]
    if not vals:
        raise GraphError("no admissible path of length %d" % n)
    return Fraction(max(vals), n)


def outside_frequency_dp_limit(M: TransitionMatrix, kept, n_max: int | None = None) -> Fraction:
    """Identify the limit of the DP fractions from eventual periodicity of
    the maximal out-counts: once k_{n+c} - k_n is constant over a trailing
    window for some cycle length c <= n_states, the limit is that slope."""
    w = _vertex_weights(M, kept)
    V = M.n
    N = n_max if n_max is not None else 8 * V
    while True:
        counts = [0] * (N + 1)
        D = list(w)
        counts[1] = max(D)
        for n in range(2, N + 1):
            ND = [None] * V
            for v in range(V):
                acc = None
                for u in range(V):
                    if M.m[u][v] and D[u] is not None:
                        if acc is None or D[u] > acc:
                            acc = D[u]
                ND[v] = None if acc is None else acc + w[v]
            D = ND
            counts[n] = max(d for d in D if d is not None)
        for c in range(1, V + 1):
            tail = max(1, N - 2 * V)
            if N - c < tail:
                continue
            delta = counts[N] - counts[N - c]
            if all(counts[n + c] - counts[n] == delta for n in range(tail, N - c + 1)):
                return Fraction(delta, c)
        if N >= 64 * V:
            raise GraphError("DP fractions did not stabilize up to n=%d" % N)
        N *= 2


def max_cycle_log_expansion(M: TransitionMatrix, speeds: Sequence[Fraction]) -> float:
    """Maximum over cycles of the mean log stretch (the fastest sustainable
    expansion rate along admissible symbol sequences)."""
    neg = [Fraction(1) / s for s in speeds]
    return -min_cycle_log_expansion(M, neg)


def min_cycle_log_expansion(M: TransitionMatrix, speeds: Sequence[Fraction]) -> float:
    """Minimum over cycles of the mean log stretch: positive iff every
    symbolic cycle expands arclength, the hypothesis under which small arcs
    grow to full pieces."""
    logs = [math.log(float(s)) for s in speeds]
    best = None
    for comp in strongly_connected_components(M.m):
        if len(comp) == 1 and not M.m[comp[0]][comp[0]]:
            continue
        mu = _karp_min_mean_float(M.m, comp, logs)
        if best is None or mu < best:
            best = mu
    if best is None:
        raise GraphError("transition graph has no cycle")
    return best


def _karp_min_mean_float(m, comp: list[int], w: list[float]) -> float:
    n = len(comp)
    pos = {v: i for i, v in enumerate(comp)}
    D = [[None] * n for _ in range(n + 1)]
    D[0][pos[comp[0]]] = 0.0
    for k in range(1, n + 1):
        for v in comp:
            acc = None
            for u in comp:
                if m[u][v] and D[k - 1][pos[u]] is not None:
                    cand = D[k - 1][pos[u]] + w[v]
                    if acc is None or cand < acc:
                        acc = cand
            D[k][pos[v]] = acc
    best = None
    for v in comp:
        if D[n][pos[v]] is None:
            continue
        worst = None
        for k in range(n):
            if D[k][pos[v]] is None:
                continue
            r = (D[n][pos[v]] - D[k][pos[v]]) / (n - k)
            if worst is None or r > worst:
                worst = r
        if worst is not None and (best is None or worst < best):
            best = worst
    assert best is not None
    return best
