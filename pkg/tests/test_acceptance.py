"""Acceptance suite: one test per acceptance criterion, each printing a
single PASS line (run with ``pytest tests/test_acceptance.py -v -s``).
"""

import math
import random
import time
from fractions import Fraction as F
from itertools import combinations

from entrolab import (arr_example, free_arc_cycle, is_primitive, lap_matrix,
                      max_outside_frequency, outside_count_dp,
                      outside_frequency_dp_limit, perron_root, star_devaney,
                      star_exact, star_minimal, tent_family, transition_matrix,
                      two_piece_swap)
from entrolab.entropy import (bowen_estimate, devaney_report, perron_entropy,
                              piecewise_lipschitz_bound, separated_bound_check)
from entrolab.verify import (construction_family, random_metric_graph,
                             random_row_nonzero_matrix)

LOG2 = math.log(2)


def test_criterion_1_tent_calibration():
    start = time.monotonic()
    f = tent_family(2)
    h, herr = perron_entropy(f)
    assert abs(h - LOG2) <= 1e-9
    br = bowen_estimate(f, eps_list=[F(1, 16), F(1, 32), F(1, 64), F(1, 128)],
                        n_max=14, grid_divisor=4, budget=200_000)
    assert 0.62 <= br.estimate <= 0.77, br.estimate
    elapsed = time.monotonic() - start
    assert elapsed < 60.0
    print("[PASS] criterion 1: tent calibration: perron=%.12f (=log 2), "
          "bowen=%.4f in [0.62, 0.77], %.1fs < 60s" % (h, br.estimate, elapsed))


def test_criterion_2_star_minimal_table_row():
    for n in range(2, 11):
        h, _ = perron_entropy(star_minimal(n))
        assert abs(h - LOG2 / n) <= 1e-9, n
    print("[PASS] criterion 2: star_minimal(n) entropy = (1/n) log 2 "
          "within 1e-9 for n = 2..10 (n=2 is the interval value)")


def test_criterion_3_small_entropy_trend():
    start = time.monotonic()
    hs = []
    for k in range(2, 33):
        f = star_exact(k, 2)
        rho, err = perron_root(lap_matrix(f))
        h = math.log(rho)
        hs.append(h)
        assert is_primitive(transition_matrix(f)), k
        assert k * h <= 3 * LOG2 + 1e-9, (k, k * h)
    assert all(a > b for a, b in zip(hs, hs[1:]))
    elapsed = time.monotonic() - start
    assert elapsed < 120.0
    print("[PASS] criterion 3: star_exact(k,2) entropy strictly decreasing, "
          "k*h <= 3 log 2 (max %.4f), exact for k = 2..32, %.1fs < 120s"
          % (max(k * h for k, h in zip(range(2, 33), hs)), elapsed))


def _kept_subsets(f, rng):
    n = f.n_pieces()
    if n <= 6:
        out = []
        for size in range(1, n + 1):
            out.extend(combinations(range(n), size))
        return out
    out = [f.default_kept, tuple(range(n))]
    for _ in range(25):
        size = rng.randint(1, n)
        out.append(tuple(sorted(rng.sample(range(n), size))))
    return out


def test_criterion_4_bound_soundness():
    rng = random.Random(20250810)
    checked = 0
    for f in construction_family(heavy=True):
        h, _ = perron_entropy(f)
        M = transition_matrix(f)
        bounds = []
        for kept in _kept_subsets(f, rng):
            pw = piecewise_lipschitz_bound(f, kept, matrix=M)
            assert h <= pw + 1e-9, (f.name, kept, h, pw)
            bounds.append(pw)
            checked += 1
        f.meta["_min_bound"] = min(bounds)
    for f in construction_family():
        br = bowen_estimate(f, budget=80_000)
        M = transition_matrix(f)
        rng2 = random.Random(77)
        for kept in _kept_subsets(f, rng2):
            pw = piecewise_lipschitz_bound(f, kept, matrix=M)
            assert br.estimate <= pw + 0.03, (f.name, kept, br.estimate, pw)
    print("[PASS] criterion 4: perron <= piecewise bound + 1e-9 on %d "
          "(construction, kept-subset) pairs; bowen <= bound + 0.03 on the "
          "construction family" % checked)


def test_criterion_5_frequency_oracle_equivalence():
    for f in construction_family(heavy=True):
        M = transition_matrix(f)
        th = max_outside_frequency(M, f.default_kept)
        assert th.value == outside_frequency_dp_limit(M, f.default_kept), f.name
    for k in range(2, 11):
        f = star_exact(k, 2)
        M = transition_matrix(f)
        th = max_outside_frequency(M, f.default_kept)
        assert th.value == F(2, k)
        assert th.value <= F(2, k - 1)
    rng = random.Random(55555)
    for t in range(500):
        M = random_row_nonzero_matrix(rng, max_n=8)
        kept = frozenset(i for i in range(M.n) if rng.random() < 0.5)
        if len(kept) == M.n:
            kept = frozenset(sorted(kept)[:-1])
        th = max_outside_frequency(M, kept)
        dp = outside_frequency_dp_limit(M, kept, n_max=8 * M.n)
        assert th.value == dp, t
        n = 8 * M.n
        kn = outside_count_dp(M, kept, n)
        assert abs(kn - th.value) <= F(M.n, n)
        out = sum(1 for v in th.witness if v not in kept)
        assert F(out, len(th.witness)) == th.value
    print("[PASS] criterion 5: max-mean-cycle frequency equals the DP-oracle "
          "limit exactly on all constructions and 500 random digraphs "
          "(<= 8 states); star family reproduces 2/k <= 2/(k-1)")


def test_criterion_6_arc_loop_family_bound():
    rows = []
    for n in range(3, 25):
        f = arr_example(n)
        M = transition_matrix(f)
        th = max_outside_frequency(M, f.default_kept)
        assert th.value <= F(2, n), n
        L = max(float(s) for s in f.lipschitz_profile().values())
        bound = piecewise_lipschitz_bound(f, frequency_factor=1, matrix=M)
        ceiling = math.log(2 * L * L) / (n - 2)
        assert bound <= ceiling + 1e-12, (n, bound, ceiling)
        h, _ = perron_entropy(f)
        assert h <= piecewise_lipschitz_bound(f, matrix=M) + 1e-9
        rows.append((n, bound, ceiling))
    bounds = [b for _n, b, _c in rows]
    assert all(a > b for a, b in zip(bounds[1:], bounds[2:]))  # decreasing from n=4
    assert bounds[-1] < bounds[0] / 2.5
    print("[PASS] criterion 6: arr_example(n) frequency <= 2/n and reported "
          "bound <= log(2 L^2)/(n-2) for n = 3..24, decreasing %.4f -> %.4f"
          % (bounds[0], bounds[-1]))


def test_criterion_7_dichotomy_classifications():
    res = F(1, 1000)
    for f, expect_period in ((two_piece_swap("circle", 3), 2),
                             (two_piece_swap("dendrite-pair", 2), 2),
                             (star_devaney(3, 2), 4)):
        rep = devaney_report(f, run_bowen=False, resolution=res)
        c = rep.classification
        assert c["transitive"] and c["devaney"]
        assert not c["totally_transitive"] and not c["exact"]
        assert rep.irreducible and not rep.primitive
        assert rep.period == expect_period
    for f in (star_exact(3, 2), tent_family(2)):
        rep = devaney_report(f, run_bowen=False, resolution=res)
        c = rep.classification
        assert c["exact"] and c["exactly_devaney"]
        pieces_with_cert = {cert.piece for cert in rep.certificates}
        assert pieces_with_cert == set(f.piece_names())
        for cert in rep.certificates:
            assert f.iterate(cert.point, cert.period) == cert.point
            assert f.graph.distance(cert.point, cert.target) <= res
    print("[PASS] criterion 7: swap and cyclic-star maps are Devaney chaotic "
          "but not totally transitive (periods 2, 2, 4); star_exact and tent "
          "are exact with verified periodic points within 1e-3 in every piece")


def test_criterion_8_separated_bound_random_graphs():
    rng = random.Random(808)
    graphs = 0
    while graphs < 100:
        g = random_metric_graph(rng, max_edges=10)
        diam = g.diameter_lower_bound()
        total = g.total_length()
        eps_list = []
        for frac in (F(1, 3), F(1, 8)):
            eps = diam * frac
            if eps > 0:
                eps_list.append(eps)
        spacing_floor = total / 250
        for eps in eps_list:
            checks = separated_bound_check(
                g, [eps], spacing_divisor=1 if eps / 4 < spacing_floor else 4)
            assert checks[0]["ok"], (graphs, checks)
        graphs += 1
    print("[PASS] criterion 8: greedy separated counts within 2*length/eps "
          "on 100 random metric graphs x 2 eps values")


def test_criterion_9_itinerary_soundness():
    systems = [tent_family(2), star_devaney(3, 2), star_exact(3, 2),
               star_minimal(4), two_piece_swap("dendrite-pair", 2),
               arr_example(5), free_arc_cycle(3, True)]
    rng = random.Random(909)
    n = 50
    total = 0
    for f in systems:
        M = transition_matrix(f)
        g = f.graph
        for _ in range(1000):
            e = rng.choice(g.edges)
            x = g.point(e.id, e.length * F(rng.randint(0, 997), 997))
            it = f.itinerary(x, n)
            orbit = f.orbit(x, n)
            for a, b in zip(it.pieces, it.pieces[1:]):
                assert M.m[a][b] == 1
            for i, a in enumerate(it.pieces):
                assert f.piece(a).contains_point(g, orbit[i])
            total += 1
    print("[PASS] criterion 9: %d random itineraries (n=50) across %d "
          "constructions are admissible and pointwise correct"
          % (total, len(systems)))
