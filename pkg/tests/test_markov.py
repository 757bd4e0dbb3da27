import random
from fractions import Fraction as F

import pytest

from entrolab import (GraphPoint, InvariantError, PLMarkovMap, Piece, Segment,
                      Splitting, star_graph, tent_family, two_piece_swap,
                      transition_matrix)
from entrolab.constructions import arr_example, star_devaney, star_exact
from entrolab.verify import construction_family


def _pt(f, x):
    return f.graph.point("e0", F(x))


def test_tent2_evaluate():
    f = tent_family(2)
    assert f.evaluate(_pt(f, F(1, 4))) == _pt(f, F(1, 2))
    assert f.evaluate(_pt(f, F(2, 3))) == _pt(f, F(2, 3))  # fixed point


def test_tent3_evaluate_midpoint():
    f = tent_family(3)
    assert f.evaluate(_pt(f, F(1, 2))) == _pt(f, F(1, 2))


def test_iterate_identity_and_composition():
    f = tent_family(2)
    x = _pt(f, F(1, 5))
    assert f.iterate(x, 0) == x
    # 1/5 -> 2/5 -> 4/5 by composing the two affine branches by hand
    assert f.iterate(x, 2) == _pt(f, F(4, 5))


def test_swap_second_iterate_returns_to_piece():
    f = two_piece_swap("dendrite-pair", 2)
    rng = random.Random(3)
    for _ in range(20):
        x = f.graph.point("d0", F(rng.randint(1, 15), 16))
        y = f.iterate(x, 2)
        i = f.splitting.locate(x)
        assert f.piece(i).contains_point(f.graph, y)


def test_lipschitz_profile_tent():
    f = tent_family(2)
    assert set(f.lipschitz_profile().values()) == {F(2)}


def test_lipschitz_profile_isometric_arms():
    f = star_devaney(3, 2)
    prof = f.lipschitz_profile()
    assert prof["X1"] == 1 and prof["X2"] == 1
    assert prof["X0"] == 2 and prof["X3"] == 2


def test_lipschitz_profile_arr_ratio():
    f = arr_example(6)
    lam = f.meta["lam"]
    prof = f.lipschitz_profile()
    assert prof["X1p"] == lam
    for i in range(2, 5):
        assert prof["X%d" % i] == lam
    assert abs(float(lam) - 2 ** (1 / 4)) < 1e-5
    assert prof["X0"] == 1 and prof["X1m"] == 1


def test_metric_contract_per_piece():
    rng = random.Random(11)
    for f in construction_family():
        g = f.graph
        prof = f.lipschitz_profile()
        gl = f.global_lipschitz()
        for i in range(f.n_pieces()):
            dom = f.domain_chart(i)
            L = prof[f.piece(i).name]
            for _ in range(5):
                t1 = dom.total * F(rng.randint(0, 64), 64)
                t2 = dom.total * F(rng.randint(0, 64), 64)
                p, q = dom.point_at(t1), dom.point_at(t2)
                d = g.distance(p, q)
                dd = g.distance(f.evaluate(p), f.evaluate(q))
                assert dd <= L * d
                assert dd <= gl * d


def test_continuity_at_boundary_points():
    for f in construction_family():
        for p in f.boundary:
            vals = {f._evaluate_in_piece(i, p)
                    for i in f.splitting.pieces_containing(p)}
            assert len(vals) == 1


def test_boundary_forward_invariant():
    for f in construction_family():
        pset = set(f.boundary)
        for p in f.boundary:
            assert f.evaluate(p) in pset


def test_discontinuous_map_rejected():
    g = star_graph(2)
    pieces = [Piece("A", [Segment("arm0", F(0), F(1))]),
              Piece("B", [Segment("arm1", F(0), F(1))])]
    s = Splitting(g, pieces, [GraphPoint.at_vertex("a")])
    # A sends the center to arm1's tip, B fixes it: discontinuity at a
    images = {"A": [Segment("arm1", F(1), F(0))],
              "B": [Segment("arm0", F(0), F(1))]}
    with pytest.raises(InvariantError):
        PLMarkovMap(s, images)


def test_itinerary_tent_third():
    f = tent_family(2)
    it = f.itinerary(_pt(f, F(1, 3)), 3)
    assert it.pieces == (0, 1, 1)


def test_itinerary_fixed_origin_constant():
    f = tent_family(2)
    it = f.itinerary(f.graph.point("e0", 0), 4)
    assert it.pieces == (0, 0, 0, 0)


def test_itinerary_star_center_cycles():
    f = star_devaney(3, 2)
    it = f.itinerary(GraphPoint.at_vertex("a"), 5)
    assert it.pieces == (0, 1, 2, 3, 0)


def test_itinerary_star_interior_arm_cycles():
    f = star_devaney(3, 2)
    x = f.graph.point("arm1", F(1, 3))
    it = f.itinerary(x, 4)
    assert it.pieces == (1, 2, 3, 0)


def test_itinerary_admissible_and_pointwise():
    rng = random.Random(5)
    for f in (tent_family(3), star_exact(3, 2), arr_example(4)):
        M = transition_matrix(f)
        for _ in range(10):
            e = rng.choice(f.graph.edges)
            x = f.graph.point(e.id, e.length * F(rng.randint(0, 32), 32))
            n = 12
            it = f.itinerary(x, n)
            orbit = f.orbit(x, n)
            for a, b in zip(it.pieces, it.pieces[1:]):
                assert M.m[a][b] == 1
            for i, a in enumerate(it.pieces):
                assert f.piece(a).contains_point(f.graph, orbit[i])


def test_laps_tent():
    f = tent_family(2)
    laps = f.laps()
    assert len(laps) == 4
    assert {(l.piece, l.target) for l in laps} == {(0, 0), (0, 1), (1, 0), (1, 1)}


def test_laps_are_markov_for_all_constructions():
    for f in construction_family():
        laps = f.laps()
        assert laps
        for lap in laps:
            assert 0 <= lap.target < f.n_pieces()
            assert lap.t1 > lap.t0
