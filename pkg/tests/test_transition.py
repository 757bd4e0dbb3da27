import math
import random
from fractions import Fraction as F

import pytest

from entrolab import (TransitionMatrix, arr_example, is_irreducible,
                      is_primitive, lap_matrix, matrix_power_trace,
                      max_outside_frequency, outside_count_dp,
                      outside_frequency_dp_limit, period, perron_root,
                      star_devaney, star_exact, tent_family, transition_matrix,
                      two_piece_swap)
from entrolab.graph import GraphError
from entrolab.markov import InvariantError
from entrolab.verify import random_row_nonzero_matrix


def test_transition_matrix_tent():
    M = transition_matrix(tent_family(2))
    assert M.m == ((1, 1), (1, 1))
    assert M.covering


def test_transition_matrix_swap():
    M = transition_matrix(two_piece_swap("dendrite-pair", 2))
    assert M.m == ((0, 1), (1, 0))
    assert M.covering


def test_transition_matrix_star_exact_has_chord():
    f = star_exact(4, 2)
    M = transition_matrix(f)
    # cycle X0->X1->...->X4->X0 plus the chord X0->X2
    assert M.m[0][1] == 1 and M.m[0][2] == 1
    for i in range(1, 5):
        succ = [j for j in range(5) if M.m[i][j]]
        assert succ == [(i + 1) % 5]
    assert M.covering


@pytest.mark.parametrize("rows,expect", [
    ([[0, 1], [1, 0]], True),
    ([[1, 0], [0, 1]], False),
    ([[1, 1], [0, 1]], False),
])
def test_is_irreducible(rows, expect):
    assert is_irreducible(TransitionMatrix(rows)) is expect


def test_period_examples():
    assert period(TransitionMatrix([[0, 1], [1, 0]])) == 2
    assert period(TransitionMatrix([[1, 1], [1, 1]])) == 1
    with pytest.raises(GraphError):
        period(TransitionMatrix([[1, 0], [0, 1]]))


def test_period_star_exact_coprime_cycles():
    for k in (2, 3, 5):
        M = transition_matrix(star_exact(k, 2))
        assert period(M) == 1
        assert is_primitive(M)


def test_star_devaney_pure_cycle_not_primitive():
    for k in (2, 4):
        M = transition_matrix(star_devaney(k, 2))
        assert is_irreducible(M)
        assert period(M) == k + 1
        assert not is_primitive(M)


def test_primitive_examples():
    assert is_primitive(TransitionMatrix([[1, 1], [1, 0]]))
    assert not is_primitive(TransitionMatrix([[0, 1], [1, 0]]))


def test_wielandt_power_positivity():
    # primitive matrices have a fully positive power by n <= (n0-1)^2 + 1
    rng = random.Random(42)
    found = 0
    while found < 40:
        M = random_row_nonzero_matrix(rng, max_n=6)
        if not is_primitive(M):
            continue
        found += 1
        n0 = M.n
        cap = (n0 - 1) ** 2 + 1
        a = [[1 if i == j else 0 for j in range(n0)] for i in range(n0)]
        ok = False
        for _ in range(cap):
            a = [[min(1, sum(a[i][k] * M.m[k][j] for k in range(n0)))
                  for j in range(n0)] for i in range(n0)]
            if all(all(row) for row in a):
                ok = True
                break
        assert ok


def test_perron_examples():
    r, err = perron_root(TransitionMatrix([[1, 1], [1, 1]]))
    assert abs(r - 2) <= err + 1e-9
    r, err = perron_root(TransitionMatrix([[1, 1], [1, 0]]))
    assert abs(r - (1 + math.sqrt(5)) / 2) <= err + 1e-9
    # pure cycle
    r, err = perron_root(TransitionMatrix([[0, 1, 0], [0, 0, 1], [1, 0, 0]]))
    assert abs(r - 1) <= err + 1e-9


def test_perron_power_consistency():
    M = transition_matrix(star_exact(3, 2))
    r1, _ = perron_root(M)
    m2 = [[sum(M.m[i][k] * M.m[k][j] for k in range(M.n)) for j in range(M.n)]
          for i in range(M.n)]
    r2, _ = perron_root(m2)
    assert abs(math.log(r2) - 2 * math.log(r1)) < 1e-7


def test_trace_counts():
    t2 = tent_family(2)
    M = transition_matrix(t2)
    # cross-checked against the bisection oracle for fixed points of the
    # third iterate: exactly 8 solutions of f^3(x) = x
    assert matrix_power_trace(M, 3) == 8
    Ms = transition_matrix(two_piece_swap("dendrite-pair", 2))
    assert matrix_power_trace(Ms, 1) == 0
    assert matrix_power_trace(Ms, 2) == 2


def test_trace_requires_covering():
    M = TransitionMatrix([[1, 1], [1, 1]], covering=False)
    with pytest.raises(InvariantError):
        matrix_power_trace(M, 2)


def test_bisection_oracle_fixed_points_of_third_iterate():
    f = tent_family(2)
    g = f.graph

    def param(p):
        if p.is_vertex():
            return F(0) if p.vertex == "v0" else F(1)
        return p.offset

    # the third iterate is affine between multiples of 1/8; a grid that
    # refines those breakpoints makes every sign-change cell affine, so the
    # root is exact linear interpolation
    N = 768
    vals = [(F(j, N), param(f.iterate(g.point("e0", F(j, N)), 3)) - F(j, N))
            for j in range(N + 1)]
    roots = set()
    for (x0, d0), (x1, d1) in zip(vals, vals[1:]):
        if d0 == 0:
            roots.add(x0)
        if d1 == 0:
            roots.add(x1)
        if d0 * d1 < 0:
            root = x0 - d0 * (x1 - x0) / (d1 - d0)
            assert param(f.iterate(g.point("e0", root), 3)) == root
            roots.add(root)
    assert len(roots) == 8


# -- excursion frequency ----------------------------------------------------------


def test_theta_all_kept_is_zero():
    M = transition_matrix(tent_family(2))
    th = max_outside_frequency(M, (0, 1))
    assert th.value == 0


def test_theta_cycle_single_outside():
    for k in (2, 4, 6):
        rows = [[1 if j == (i + 1) % (k + 1) else 0 for j in range(k + 1)]
                for i in range(k + 1)]
        M = TransitionMatrix(rows)
        th = max_outside_frequency(M, frozenset(range(1, k + 1)))
        assert th.value == F(1, k + 1)
        assert len(th.witness) == k + 1


def test_theta_star_exact_two_over_k():
    for k in (2, 3, 5, 8):
        f = star_exact(k, 2)
        M = transition_matrix(f)
        th = max_outside_frequency(M, f.default_kept)
        assert th.value == F(2, k)
        assert th.value <= F(2, k - 1)  # stated frequency bound
        out = sum(1 for v in th.witness if v not in f.default_kept)
        assert F(out, len(th.witness)) == th.value


def test_theta_arr_example():
    for n in (3, 6, 12):
        f = arr_example(n)
        M = transition_matrix(f)
        th = max_outside_frequency(M, f.default_kept)
        assert th.value == F(2, n + 1)
        assert th.value <= F(2, n)


def test_dp_oracle_examples():
    Ms = transition_matrix(two_piece_swap("dendrite-pair", 2))
    assert outside_count_dp(Ms, frozenset({0}), 4) == F(1, 2)
    # n=1 with a proper subset kept: a single outside vertex is a path
    assert outside_count_dp(Ms, frozenset({0}), 1) == 1
    rows = [[1 if j == (i + 1) % 4 else 0 for j in range(4)] for i in range(4)]
    M = TransitionMatrix(rows)
    for mult in (1, 2, 3):
        assert outside_count_dp(M, frozenset({1, 2, 3}), 4 * mult) == F(1, 4)


def test_dp_limit_matches_cycle_value_random():
    rng = random.Random(1234)
    for _ in range(100):
        M = random_row_nonzero_matrix(rng)
        kept = frozenset(i for i in range(M.n) if rng.random() < 0.5)
        if len(kept) == M.n:
            kept = frozenset(list(kept)[:-1])
        th = max_outside_frequency(M, kept)
        assert outside_frequency_dp_limit(M, kept) == th.value
        n = 4 * M.n
        kn = outside_count_dp(M, kept, n)
        assert abs(kn - th.value) <= F(M.n, n)


def test_lap_matrix_shapes():
    assert lap_matrix(tent_family(2)).n == 4
    assert lap_matrix(star_devaney(2, 2)).n == 2 * 2 + 1
    f = star_exact(2, 2)
    assert lap_matrix(f).n == 3 + 1 + 2
