import math
from fractions import Fraction as F

import pytest

from entrolab import (ParameterError, arr_example, build_construction,
                      describe, free_arc_cycle, is_irreducible, is_primitive,
                      lap_matrix, perron_root, star_devaney, star_exact,
                      star_minimal, tent_family, transition_matrix,
                      two_piece_swap, validate_splitting)
from entrolab.entropy import perron_entropy
from entrolab.verify import construction_family


def test_parameter_errors():
    for bad in (lambda: tent_family(1),
                lambda: star_devaney(1, 2),
                lambda: star_exact(2, 1),
                lambda: star_minimal(1),
                lambda: free_arc_cycle(1, True),
                lambda: free_arc_cycle(3, True, m=2),  # parity
                lambda: arr_example(2),
                lambda: two_piece_swap("circle", 2),   # parity
                lambda: two_piece_swap("blob", 3),
                lambda: build_construction("nonsense")):
        with pytest.raises(ParameterError):
            bad()


def test_every_construction_is_valid():
    for f in construction_family(heavy=True):
        assert validate_splitting(f.graph, f.splitting).ok
        M = transition_matrix(f)
        assert M.covering, f.name
        assert M.rows_nonzero()


def test_expected_primitivity():
    assert not is_primitive(transition_matrix(star_devaney(3, 2)))
    assert is_irreducible(transition_matrix(star_devaney(3, 2)))
    assert is_primitive(transition_matrix(star_exact(3, 2)))
    assert is_primitive(transition_matrix(tent_family(2)))
    assert is_primitive(transition_matrix(arr_example(7)))
    assert not is_primitive(transition_matrix(free_arc_cycle(4, False)))
    assert is_primitive(transition_matrix(free_arc_cycle(4, True)))
    assert not is_primitive(transition_matrix(two_piece_swap("circle", 3)))


def test_tent_perron_is_log_k():
    for k in (2, 3, 4):
        h, err = perron_entropy(tent_family(k))
        assert abs(h - math.log(k)) < 1e-9


def test_star_devaney_perron_value():
    # the k+1 cycle with two m-fold legs: spectral radius m^(2/(k+1))
    for k, m in ((2, 2), (3, 2), (4, 3)):
        h, _ = perron_entropy(star_devaney(k, m))
        assert abs(h - 2 * math.log(m) / (k + 1)) < 1e-9


def test_star_exact_k2_m2_is_log2():
    h, _ = perron_entropy(star_exact(2, 2))
    assert abs(h - math.log(2)) < 1e-9


def test_star_minimal_exact_values():
    for n in range(2, 11):
        h, _ = perron_entropy(star_minimal(n))
        assert abs(h - math.log(2) / n) < 1e-9
    r, err = perron_root(lap_matrix(star_minimal(3)))
    assert abs(r - 2 ** (1 / 3)) < 1e-9


def test_two_piece_swap_half_log_m():
    for shape, m in (("dendrite-pair", 2), ("dendrite-pair", 4), ("circle", 3)):
        h, _ = perron_entropy(two_piece_swap(shape, m))
        assert abs(h - math.log(m) / 2) < 1e-9


def test_star_exact_entropy_decreasing_in_k():
    hs = [perron_entropy(star_exact(k, 2))[0] for k in range(2, 12)]
    assert all(a > b for a, b in zip(hs, hs[1:]))


def test_free_arc_cycle_structure():
    for exact in (False, True):
        f = free_arc_cycle(3, exact)
        M = transition_matrix(f)
        assert is_irreducible(M)
        assert is_primitive(M) is exact
        # endpoint audit: attachment points stay inside the invariant set
        pset = set(f.boundary)
        for p in f.boundary:
            assert f.evaluate(p) in pset


def test_arr_example_profile_matches_scheme():
    for n in (3, 4, 9):
        f = arr_example(n)
        lam = f.meta["lam"]
        prof = f.lipschitz_profile()
        assert prof["X0"] == 1
        assert prof["X1m"] == 1
        assert prof["X1p"] == lam
        for i in range(2, n - 1):
            assert prof["X%d" % i] == lam
        assert prof["G"] == 1
        assert abs(float(lam) ** (n - 2) - 2) < 1e-4


def test_arr_example_transitions():
    f = arr_example(5)
    M = transition_matrix(f)
    names = f.piece_names()
    idx = {nm: i for i, nm in enumerate(names)}

    def succ(nm):
        return {names[j] for j in range(M.n) if M.m[idx[nm]][j]}

    assert succ("X0") == {"X1m", "X1p"}
    assert succ("X1m") == {"X1p"}
    assert succ("X1p") == {"X1p", "X2"}
    assert succ("X2") == {"X3"}
    assert succ("X3") == {"X4"}
    assert succ("X4") == {"G"}
    assert succ("G") == {"X0"}


def test_describe_lists_every_piece():
    f = star_exact(3, 2)
    text = describe(f)
    for nm in f.piece_names():
        assert nm in text
