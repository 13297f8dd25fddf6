"""Grid representation: covering numbers, restriction, renormalization."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sumlab.errors import InputError
from sumlab.gridset import (
    DyadicInterval,
    GridSet,
    PairSet,
    ScaleParams,
    branching_between,
    covering_number,
    diameter,
    make_grid_set,
    renormalize,
    restrict,
)

F = Fraction


def test_make_grid_set_dedup_sort():
    P = make_grid_set(2, [2, 0, 2])
    assert P.indices == (0, 2)
    assert len(P) == 2


def test_make_grid_set_values():
    P = make_grid_set(3, [0, 1, 4])
    assert P.values() == [F(0), F(1, 8), F(1, 2)]


def test_make_grid_set_bound_check():
    with pytest.raises(InputError, match="5"):
        make_grid_set(2, [5])
    # right endpoint is representable
    P = make_grid_set(2, [4])
    assert P.indices == (4,)


def test_covering_examples():
    P = make_grid_set(3, [0, 1, 4])
    assert covering_number(P, 2) == 2
    assert covering_number(P, 0) == 1
    full = make_grid_set(3, range(8))
    assert covering_number(full, 3) == 8


def test_covering_boundary_cell():
    # index span*2^q occupies the extra cell at every level
    P = make_grid_set(3, [0, 8])
    assert covering_number(P, 0) == 2
    assert covering_number(P, 3) == 2


def test_covering_level_errors():
    P = make_grid_set(3, [0])
    with pytest.raises(InputError):
        covering_number(P, 4)


def test_branching_between_examples():
    P = make_grid_set(4, [0, 4, 8, 12])
    assert branching_between(P, 2, 4, DyadicInterval(2, 0)) == 1
    full = make_grid_set(4, range(16))
    assert branching_between(full, 2, 4, DyadicInterval(2, 1)) == 4
    P2 = make_grid_set(2, [0, 1])
    assert branching_between(P2, 1, 2, DyadicInterval(1, 1)) == 0


def test_restrict_examples():
    P = make_grid_set(3, [0, 1, 4])
    assert restrict(P, DyadicInterval(2, 0)).indices == (0, 1)
    assert restrict(P, DyadicInterval(2, 1)).indices == ()
    assert restrict(P, DyadicInterval(0, 0)).indices == P.indices


def test_renormalize_examples():
    P = make_grid_set(4, [8, 9])
    out = renormalize(P, DyadicInterval(2, 2))
    assert (out.q, out.indices) == (2, (0, 1))
    empty = renormalize(make_grid_set(4, [0]), DyadicInterval(2, 3))
    assert (empty.q, empty.indices) == (2, ())
    same = renormalize(make_grid_set(4, [3, 7]), DyadicInterval(0, 0))
    assert same.indices == (3, 7)


def test_diameter():
    assert diameter(make_grid_set(4, [0, 4])) == F(1, 4)
    assert diameter(make_grid_set(5, [17])) == 0
    assert diameter(make_grid_set(3, range(8))) == F(7, 8)
    assert diameter(make_grid_set(3, list(range(9)))) == 1
    with pytest.raises(InputError):
        diameter(make_grid_set(3, []))


def test_scale_params():
    sp = ScaleParams.for_grid(12, 3)
    assert (sp.q, sp.T, sp.m) == (12, 3, 4)
    with pytest.raises(InputError):
        ScaleParams.for_grid(10, 3)
    with pytest.raises(InputError):
        ScaleParams(q=9, T=2, m=4)


def test_pair_set_validation():
    PairSet(q=2, pairs=frozenset({(0, 4)}))
    with pytest.raises(InputError):
        PairSet(q=2, pairs=frozenset({(0, 5)}))


def test_json_round_trip():
    P = make_grid_set(5, [1, 9, 32], span=2)
    again = GridSet.from_dict(P.to_dict())
    assert again == P
    with pytest.raises(InputError):
        GridSet.from_dict({"q": 3})


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8), st.data())
def test_covering_monotonicity(q, data):
    n = data.draw(st.integers(1, min(40, 1 << q)))
    idx = data.draw(st.lists(st.integers(0, (1 << q) - 1), min_size=n, max_size=n))
    P = make_grid_set(q, idx)
    for l1 in range(q):
        for l2 in range(l1 + 1, q + 1):
            c1, c2 = covering_number(P, l1), covering_number(P, l2)
            assert c1 <= c2 <= (1 << (l2 - l1)) * c1
    assert covering_number(P, q) == len(P)


def test_branching_sums_to_covering():
    rng = random.Random(13)
    for _ in range(40):
        q = rng.choice([4, 6, 8])
        P = make_grid_set(q, rng.sample(range(1 << q), rng.randint(1, 1 << q)))
        coarse = rng.randint(0, q)
        fine = rng.randint(coarse, q)
        total = sum(
            branching_between(P, coarse, fine, DyadicInterval(coarse, k))
            for k in {i >> (q - coarse) for i in P.indices}
        )
        assert total == covering_number(P, fine)


def test_renormalize_preserves_gaps():
    rng = random.Random(29)
    for _ in range(30):
        q = 8
        P = make_grid_set(q, rng.sample(range(1 << q), 40))
        level = rng.randint(0, 4)
        k = rng.randrange(1 << level)
        piece = restrict(P, DyadicInterval(level, k))
        out = renormalize(P, DyadicInterval(level, k))
        assert len(out) == len(piece)
        gaps_in = [b - a for a, b in zip(piece.indices, piece.indices[1:])]
        gaps_out = [b - a for a, b in zip(out.indices, out.indices[1:])]
        assert gaps_in == gaps_out
