"""Uniformization and Katz-Tao subset extraction."""

import itertools
import random
from fractions import Fraction

import pytest

from sumlab.errors import InputError
from sumlab.exact import ExactPos
from sumlab.extraction import (
    UniformityFailure,
    UniformStructure,
    exhaust_katz_tao,
    extract_katz_tao_subset,
    is_uniform,
    min_block_exponent,
    skeleton,
    uniform_pieces,
    uniformize,
)
from sumlab.gridset import make_grid_set
from sumlab.regularity import katz_tao_constant

F = Fraction


def all_uniform_subsets(P, T):
    """Exhaustive search oracle: every uniform subset of a tiny set."""
    out = []
    idx = P.indices
    for r in range(1, len(idx) + 1):
        for sub in itertools.combinations(idx, r):
            cand = make_grid_set(P.q, sub)
            if isinstance(is_uniform(cand, T), UniformStructure):
                out.append(cand)
    return out


def test_uniformize_012():
    P = make_grid_set(2, [0, 1, 2])
    out, struct = uniformize(P, 1)
    assert out.indices == (0, 1)
    assert struct.branching == (1, 2)
    assert 4 * len(out) >= len(P)  # (2T)^-m = 1/4
    # oracle: no uniform subset is larger
    best = max(len(u) for u in all_uniform_subsets(P, 1))
    assert len(out) == best == 2


def test_uniformize_already_uniform():
    P = make_grid_set(4, [0, 4, 8, 12])
    out, struct = uniformize(P, 2)
    assert out.indices == P.indices
    assert struct.branching == (4, 1)


def test_uniformize_full_grid():
    full = make_grid_set(6, range(64))
    out, struct = uniformize(full, 2)
    assert out.indices == full.indices
    assert struct.branching == (4, 4, 4)


def test_uniformize_random_invariants():
    rng = random.Random(101)
    for q, T in ((8, 2), (12, 3), (12, 4)):
        m = q // T
        for _ in range(200):
            P = make_grid_set(q, rng.sample(range(1 << q), rng.randrange(1, 1 << q)))
            out, struct = uniformize(P, T)
            chk = is_uniform(out, T)
            assert isinstance(chk, UniformStructure)
            assert chk.branching == struct.branching
            assert set(out.indices) <= set(P.indices)
            assert len(out) * (2 * T) ** m >= len(P)
            assert struct.cardinality == len(out)


def test_uniformize_determinism():
    rng = random.Random(5)
    P = make_grid_set(12, rng.sample(range(1 << 12), 900))
    a = uniformize(P, 3)
    b = uniformize(P, 3)
    assert a[0].indices == b[0].indices and a[1] == b[1]


def test_is_uniform_examples():
    assert is_uniform(make_grid_set(4, [0, 4, 8, 12]), 2) == UniformStructure(2, 2, (4, 1))
    failure = is_uniform(make_grid_set(3, [0, 1, 4]), 1)
    assert isinstance(failure, UniformityFailure)
    assert failure.level == 3 and {failure.count_a, failure.count_b} == {1, 2}
    with pytest.raises(InputError):
        is_uniform(make_grid_set(3, []), 1)
    with pytest.raises(InputError):
        is_uniform(make_grid_set(4, [0]), 3)  # T does not divide q


def test_is_uniform_rejects_point_one():
    with pytest.raises(InputError, match=r"\[0, 1\)"):
        is_uniform(make_grid_set(2, [0, 4]), 1)


def test_extract_identity_when_already_regular():
    ap = make_grid_set(6, range(0, 64, 8))  # Katz-Tao (delta, 1, 1) up to endpoints
    out = extract_katz_tao_subset(ap, F(1, 64), F(1))
    assert out.indices == ap.indices
    single = make_grid_set(6, [17])
    assert extract_katz_tao_subset(single, F(1, 4), F(1, 2)).indices == (17,)


def test_extract_full_grid():
    full = make_grid_set(4, range(16))
    out = extract_katz_tao_subset(full, F(1, 4), F(1, 2))
    sk = skeleton(out, 2)
    assert katz_tao_constant(sk, F(1, 2)) <= F(8)
    # |P'| >= (delta/rho)^s |P| / (K C) with K = 2
    C = katz_tao_constant(full, F(1, 2))
    bound = ExactPos(F(16, 2), ((F(1, 4), F(1, 2)),)) / C
    assert ExactPos.of(F(len(out))) >= bound


def test_extract_rejects_fine_rho():
    with pytest.raises(InputError):
        extract_katz_tao_subset(make_grid_set(3, [0, 1]), F(1, 16), F(1, 2))
    with pytest.raises(InputError):
        extract_katz_tao_subset(make_grid_set(3, [0, 1]), F(3, 8), F(1, 2))


def test_exhaust_examples():
    ap = make_grid_set(6, range(0, 64, 8))
    pieces, left = exhaust_katz_tao(ap, F(1, 64), F(1), F(1, 2))
    assert len(pieces) == 1 and pieces[0].indices == ap.indices and len(left) == 0

    full = make_grid_set(4, range(16))
    pieces, left = exhaust_katz_tao(full, F(1, 4), F(1, 2), F(1, 4))
    seen = set()
    for piece in pieces:
        assert not (seen & set(piece.indices))
        seen.update(piece.indices)
        assert katz_tao_constant(skeleton(piece, 2), F(1, 2)) <= F(8)
    assert len(left) <= len(full) / 4

    single = make_grid_set(4, [3])
    pieces, left = exhaust_katz_tao(single, F(1, 4), F(1, 2), F(1, 2))
    assert len(pieces) == 1 and pieces[0].indices == (3,)


def test_min_block_exponent():
    assert min_block_exponent(F(4, 5)) == 4
    assert min_block_exponent(F(11, 20)) == 7
    assert min_block_exponent(F(2)) == 1


def test_uniform_pieces():
    rng = random.Random(55)
    q, T, eps = 12, 4, F(4, 5)
    P = make_grid_set(q, rng.sample(range(1 << q), 2500))
    pieces = uniform_pieces(P, T, eps)
    n0 = len(P)
    seen = set()
    for piece, struct in pieces:
        assert isinstance(is_uniform(piece, T), UniformStructure)
        assert not (seen & set(piece.indices))
        seen.update(piece.indices)
        # |piece|^u >= (delta^2eps n0)^u exactly
        p, u = (2 * eps).numerator, (2 * eps).denominator
        assert len(piece) ** u * (1 << (q * p)) >= n0 ** u
    leftover = n0 - len(seen)
    p, u = eps.numerator, eps.denominator
    assert leftover ** u * (1 << (q * p)) <= n0 ** u

    # uniform input -> single piece equal to the input
    U = make_grid_set(8, range(0, 256, 16))
    pieces = uniform_pieces(U, 4, F(4, 5))
    assert len(pieces) == 1 and pieces[0][0].indices == U.indices

    # singleton input -> one singleton piece
    pieces = uniform_pieces(make_grid_set(8, [3]), 4, F(4, 5))
    assert len(pieces) == 1 and pieces[0][0].indices == (3,)


def test_uniform_pieces_rejects_small_T():
    P = make_grid_set(12, [0, 5, 9])
    with pytest.raises(InputError, match="T >= 7"):
        uniform_pieces(P, 4, F(11, 20))


def test_structure_validation():
    with pytest.raises(InputError):
        UniformStructure(T=2, m=2, branching=(3, 1))
    with pytest.raises(InputError):
        UniformStructure(T=2, m=2, branching=(8, 1))
    with pytest.raises(InputError):
        UniformStructure(T=2, m=3, branching=(1, 1))
