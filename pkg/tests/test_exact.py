"""Exact-value algebra used by every regularity comparison."""

from fractions import Fraction

import pytest

from sumlab.exact import ExactPos, floor_pow2, iroot, max_exact, round_half_up

F = Fraction


def test_iroot_small():
    assert iroot(0, 3) == 0
    assert iroot(1, 5) == 1
    assert iroot(8, 3) == 2
    assert iroot(7, 3) == 1
    assert iroot(2**24, 5) == 27


def test_iroot_large():
    n = 3**400 + 12345
    t = iroot(n, 7)
    assert t**7 <= n < (t + 1) ** 7


def test_floor_pow2():
    assert floor_pow2(F(0)) == 1
    assert floor_pow2(F(3)) == 8
    assert floor_pow2(F(7, 2)) == 11  # 2^3.5 = 11.31
    assert floor_pow2(F(-1, 2)) == 0


def test_round_half_up():
    assert round_half_up(F(1, 2)) == 1
    assert round_half_up(F(3, 2)) == 2
    assert round_half_up(F(-1, 2)) == 0
    assert round_half_up(F(7, 3)) == 2


def test_comparisons_exact():
    # 3 * (1/8)^(-1/2) = 8.485...
    a = ExactPos(F(3), ((F(1, 8), F(-1, 2)),))
    assert a > 8
    assert a < 9
    assert a <= F(17, 2)
    # 2 * 2^(1/2) vs 8^(1/2): equal
    b = ExactPos(F(2), ((F(2), F(1, 2)),))
    c = ExactPos(F(1), ((F(8), F(1, 2)),))
    assert b == c
    assert not b < c and not b > c


def test_mul_div_pow():
    a = ExactPos(F(3), ((F(2), F(1, 2)),))
    b = ExactPos(F(1, 3), ((F(2), F(1, 2)),))
    assert a * b == 2
    assert a / a == 1
    assert (a**2) == 9 * 2


def test_rational_extraction():
    assert ExactPos(F(5, 3)).as_fraction() == F(5, 3)
    assert ExactPos(F(2), ((F(4), F(1, 2)),)).as_fraction() is None
    assert ExactPos(F(2), ((F(4), F(2)),)).as_fraction() == 32


def test_pow2_and_float():
    v = ExactPos.pow2(F(5, 2))
    assert abs(float(v) - 2**2.5) < 1e-12


def test_max_exact():
    vals = [ExactPos(F(n), ((F(2), F(1, 2)),)) for n in (3, 5, 4)]
    assert max_exact(vals) == vals[1]
    with pytest.raises(ValueError):
        max_exact([])


def test_positive_required():
    with pytest.raises(ValueError):
        ExactPos(F(0))
    with pytest.raises(ValueError):
        ExactPos(F(1), ((F(-2), F(1)),))
