"""Regularity constants against the exact oracle and the paper-style laws."""

import random
from fractions import Fraction

import pytest

from sumlab.errors import InputError
from sumlab.exact import ExactPos
from sumlab.extraction import skeleton, uniformize
from sumlab.gridset import DyadicInterval, make_grid_set, renormalize
from sumlab.regularity import (
    frostman_constant,
    katz_tao_constant,
    max_window_count,
    regularity_report,
)

F = Fraction


def brute_force_window(P, W):
    """Naive max count in a closed window of integer length W."""
    best = 0
    for i, x in enumerate(P.indices):
        cnt = sum(1 for y in P.indices[i:] if y - x <= W)
        best = max(best, cnt)
    return best


def test_max_window_examples():
    full = make_grid_set(3, range(8))
    assert max_window_count(full, F(1, 4)) == 3
    ap = make_grid_set(4, [0, 4, 8, 12])
    assert max_window_count(ap, F(1, 4)) == 2
    single = make_grid_set(6, [11])
    for w in (F(1, 64), F(1, 2), F(1)):
        assert max_window_count(single, w) == 1
    assert max_window_count(make_grid_set(3, []), F(1, 2)) == 0


def test_max_window_rejects_non_dyadic():
    with pytest.raises(InputError):
        max_window_count(make_grid_set(3, [0]), F(1, 3))


def test_frostman_full_grid():
    # windows of length 2r = 2^(3-l+1) hold 2^(q-l)+1 points; max quotient at r=delta
    full = make_grid_set(3, range(8))
    c = frostman_constant(full, F(1), "dyadic")
    assert c == 3  # 3 / ((1/8) * 8)
    assert frostman_constant(full, F(1), "exact") == 3


def test_frostman_singleton():
    P = make_grid_set(5, [0])
    # single point: every window holds 1 = |P|, sup at r = delta: 1/delta^s
    assert frostman_constant(P, F(1, 2), "exact") == ExactPos.pow2(F(5, 2))


def test_frostman_scaling_invariance():
    # affine invariance: the renormalized constant is the restricted sweep of P
    # measured at the rescaled radii (factor 2^(level s))
    rng = random.Random(4)
    for _ in range(20):
        q, level, k = 8, 2, rng.randrange(4)
        lo, hi = k << (q - level), (k + 1) << (q - level)
        pts = rng.sample(range(lo, hi), 12)
        P = make_grid_set(q, pts)
        inner = renormalize(P, DyadicInterval(level, k))
        n = len(P)
        for lp in range(q - level + 1):
            assert max_window_count(inner, F(2, 1 << lp)) == max_window_count(P, F(2, 1 << (lp + level)))
        for s in (F(1, 2), F(3, 4)):
            restricted = max(
                ExactPos(F(max_window_count(P, F(2, 1 << l)), n), ((F(1 << l), s),))
                for l in range(level, q + 1)
            )
            assert frostman_constant(inner, s) == restricted / ExactPos.pow2(level * s)


def test_katz_tao_examples():
    # full grid: closed 2-delta windows hold 3 points, so the s=1 constant is 3
    full = make_grid_set(4, range(16))
    assert katz_tao_constant(full, F(1), "exact") == 3


def test_katz_tao_full_grid_half():
    full = make_grid_set(4, range(16))
    c = katz_tao_constant(full, F(1, 2), "dyadic")
    assert F(4) <= c <= F(8)  # max near r=1: 2^q / 2^(q/2) = 4, endpoint effects


def test_katz_tao_proper_ap():
    for k in range(1, 4):
        q = 6
        ap = make_grid_set(q, range(0, 1 << q, 1 << k))
        c = katz_tao_constant(ap, F(1), "exact")
        assert F(1) <= c <= F(2)


def test_katz_tao_scale_covariance():
    # embedding P into a subinterval leaves the constant unchanged
    rng = random.Random(9)
    for _ in range(15):
        q = 6
        P = make_grid_set(q, rng.sample(range(1 << q), 10))
        level, k = 2, rng.randrange(4)
        embedded = make_grid_set(q + level, [(k << q) + i for i in P.indices])
        for s in (F(1, 2), F(1)):
            assert katz_tao_constant(P, s, "dyadic") == katz_tao_constant(embedded, s, "dyadic")


def test_mode_inequality_and_oracle():
    rng = random.Random(17)
    for _ in range(25):
        q = rng.choice([5, 6, 7])
        n = rng.randint(1, min(50, 1 << q))
        P = make_grid_set(q, rng.sample(range(1 << q), n))
        for s in (F(1, 3), F(1, 2), F(1)):
            fd = frostman_constant(P, s, "dyadic")
            fe = frostman_constant(P, s, "exact")
            kd = katz_tao_constant(P, s, "dyadic")
            ke = katz_tao_constant(P, s, "exact")
            pow2s = ExactPos.pow2(s)
            assert fd <= fe <= pow2s * fd
            assert kd <= ke <= pow2s * kd
            # independent window counting
            for W in (2, 3, (1 << q) // 2):
                from sumlab.regularity import _max_count_for_window

                assert _max_count_for_window(P.indices, W) == brute_force_window(P, W)


def test_katz_tao_implies_frostman():
    # katz_tao <= C and |P| >= delta^-s / C  =>  frostman <= C^2 (with slack 2^(s+1))
    rng = random.Random(23)
    for _ in range(30):
        q = rng.choice([6, 8])
        n = rng.randint(2, 1 << q)
        P = make_grid_set(q, rng.sample(range(1 << q), n))
        for s in (F(1, 2), F(3, 4)):
            C = katz_tao_constant(P, s, "dyadic")
            if ExactPos.of(F(len(P))) * C >= ExactPos.pow2(q * s):
                bound = C * C * ExactPos.pow2(s + 1)
                assert frostman_constant(P, s, "dyadic") <= bound


def test_coarse_skeleton_frostman_invariant():
    # for uniformized sets, the Delta-skeleton keeps the Frostman constant up to K=4
    rng = random.Random(31)
    for _ in range(20):
        q, T = 12, 3
        P = make_grid_set(q, rng.sample(range(1 << q), rng.randint(8, 1 << q)))
        U, struct = uniformize(P, T)
        for j in (1, 2, 3):
            skel = skeleton(U, j * T)
            for s in (F(1, 2),):
                assert frostman_constant(skel, s) <= ExactPos.of(F(4)) * frostman_constant(U, s)


def test_regularity_report_matches_components():
    rng = random.Random(37)
    for P in (
        make_grid_set(6, range(64)),
        make_grid_set(6, range(0, 64, 8)),
        make_grid_set(6, rng.sample(range(64), 20)),
    ):
        reports = regularity_report(P, [F(1, 4), F(1, 2), F(1)])
        for rep in reports:
            assert rep.frostman_c == frostman_constant(P, rep.s)
            assert rep.katz_tao_c == katz_tao_constant(P, rep.s)
            # each reported window induces a lower bound attained by the max
            n = len(P)
            vals_f = [
                ExactPos(F(cnt, n), ((F(1) / r, rep.s),)) for r, cnt in rep.per_radius
            ]
            assert max(vals_f) == rep.frostman_c


def test_parameter_validation():
    P = make_grid_set(4, [0, 3])
    with pytest.raises(InputError):
        frostman_constant(P, F(-1, 2))
    with pytest.raises(InputError):
        katz_tao_constant(P, F(3, 2))
    with pytest.raises(InputError):
        frostman_constant(make_grid_set(4, []), F(1, 2))
    with pytest.raises(InputError):
        katz_tao_constant(P, F(1, 2), mode="both")
