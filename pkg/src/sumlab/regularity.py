"""Best Frostman and Katz-Tao constants of a grid set, exactly.

Both constants quantify over closed balls B(x, r) = [x - r, x + r] with
r >= delta.  Dyadic mode evaluates radii r = 2^-level only and is within a
factor 2^s of the true supremum; exact mode takes the supremum over all
real r via the finite candidate set of half pairwise gaps.  Constants are
ExactPos values (irrational in general); all comparisons are exact.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError
from .exact import ExactPos, max_exact
from .gridset import GridSet

MODES = ("dyadic", "exact")


@dataclass(frozen=True)
class RegularityReport:
    """Both constants for one exponent s, with the per-radius window counts."""

    s: Fraction
    frostman_c: ExactPos
    katz_tao_c: ExactPos
    per_radius: tuple[tuple[Fraction, int], ...]

    def to_json(self) -> dict:
        return {
            "s": str(self.s),
            "frostman": self.frostman_c.to_json(),
            "katz_tao": self.katz_tao_c.to_json(),
            "per_radius": [[str(r), n] for r, n in self.per_radius],
        }


def _max_count_for_window(indices: tuple[int, ...], W: int) -> int:
    """Max points of P in a closed window of integer length W (in delta units).

    The maximum over real window positions is attained with the left endpoint
    on a point of P, so a sweep anchored at each point is exact.
    """
    if not indices:
        return 0
    best = 0
    for pos, i in enumerate(indices):
        cnt = bisect_right(indices, i + W) - pos
        if cnt > best:
            best = cnt
    return best


def max_window_count(P: GridSet, w: Fraction) -> int:
    """Max over x of |P ∩ [x, x + w]| for a window length w with w * 2^q integral."""
    W = w * (1 << P.q)
    if W.denominator != 1:
        raise InputError(f"window length {w} is not a multiple of delta")
    if len(P) == 0:
        return 0
    return _max_count_for_window(P.indices, W.numerator)


def _dyadic_levels(P: GridSet) -> list[int]:
    # r = 2^-level ranges over [delta, span]; span is 1 or a power of 2.
    low = -(P.span.bit_length() - 1)
    return list(range(low, P.q + 1))


def _dyadic_sweep(P: GridSet) -> list[tuple[int, int]]:
    """(level, max closed-window count for window 2 * 2^-level) per dyadic radius."""
    out = []
    for level in _dyadic_levels(P):
        W = 1 << (P.q - level + 1)
        out.append((level, _max_count_for_window(P.indices, W)))
    return out


def _exact_candidates(P: GridSet) -> list[int]:
    """Candidate closed-window lengths 2r (delta units): 2*delta and all gaps >= 2."""
    idx = P.indices
    gaps = {idx[j] - idx[i] for i in range(len(idx)) for j in range(i + 1, len(idx))}
    cands = {2} | {g for g in gaps if g >= 2}
    return sorted(cands)


def _check_args(P: GridSet, s: Fraction, mode: str) -> None:
    if len(P) == 0:
        raise InputError("regularity constants need a nonempty set")
    if not (0 <= s <= 1):
        raise InputError(f"exponent s must lie in [0, 1], got {s}")
    if mode not in MODES:
        raise InputError(f"mode must be one of {MODES}, got {mode!r}")


def frostman_constant(P: GridSet, s: Fraction, mode: str = "dyadic") -> ExactPos:
    """Smallest C with |P ∩ B(x,r)| <= C r^s |P| over the mode's radius set."""
    s = Fraction(s)
    _check_args(P, s, mode)
    n = len(P)
    if mode == "dyadic":
        vals = [
            ExactPos(Fraction(cnt, n), ((Fraction(1 << level) if level >= 0 else Fraction(1, 1 << -level), s),))
            for level, cnt in _dyadic_sweep(P)
        ]
        return max_exact(vals)
    vals = []
    for W in _exact_candidates(P):
        cnt = _max_count_for_window(P.indices, W)
        # r = W * 2^-(q+1); value = cnt / (r^s * n)
        vals.append(ExactPos(Fraction(cnt, n), ((Fraction(1 << (P.q + 1), W), s),)))
    return max_exact(vals)


def katz_tao_constant(P: GridSet, s: Fraction, mode: str = "dyadic") -> ExactPos:
    """Smallest C with |P ∩ B(x,r)| <= C (r/delta)^s over the mode's radius set."""
    s = Fraction(s)
    _check_args(P, s, mode)
    if mode == "dyadic":
        vals = [
            ExactPos(Fraction(cnt), ((Fraction(1, 1 << (P.q - level)), s),))
            for level, cnt in _dyadic_sweep(P)
        ]
        return max_exact(vals)
    vals = []
    for W in _exact_candidates(P):
        cnt = _max_count_for_window(P.indices, W)
        # r/delta = W/2; value = cnt * (W/2)^-s
        vals.append(ExactPos(Fraction(cnt), ((Fraction(2, W), s),)))
    return max_exact(vals)


def regularity_report(P: GridSet, s_grid) -> list[RegularityReport]:
    """Frostman and Katz-Tao constants for each exponent in s_grid."""
    sweep = _dyadic_sweep(P)
    per_radius = tuple(
        (Fraction(1, 1 << level) if level >= 0 else Fraction(1 << -level), cnt)
        for level, cnt in sweep
    )
    reports = []
    for s in s_grid:
        s = Fraction(s)
        reports.append(
            RegularityReport(
                s=s,
                frostman_c=frostman_constant(P, s),
                katz_tao_c=katz_tao_constant(P, s),
                per_radius=per_radius,
            )
        )
    return reports
