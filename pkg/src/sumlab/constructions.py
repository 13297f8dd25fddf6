"""The paper-style explicit examples and seeded random set generators.

All example exponents are restricted to dyadic-friendly rationals so that
every cardinality and gap is a power of two.  The sharpness construction
can instead round each derived exponent to the nearest integer (ties up)
when the requested grid exponent is not exactly admissible; the metadata
records both the exact and the used exponents.

Random uniform trees are generated by a fixed 64-bit PRNG (splitmix64) with
a per-node seed mixed FNV-1a style from (seed, salt, level, cell), so the
output is reproducible bit-for-bit and independent of traversal order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .errors import InputError
from .exact import round_half_up
from .gridset import GridSet, make_grid_set

_MASK64 = (1 << 64) - 1
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def _fnv1a(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


def _mix(*parts) -> int:
    h = _FNV_OFFSET
    for p in parts:
        h ^= _fnv1a(str(p).encode())
        h = (h * _FNV_PRIME) & _MASK64
    return h or 1


class _SplitMix64:
    """Fixed 64-bit PRNG; the documented generator for all random sets."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        return self.next() % n


def _choose_children(n: int, total: int, rng: _SplitMix64) -> list[int]:
    """n distinct values from range(total) by partial Fisher-Yates."""
    arr = list(range(total))
    for t in range(n):
        u = t + rng.below(total - t)
        arr[t], arr[u] = arr[u], arr[t]
    return sorted(arr[:n])


def arithmetic_progression(q: int, gap_exp: int, count: int, offset: int = 0) -> GridSet:
    """Indices {offset + i * 2^gap_exp : 0 <= i < count}."""
    if count < 1:
        raise InputError(f"AP count must be >= 1, got {count}")
    if gap_exp < 0:
        raise InputError(f"AP gap exponent must be >= 0, got {gap_exp}")
    top = offset + (count - 1) * (1 << gap_exp)
    if top > (1 << q):
        raise InputError(f"AP endpoint {top} overflows the [0, 2^{q}] domain")
    return make_grid_set(q, [offset + i * (1 << gap_exp) for i in range(count)])


@dataclass(frozen=True)
class SharpnessParams:
    """Exponents for the AP sharpness construction; all must be dyadic-friendly."""

    q: int
    alpha: Fraction
    eta: Fraction
    beta: Fraction
    gamma: Fraction

    def __post_init__(self):
        a, e, b, g = (Fraction(x) for x in (self.alpha, self.eta, self.beta, self.gamma))
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "eta", e)
        object.__setattr__(self, "beta", b)
        object.__setattr__(self, "gamma", g)
        if not (0 < e < min(a, g) <= max(a, g) <= 1):
            raise InputError("need 0 < eta < min(alpha, gamma) <= max(alpha, gamma) <= 1")
        if not (0 < b < a - e):
            raise InputError(f"need 0 < beta < alpha - eta = {a - e}, got beta={b}")
        if self.q < 1:
            raise InputError("grid exponent must be >= 1")

    def exponent_multipliers(self) -> dict[str, Fraction]:
        a, e, b, g = self.alpha, self.eta, self.beta, self.gamma
        return {
            "B0": b,
            "A0": b * a / (a - e),
            "A0_root": b / (a - e),           # eA / alpha, fixes Delta
            "C1": g * (1 - b / (a - e)),
        }

    def admissible_stride(self) -> int:
        return lcm(*(m.denominator for m in self.exponent_multipliers().values()))


def sharpness_example(params: SharpnessParams, rounding: str = "strict"):
    """Arithmetic-progression triple (A, B, C) that defeats the relaxed condition.

    Builds B0, A0, C0 as APs containing 0, rescales A0 and B0 by
    Delta = delta |A0|^(1/alpha), and sets C = C0 + C1 with C1 the densest
    (delta, gamma) Katz-Tao AP inside [0, delta/Delta].  rounding="strict"
    errors when a derived exponent is not an integer; "nearest" rounds each
    exponent (ties up) and records the substitution in the metadata.
    """
    if rounding not in ("strict", "nearest"):
        raise InputError(f"rounding must be 'strict' or 'nearest', got {rounding!r}")
    q = params.q
    mult = params.exponent_multipliers()
    exact = {name: q * m for name, m in mult.items()}
    if rounding == "strict":
        bad = {name: v for name, v in exact.items() if v.denominator != 1}
        if bad:
            stride = params.admissible_stride()
            nearest = max(stride, ((q + stride - 1) // stride) * stride)
            raise InputError(
                f"non-integral exponents {sorted(bad)} at q={q}; "
                f"q must be a multiple of {stride} (nearest admissible: {nearest})"
            )
        eB = int(exact["B0"])
        eA = int(exact["A0"])
        rootA = int(exact["A0_root"])
    else:
        eB = round_half_up(exact["B0"])
        eA = round_half_up(Fraction(eB) * params.alpha / (params.alpha - params.eta))
        rootA = round_half_up(Fraction(eA) / params.alpha)
    dexp = q - rootA  # Delta = 2^-dexp
    if dexp < 0:
        raise InputError(f"Delta exponent {dexp} negative; q={q} too small for these exponents")
    eC0 = eA - eB
    eC1 = round_half_up(params.gamma * dexp) if rounding == "nearest" else int(q * mult["C1"])

    gap_a = q - dexp - eA
    gap_b = q - dexp - eB
    gap_c0 = q - eC0
    gap_c1 = dexp - eC1
    for name, g in (("A", gap_a), ("B", gap_b), ("C0", gap_c0), ("C1", gap_c1)):
        if g < 0:
            raise InputError(f"{name} gap exponent {g} negative; parameters infeasible at q={q}")
    if gap_c0 < dexp:
        raise InputError("C0 spacing below the C1 cluster width; translates would overlap")

    A = arithmetic_progression(q, gap_a, 1 << eA)
    B = arithmetic_progression(q, gap_b, 1 << eB)
    c0_stride, c1_stride = 1 << gap_c0, 1 << gap_c1
    C = make_grid_set(
        q,
        [i * c0_stride + j * c1_stride for i in range(1 << eC0) for j in range(1 << eC1)],
    )
    meta = {
        "q": q,
        "rounding": rounding,
        "exact_exponents": {k: str(v) for k, v in exact.items()},
        "used_exponents": {"B0": eB, "A0": eA, "C0": eC0, "C1": eC1, "delta_exp": dexp},
        "cardinalities": {"A": len(A), "B": len(B), "C0": 1 << eC0, "C1": 1 << eC1, "C": len(C)},
        "delta_over_Delta_exp": dexp - q,
    }
    return A, B, C, meta


def small_diameter_example(q: int, rb_exp: int, rc_exp: int, A: GridSet | None = None):
    """B, C full sub-grids with diam(B) diam(C) <= delta, plus a default AP A."""
    if rb_exp < 0 or rc_exp < 0:
        raise InputError("radius exponents must be >= 0")
    if rb_exp + rc_exp < q:
        raise InputError(f"need rb_exp + rc_exp >= q for diam(B) diam(C) <= delta, got {rb_exp + rc_exp} < {q}")
    B = make_grid_set(q, range(0, (1 << (q - rb_exp)) + 1)) if rb_exp < q else make_grid_set(q, [0, 1])
    C = make_grid_set(q, range(0, (1 << (q - rc_exp)) + 1)) if rc_exp < q else make_grid_set(q, [0, 1])
    if rb_exp == q:
        B = make_grid_set(q, [0])
    if rc_exp == q:
        C = make_grid_set(q, [0])
    if A is None:
        a_count_exp = min(8, q)
        A = arithmetic_progression(q, q - a_count_exp, 1 << a_count_exp)
    return A, B, C


def concentration_example(q: int, a_exp: int, b_exp: int):
    """A, B full sub-grids of [0, 2^a_exp delta] and [0, 2^b_exp delta]."""
    if not (0 <= b_exp <= a_exp <= q):
        raise InputError(f"need 0 <= b_exp <= a_exp <= q, got a_exp={a_exp}, b_exp={b_exp}")
    A = make_grid_set(q, range(1 << a_exp))
    B = make_grid_set(q, range(1 << b_exp))
    return A, B


def uniform_tree(q: int, T: int, branching, seed: int, salt: str = "tree") -> GridSet:
    """Random uniform set with the given per-level branching numbers."""
    if T < 1 or q % T:
        raise InputError(f"block exponent T={T} must divide q={q}")
    m = q // T
    branching = tuple(int(n) for n in branching)
    if len(branching) != m:
        raise InputError(f"need {m} branching numbers, got {len(branching)}")
    for n in branching:
        if n < 1 or n > (1 << T) or n & (n - 1):
            raise InputError(f"branching numbers must be powers of 2 in [1, 2^{T}], got {n}")
    cells = [0]
    for level, n in enumerate(branching, start=1):
        nxt = []
        for cell in cells:
            rng = _SplitMix64(_mix(seed, salt, level, cell))
            for pick in _choose_children(n, 1 << T, rng):
                nxt.append((cell << T) | pick)
        cells = nxt
    return make_grid_set(q, cells)


def _constant_branching(T: int, s: Fraction) -> int:
    n = 1 << max(0, min(T, round_half_up(Fraction(s) * T)))
    return n


def random_katz_tao(q: int, T: int, s: Fraction, seed: int) -> GridSet:
    """Uniform tree with branching 2^round(sT) per level; Katz-Tao (delta, s, O(1))."""
    n = _constant_branching(T, s)
    return uniform_tree(q, T, [n] * (q // T), seed, salt="katz-tao")


def random_frostman(q: int, T: int, s: Fraction, seed: int) -> GridSet:
    """Uniform tree with branching 2^round(sT) per level; Frostman (delta, s, O(1))."""
    n = _constant_branching(T, s)
    return uniform_tree(q, T, [n] * (q // T), seed, salt="frostman")
