"""Exact arithmetic for values of the form coeff * prod(base_i ** exp_i).

Regularity constants are counts divided by rational powers of rational radii,
e.g. 3 * (1/8)**(-1/2).  Such values are irrational in general, but any two of
them compare exactly: clear the exponent denominators and compare integer
powers.  ExactPos packages that, so no counting path ever touches a float.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm


def iroot(n: int, k: int) -> int:
    """Largest t >= 0 with t**k <= n, for n >= 0 and k >= 1."""
    if n < 0:
        raise ValueError("iroot of a negative number")
    if k < 1:
        raise ValueError("iroot order must be >= 1")
    if n == 0 or k == 1:
        return n
    # Integer Newton iteration started above the true root.
    t = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        s = ((k - 1) * t + n // t ** (k - 1)) // k
        if s >= t:
            break
        t = s
    while t ** k > n:
        t -= 1
    while (t + 1) ** k <= n:
        t += 1
    return t


def floor_pow2(e: Fraction) -> int:
    """floor(2**e) for rational e; 0 when e < 0."""
    if e < 0:
        return 0
    p, u = e.numerator, e.denominator
    return iroot(1 << p, u)


def round_half_up(x: Fraction) -> int:
    """Nearest integer to x, ties rounded up: floor(x + 1/2)."""
    return (2 * x.numerator + x.denominator) // (2 * x.denominator)


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


@dataclass(frozen=True)
class ExactPos:
    """A positive real coeff * prod(base**exp) with exact order comparisons.

    coeff and every base are positive rationals; exponents are rationals.
    The represented value may be irrational; comparisons are exact integer
    arithmetic after raising both sides to the lcm of exponent denominators.
    """

    coeff: Fraction
    factors: tuple[tuple[Fraction, Fraction], ...] = ()

    def __post_init__(self):
        if self.coeff <= 0:
            raise ValueError("ExactPos requires a positive coefficient")
        merged: dict[Fraction, Fraction] = {}
        for base, exp in self.factors:
            base = _as_fraction(base)
            exp = _as_fraction(exp)
            if base <= 0:
                raise ValueError("ExactPos bases must be positive")
            if base == 1 or exp == 0:
                continue
            merged[base] = merged.get(base, Fraction(0)) + exp
        clean = tuple(sorted((b, e) for b, e in merged.items() if e != 0))
        object.__setattr__(self, "factors", clean)
        object.__setattr__(self, "coeff", _as_fraction(self.coeff))

    @classmethod
    def of(cls, value) -> "ExactPos":
        if isinstance(value, ExactPos):
            return value
        return cls(_as_fraction(value))

    @classmethod
    def pow2(cls, exponent: Fraction) -> "ExactPos":
        """2**exponent as an exact value."""
        return cls(Fraction(1), ((Fraction(2), _as_fraction(exponent)),))

    def __mul__(self, other) -> "ExactPos":
        other = ExactPos.of(other)
        return ExactPos(self.coeff * other.coeff, self.factors + other.factors)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ExactPos":
        other = ExactPos.of(other)
        inv = tuple((b, -e) for b, e in other.factors)
        return ExactPos(self.coeff / other.coeff, self.factors + inv)

    def __rtruediv__(self, other) -> "ExactPos":
        return ExactPos.of(other) / self

    def __pow__(self, n: int) -> "ExactPos":
        if not isinstance(n, int):
            raise TypeError("ExactPos powers must be integers")
        if n == 0:
            return ExactPos(Fraction(1))
        return ExactPos(self.coeff ** n, tuple((b, e * n) for b, e in self.factors))

    def _cmp(self, other) -> int:
        """Sign of self - other, computed exactly."""
        other = ExactPos.of(other)
        ratio = self / other
        u = lcm(*(e.denominator for _, e in ratio.factors)) if ratio.factors else 1
        acc = ratio.coeff ** u
        for base, exp in ratio.factors:
            acc *= base ** int(exp * u)
        if acc > 1:
            return 1
        if acc < 1:
            return -1
        return 0

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        if not isinstance(other, (ExactPos, int, Fraction)):
            return NotImplemented
        return self._cmp(other) == 0

    def __hash__(self):
        # Canonical hash: compare-equal values of rational magnitude hash alike;
        # irrational ones hash on the normalized representation.
        frac = self.as_fraction()
        if frac is not None:
            return hash(frac)
        return hash((self.coeff, self.factors))

    def as_fraction(self) -> Fraction | None:
        """The exact rational value, or None when the value is irrational."""
        acc = self.coeff
        for base, exp in self.factors:
            if exp.denominator != 1:
                return None
            acc *= base ** exp.numerator
        return acc

    def __float__(self) -> float:
        acc = float(self.coeff)
        for base, exp in self.factors:
            acc *= float(base) ** float(exp)
        return acc

    def __repr__(self):
        if not self.factors:
            return f"ExactPos({self.coeff})"
        terms = " * ".join(f"({b})^({e})" for b, e in self.factors)
        return f"ExactPos({self.coeff} * {terms})"

    def to_json(self) -> dict:
        return {
            "coeff": str(self.coeff),
            "factors": [[str(b), str(e)] for b, e in self.factors],
            "approx": float(self),
        }


def max_exact(values) -> ExactPos:
    """Maximum of a nonempty iterable of ExactPos values."""
    it = iter(values)
    try:
        best = next(it)
    except StopIteration:
        raise ValueError("max_exact of empty iterable") from None
    for v in it:
        if v > best:
            best = v
    return best
