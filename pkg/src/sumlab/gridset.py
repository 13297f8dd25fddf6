"""Exact dyadic-grid representation of delta-separated sets on [0, span].

A GridSet stores a subset of the grid {k * 2^-q : k integer} as sorted
integer indices.  All covering numbers, restrictions and renormalizations
are integer arithmetic; the value of index i is exactly i / 2^q.

Covering convention: the grid domain is closed on the right, so the point
span itself (index span * 2^q) is representable; it is counted as belonging
to the extra dyadic cell [span, span + 2^-q) at every level.  We count
dyadic cells (not the "usual" covering number, which agrees up to a factor
of 2).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError


@dataclass(frozen=True)
class ScaleParams:
    """Scale chain delta = 2^-q, Delta_j = 2^-jT, with q = m*T."""

    q: int
    T: int
    m: int

    def __post_init__(self):
        if self.q < 1 or self.T < 1 or self.m < 1:
            raise InputError("ScaleParams requires q, T, m >= 1")
        if self.q != self.m * self.T:
            raise InputError(f"ScaleParams requires q = m*T, got q={self.q}, m*T={self.m * self.T}")

    @classmethod
    def for_grid(cls, q: int, T: int) -> "ScaleParams":
        if T < 1 or q < 1 or q % T != 0:
            raise InputError(f"block exponent T={T} must divide grid exponent q={q}")
        return cls(q=q, T=T, m=q // T)


@dataclass(frozen=True)
class GridSet:
    """Strictly increasing indices on span * 2^q + 1 grid points."""

    q: int
    span: int
    indices: tuple[int, ...]

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    @property
    def delta(self) -> Fraction:
        return Fraction(1, 1 << self.q)

    def values(self) -> list[Fraction]:
        return [Fraction(i, 1 << self.q) for i in self.indices]

    def to_dict(self) -> dict:
        return {"q": self.q, "span": self.span, "indices": list(self.indices)}

    @classmethod
    def from_dict(cls, data: dict) -> "GridSet":
        try:
            q = data["q"]
            span = data.get("span", 1)
            raw = data["indices"]
        except (KeyError, TypeError) as exc:
            raise InputError(f"grid-set JSON missing field: {exc}") from exc
        return make_grid_set(q, raw, span=span)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class DyadicInterval:
    """The half-open interval [k * 2^-level, (k+1) * 2^-level)."""

    level: int
    k: int

    def __post_init__(self):
        if self.level < 0:
            raise InputError(f"dyadic level must be >= 0, got {self.level}")
        if self.k < 0:
            raise InputError(f"dyadic position must be >= 0, got {self.k}")

    @property
    def side(self) -> Fraction:
        return Fraction(1, 1 << self.level)

    @property
    def left(self) -> Fraction:
        return Fraction(self.k, 1 << self.level)

    def index_range(self, q: int) -> tuple[int, int]:
        """[lo, hi) range of q-grid indices falling inside the interval."""
        if self.level > q:
            raise InputError(f"interval level {self.level} exceeds grid exponent {q}")
        w = 1 << (q - self.level)
        return self.k * w, (self.k + 1) * w


@dataclass(frozen=True)
class PairSet:
    """A subset G of A x B stored as (a_index, b_index) pairs."""

    q: int
    pairs: frozenset[tuple[int, int]]

    def __len__(self):
        return len(self.pairs)

    def __post_init__(self):
        top = 1 << self.q
        for a, b in self.pairs:
            if not (0 <= a <= top and 0 <= b <= top):
                raise InputError(f"pair index out of range: ({a}, {b}) at q={self.q}")


def make_grid_set(q: int, raw, span: int = 1) -> GridSet:
    """Sorted deduplicated GridSet; rejects indices outside [0, span * 2^q]."""
    if q < 0:
        raise InputError(f"grid exponent must be >= 0, got {q}")
    if span < 1:
        raise InputError(f"span must be >= 1, got {span}")
    top = span << q
    cleaned = sorted(set(int(i) for i in raw))
    for i in cleaned:
        if i < 0 or i > top:
            raise InputError(f"index {i} outside [0, {top}] for q={q}, span={span}")
    return GridSet(q=q, span=span, indices=tuple(cleaned))


def cells(P: GridSet, level: int) -> list[int]:
    """Sorted distinct dyadic cell positions of side 2^-level meeting P."""
    if level < 0 or level > P.q:
        raise InputError(f"level {level} outside [0, {P.q}]")
    shift = P.q - level
    return sorted({i >> shift for i in P.indices})


def from_cells(cell_positions, level: int, span: int = 1) -> GridSet:
    """GridSet at exponent `level` whose indices are the given cell positions."""
    return make_grid_set(level, cell_positions, span=span)


def covering_number(P: GridSet, level: int) -> int:
    """|P|_{2^-level}: number of dyadic cells of side 2^-level meeting P."""
    return len(cells(P, level))


def branching_between(P: GridSet, coarse: int, fine: int, Q: DyadicInterval) -> int:
    """|P intersect Q|_{2^-fine} for a dyadic Q of side 2^-coarse."""
    if not (0 <= coarse <= fine <= P.q):
        raise InputError(f"need 0 <= coarse <= fine <= q, got {coarse}, {fine}, {P.q}")
    if Q.level != coarse:
        raise InputError(f"interval level {Q.level} must equal coarse level {coarse}")
    lo, hi = Q.index_range(P.q)
    shift = P.q - fine
    return len({i >> shift for i in P.indices if lo <= i < hi})


def restrict(P: GridSet, Q: DyadicInterval) -> GridSet:
    """P intersect Q at unchanged resolution."""
    lo, hi = Q.index_range(P.q)
    if Q.k >= (P.span << Q.level) + 1:
        raise InputError(f"interval {Q} outside the [0, {P.span}] domain")
    kept = tuple(i for i in P.indices if lo <= i < hi)
    return GridSet(q=P.q, span=P.span, indices=kept)


def renormalize(P: GridSet, Q: DyadicInterval) -> GridSet:
    """Image of P intersect Q under the affine map sending Q onto [0, 1)."""
    lo, hi = Q.index_range(P.q)
    kept = tuple(i - lo for i in P.indices if lo <= i < hi)
    return GridSet(q=P.q - Q.level, span=1, indices=kept)


def diameter(P: GridSet) -> Fraction:
    """(max - min) * 2^-q, exactly."""
    if len(P) == 0:
        raise InputError("diameter of an empty set is undefined")
    return Fraction(P.indices[-1] - P.indices[0], 1 << P.q)
