"""Structured subset extraction: Katz-Tao subsets, exhaustions, uniform subsets.

Uniformization processes scale levels fine-to-coarse.  At each level it
chooses the branching value N (a power of two <= 2^T) maximizing
N * #(parent cells with >= N children), keeps exactly the N lowest-index
children of every such parent and drops the other parents.  Ties prefer the
larger N, so already-uniform sets pass through unchanged.  Since every
child count n satisfies n <= 2 * 2^min(floor(log2 n), T-1), the best of the
T candidates N in {1, 2, ..., 2^(T-1)} alone retains at least 1/(2T) of the
current points, which gives the exact (2T)^-m cardinality guarantee.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError
from .exact import floor_pow2
from .gridset import GridSet, ScaleParams, make_grid_set
from .regularity import katz_tao_constant


@dataclass(frozen=True)
class UniformStructure:
    """Constant branching numbers N_j along the scale chain 2^-jT."""

    T: int
    m: int
    branching: tuple[int, ...]

    def __post_init__(self):
        if len(self.branching) != self.m:
            raise InputError("branching sequence length must equal m")
        for n in self.branching:
            if n < 1 or n > (1 << self.T) or n & (n - 1):
                raise InputError(f"branching numbers must be powers of 2 in [1, 2^T], got {n}")

    @property
    def cardinality(self) -> int:
        out = 1
        for n in self.branching:
            out *= n
        return out

    def to_json(self) -> dict:
        return {"T": self.T, "m": self.m, "branching": list(self.branching)}


@dataclass(frozen=True)
class UniformityFailure:
    """First offending level of a non-uniform set, with a witness cell pair."""

    level: int
    cell_a: int
    count_a: int
    cell_b: int | None
    count_b: int | None
    reason: str

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "cell_a": self.cell_a,
            "count_a": self.count_a,
            "cell_b": self.cell_b,
            "count_b": self.count_b,
            "reason": self.reason,
        }


def _require_unit_interval(P: GridSet, what: str) -> None:
    if len(P) == 0:
        raise InputError(f"{what} is undefined for the empty set")
    if P.span != 1 or P.indices[-1] >= (1 << P.q):
        raise InputError(f"{what} requires a subset of [0, 1)")


def _child_counts(cell_list: list[int], T: int) -> dict[int, list[int]]:
    """Group cells at one level by their parent cell one block-level up."""
    groups: dict[int, list[int]] = {}
    for c in cell_list:
        groups.setdefault(c >> T, []).append(c)
    return groups


def is_uniform(P: GridSet, T: int):
    """UniformStructure if every level has constant power-of-2 branching, else a failure report."""
    _require_unit_interval(P, "uniformity")
    sp = ScaleParams.for_grid(P.q, T)
    branching = []
    for j in range(sp.m, 0, -1):
        fine = {i >> (P.q - j * T) for i in P.indices}
        groups = _child_counts(sorted(fine), T)
        items = sorted((parent, len(kids)) for parent, kids in groups.items())
        counts = {n for _, n in items}
        if len(counts) > 1:
            (ca, na), (cb, nb) = _first_conflict(items)
            return UniformityFailure(
                level=j, cell_a=ca, count_a=na, cell_b=cb, count_b=nb,
                reason=f"level {j}: cells {ca} and {cb} branch {na} vs {nb}",
            )
        n = counts.pop()
        if n & (n - 1):
            parent = items[0][0]
            return UniformityFailure(
                level=j, cell_a=parent, count_a=n, cell_b=None, count_b=None,
                reason=f"level {j}: constant branching {n} is not a power of 2",
            )
        branching.append(n)
    branching.reverse()
    return UniformStructure(T=T, m=sp.m, branching=tuple(branching))


def _first_conflict(items):
    base_cell, base_n = items[0]
    for cell, n in items[1:]:
        if n != base_n:
            return (base_cell, base_n), (cell, n)
    raise AssertionError("no conflict in conflicting items")


def uniformize(P: GridSet, T: int) -> tuple[GridSet, UniformStructure]:
    """Largest-mass greedy uniform subset; always |P'| >= (2T)^-m |P|."""
    _require_unit_interval(P, "uniformization")
    sp = ScaleParams.for_grid(P.q, T)
    indices = list(P.indices)
    branching = [0] * sp.m
    for j in range(sp.m, 0, -1):
        shift = P.q - j * T
        groups: dict[int, list[int]] = {}
        for i in indices:
            groups.setdefault(i >> (shift + T), []).append(i)
        cells_per_parent = {
            parent: sorted({i >> shift for i in members})
            for parent, members in groups.items()
        }
        counts = [len(c) for c in cells_per_parent.values()]
        best_n, best_retained = 1, 0
        for k in range(T + 1):
            n = 1 << k
            retained = n * sum(1 for c in counts if c >= n)
            if retained > best_retained or (retained == best_retained and n > best_n):
                best_n, best_retained = n, retained
        kept_cells = set()
        for parent in sorted(cells_per_parent):
            kids = cells_per_parent[parent]
            if len(kids) >= best_n:
                kept_cells.update(kids[:best_n])
        indices = [i for i in indices if (i >> shift) in kept_cells]
        branching[j - 1] = best_n
    result = GridSet(q=P.q, span=1, indices=tuple(indices))
    return result, UniformStructure(T=T, m=sp.m, branching=tuple(branching))


def uniform_pieces(P: GridSet, T: int, eps: Fraction) -> list[tuple[GridSet, UniformStructure]]:
    """Disjoint uniform pieces of size >= delta^2eps |P|, leftover <= delta^eps |P|."""
    eps = Fraction(eps)
    if eps <= 0:
        raise InputError("epsilon must be positive")
    t0 = min_block_exponent(eps)
    if T < t0:
        raise InputError(f"T={T} too small for epsilon={eps}; need T >= {t0}")
    _require_unit_interval(P, "uniform decomposition")
    ScaleParams.for_grid(P.q, T)
    n0 = len(P)
    p, u = eps.numerator, eps.denominator
    # |residual| <= delta^eps |P|  <=>  residual^u <= n0^u / 2^(q p)  (exact)
    def small_enough(n: int) -> bool:
        return n ** u * (1 << (P.q * p)) <= n0 ** u

    pieces = []
    residual = P
    while len(residual) and not small_enough(len(residual)):
        piece, struct = uniformize(residual, T)
        pieces.append((piece, struct))
        kept = set(piece.indices)
        residual = GridSet(q=P.q, span=1, indices=tuple(i for i in residual.indices if i not in kept))
    return pieces


def min_block_exponent(eps: Fraction) -> int:
    """Smallest T >= 1 with log2(2T) <= eps * T, checked exactly."""
    eps = Fraction(eps)
    p, u = eps.numerator, eps.denominator
    T = 1
    while (2 * T) ** u > 1 << (p * T):
        T += 1
    return T


def extract_katz_tao_subset(P: GridSet, rho: Fraction, s: Fraction) -> GridSet:
    """Greedy dyadic-capacity subset that is Katz-Tao (rho, s, O(1)) at resolution rho.

    Descends the dyadic tree from the unit scale to side rho, allowing each
    node at side 2^-j at most floor((2^-j / rho)^s) cells of side rho and
    filling that capacity with the heaviest children first (ties: lower
    index).  All points of P inside a selected rho-cell are kept.
    """
    rho = Fraction(rho)
    s = Fraction(s)
    if len(P) == 0:
        raise InputError("extraction needs a nonempty set")
    if not (0 <= s <= 1):
        raise InputError(f"exponent s must lie in [0, 1], got {s}")
    if rho.numerator != 1 or rho.denominator & (rho.denominator - 1):
        raise InputError(f"rho must be a power of 2, got {rho}")
    level = rho.denominator.bit_length() - 1
    if level > P.q:
        raise InputError(f"rho={rho} is below the grid resolution 2^-{P.q}")

    shift = P.q - level
    weights: dict[int, int] = {}
    for i in P.indices:
        cell = i >> shift
        weights[cell] = weights.get(cell, 0) + 1
    all_cells = sorted(weights)

    def cap(j: int) -> int:
        return max(1, floor_pow2((level - j) * s))

    def select(cell_lo: int, cell_hi: int, j: int, budget: int, pool: list[int]) -> list[int]:
        """Pick at most `budget` rho-cells from pool (cells in [cell_lo, cell_hi))."""
        if not pool or budget <= 0:
            return []
        if j == level:
            return [pool[0]]
        mid_shift = level - j - 1
        children: dict[int, list[int]] = {}
        for c in pool:
            children.setdefault(c >> mid_shift, []).append(c)
        order = sorted(
            children,
            key=lambda ch: (-sum(weights[c] for c in children[ch]), ch),
        )
        chosen: list[int] = []
        child_cap = cap(j + 1)
        for ch in order:
            if budget <= 0:
                break
            take = min(budget, child_cap)
            got = select(ch << mid_shift, (ch + 1) << mid_shift, j + 1, take, children[ch])
            chosen.extend(got)
            budget -= len(got)
        return chosen

    # Level-0 cells (unit intervals, at most span + boundary of them) each get
    # the full unit-scale capacity.
    top: dict[int, list[int]] = {}
    for c in all_cells:
        top.setdefault(c >> level if level else c, []).append(c)
    selected: list[int] = []
    top_order = sorted(top, key=lambda u: (-sum(weights[c] for c in top[u]), u))
    for unit in top_order:
        selected.extend(select(unit << level, (unit + 1) << level, 0, cap(0), top[unit]))

    keep = set(selected)
    kept_indices = tuple(i for i in P.indices if (i >> shift) in keep)
    return GridSet(q=P.q, span=P.span, indices=kept_indices)


def skeleton(P: GridSet, level: int) -> GridSet:
    """The level-resolution skeleton: occupied cells of side 2^-level as a GridSet."""
    if level < 0 or level > P.q:
        raise InputError(f"level {level} outside [0, {P.q}]")
    shift = P.q - level
    return make_grid_set(level, sorted({i >> shift for i in P.indices}), span=P.span)


def exhaust_katz_tao(P: GridSet, rho: Fraction, s: Fraction, c: Fraction) -> tuple[list[GridSet], GridSet]:
    """Repeatedly extract disjoint Katz-Tao (rho, s) pieces until <= c|P| is left."""
    c = Fraction(c)
    if not (0 < c < 1):
        raise InputError(f"retention fraction must lie in (0, 1), got {c}")
    if len(P) == 0:
        raise InputError("exhaustion needs a nonempty set")
    threshold = c * len(P)
    pieces = []
    residual = P
    while len(residual) and Fraction(len(residual)) > threshold:
        piece = extract_katz_tao_subset(residual, rho, s)
        pieces.append(piece)
        kept = set(piece.indices)
        residual = GridSet(q=P.q, span=P.span, indices=tuple(i for i in residual.indices if i not in kept))
    return pieces, residual


def verify_extraction_bound(P: GridSet, piece: GridSet, rho: Fraction, s: Fraction, K: int):
    """Exact check of |piece| >= (delta/rho)^s |P| / (K * C) with C measured on P."""
    C = katz_tao_constant(P, s)
    rho = Fraction(rho)
    level = rho.denominator.bit_length() - 1
    # (delta/rho)^s = 2^-(q-level) s
    from .exact import ExactPos

    lhs = ExactPos.of(Fraction(len(piece)))
    rhs = ExactPos(Fraction(len(P), K), ((Fraction(1, 1 << (P.q - level)), s),)) / C
    return lhs >= rhs, C
