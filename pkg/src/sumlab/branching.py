"""Branching functions of uniform sets and their slope decompositions.

The increasing-slope decomposition is the lower convex envelope of the
points (j, f(j)).  The minimum-length variant is computed by an exact
dynamic program over integer breakpoints: a block [u, v] carries the
largest slope with zero superlinearity defect, the support slope
s*(u, v) = min over nodes x in (u, v] of (f(x) - f(u)) / (x - u), and the
program maximizes the total drift over all decompositions with block
length >= tau*m and strictly increasing support slopes.  Every output is
re-checked against the three contract properties before being returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .errors import HypothesisError, InputError
from .exact import ExactPos
from .extraction import UniformStructure, is_uniform, skeleton
from .gridset import DyadicInterval, GridSet, cells, renormalize
from .regularity import frostman_constant, katz_tao_constant


@dataclass(frozen=True)
class BranchingFunction:
    """f(j) = log2 |P|_{2^-jT} / T on integer nodes, linear in between."""

    T: int
    values: tuple[Fraction, ...]

    def __post_init__(self):
        vals = tuple(Fraction(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) < 1 or vals[0] != 0:
            raise InputError("branching function must start at f(0) = 0")
        for a, b in zip(vals, vals[1:]):
            if not (0 <= b - a <= 1):
                raise InputError("branching increments must lie in [0, 1]")

    @property
    def m(self) -> int:
        return len(self.values) - 1

    def __call__(self, j: int) -> Fraction:
        return self.values[j]

    def to_json(self) -> dict:
        return {"T": self.T, "values": [str(v) for v in self.values]}

    @classmethod
    def from_dict(cls, data: dict) -> "BranchingFunction":
        try:
            return cls(T=data["T"], values=tuple(Fraction(v) for v in data["values"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad branching-function JSON: {exc}") from exc


@dataclass(frozen=True)
class SlopeDecomposition:
    """Breakpoints 0 = a_0 < ... < a_n = m with strictly increasing slopes."""

    variant: str  # "hull" | "min-length"
    breakpoints: tuple[int, ...]
    slopes: tuple[Fraction, ...]
    epsilon: Fraction | None = None
    tau: Fraction | None = None

    @property
    def n(self) -> int:
        return len(self.slopes)

    def total_drift(self) -> Fraction:
        return sum(
            (self.breakpoints[j + 1] - self.breakpoints[j]) * self.slopes[j]
            for j in range(self.n)
        )

    def to_json(self) -> dict:
        return {
            "variant": self.variant,
            "breakpoints": list(self.breakpoints),
            "slopes": [str(s) for s in self.slopes],
            "epsilon": str(self.epsilon) if self.epsilon is not None else None,
            "tau": str(self.tau) if self.tau is not None else None,
        }


@dataclass(frozen=True)
class SuperlinearityCheck:
    ok: bool
    worst_node: int
    min_slack: Fraction


@dataclass(frozen=True)
class CertificateCheck:
    """Result of the slope-condition test, with the measured constant ratio."""

    holds: bool
    worst_node: int
    min_slack: Fraction
    measured_ratio: ExactPos | None = None


def branching_function(struct: UniformStructure) -> BranchingFunction:
    """Cumulative log2-branching profile of a uniform structure."""
    vals = [Fraction(0)]
    for n in struct.branching:
        vals.append(vals[-1] + Fraction(n.bit_length() - 1, struct.T))
    return BranchingFunction(T=struct.T, values=tuple(vals))


def chord_slope(f: BranchingFunction, a: int, b: int) -> Fraction:
    """(f(b) - f(a)) / (b - a)."""
    if not (0 <= a < b <= f.m):
        raise InputError(f"need 0 <= a < b <= m, got a={a}, b={b}, m={f.m}")
    return (f(b) - f(a)) / (b - a)


def is_superlinear(f: BranchingFunction, a: int, b: int, sigma: Fraction, eps: Fraction) -> SuperlinearityCheck:
    """Check f(x) >= f(a) + sigma (x - a) - eps (b - a) at every node of [a, b].

    Node checks suffice: f is affine between integer nodes.
    """
    if not (0 <= a < b <= f.m):
        raise InputError(f"need 0 <= a < b <= m, got a={a}, b={b}, m={f.m}")
    sigma, eps = Fraction(sigma), Fraction(eps)
    worst_node, worst = a, None
    for x in range(a, b + 1):
        slack = f(x) - f(a) - sigma * (x - a) + eps * (b - a)
        if worst is None or slack < worst:
            worst, worst_node = slack, x
    return SuperlinearityCheck(ok=worst >= 0, worst_node=worst_node, min_slack=worst)


def decompose_hull(f: BranchingFunction) -> SlopeDecomposition:
    """Vertices of the lower convex envelope of {(j, f(j))}."""
    if f.m == 0:
        raise InputError("hull decomposition needs m >= 1")
    stack: list[int] = [0]
    for x in range(1, f.m + 1):
        while len(stack) >= 2:
            x1, x2 = stack[-2], stack[-1]
            # pop x2 unless slope(x1, x2) < slope(x2, x)
            if (f(x2) - f(x1)) * (x - x2) < (f(x) - f(x2)) * (x2 - x1):
                break
            stack.pop()
        stack.append(x)
    breakpoints = tuple(stack)
    slopes = tuple(
        (f(b) - f(a)) / (b - a) for a, b in zip(breakpoints, breakpoints[1:])
    )
    return SlopeDecomposition(variant="hull", breakpoints=breakpoints, slopes=slopes)


def _support_blocks(f: BranchingFunction, length_min: Fraction):
    """Support slope and scaled drift of every admissible block [u, v].

    Returns (blocks, D) where blocks[(u, v)] = (slope_num, slope_den, drift)
    with drift = (v - u) * s*(u, v) * D an exact integer.
    """
    m = f.m
    denom = lcm(*(v.denominator for v in f.values), 1)
    fn = [int(v * denom) for v in f.values]
    L = lcm(*range(1, m + 1))
    blocks: dict[tuple[int, int], tuple[int, int, int]] = {}
    for u in range(m):
        best_num, best_den, best_x = None, None, None
        for v in range(u + 1, m + 1):
            num, den = fn[v] - fn[u], v - u
            if best_num is None or num * best_den < best_num * den:
                best_num, best_den, best_x = num, den, v
            if Fraction(v - u) >= length_min:
                drift = (v - u) * best_num * (L // best_den)
                blocks[(u, v)] = (best_num, best_den, drift)
    return blocks, denom * L


def decompose_min_length(f: BranchingFunction, eps: Fraction) -> SlopeDecomposition:
    """Best decomposition with blocks of length >= (eps/3) m, exact arithmetic.

    Exhausts all integer breakpoint choices by dynamic programming and
    maximizes the total drift; raises if even the optimum loses more than
    eps * m, which would falsify the tau = eps/3 contract.
    """
    eps = Fraction(eps)
    if not (0 < eps <= 3):
        raise InputError(f"epsilon must lie in (0, 3], got {eps}")
    if f.m == 0:
        raise InputError("decomposition needs m >= 1")
    tau = eps / 3
    m = f.m
    length_min = tau * m
    blocks, D = _support_blocks(f, length_min)

    # best[(u, v)] = (drift_total, -n_blocks, parent_start) for the best chain
    # of admissible blocks ending with [u, v], slopes strictly increasing.
    best: dict[tuple[int, int], tuple[int, int, int | None]] = {}
    for (u, v), (num, den, drift) in sorted(blocks.items()):
        if u == 0:
            cand = (drift, -1, None)
            cur = best.get((u, v))
            if cur is None or cand > cur:
                best[(u, v)] = cand
        for t in range(u):
            prev = best.get((t, u))
            if prev is None:
                continue
            pn, pd, _ = blocks[(t, u)]
            if pn * den >= num * pd:  # need s*(t,u) < s*(u,v)
                continue
            cand = (prev[0] + drift, prev[1] - 1, t)
            cur = best.get((u, v))
            if cur is None or cand > cur:
                best[(u, v)] = cand

    finals = [(val, u) for (u, v), val in best.items() if v == m]
    if not finals:
        raise HypothesisError("no admissible decomposition; tau too large for this m")
    (drift_total, _, _), u_last = max(finals)
    # Tolerate ties deterministically: max() on tuples picks the largest
    # drift, then the fewest blocks, then the largest last start.
    chain = []
    u, v = u_last, m
    while True:
        chain.append((u, v))
        parent = best[(u, v)][2]
        if parent is None:
            break
        u, v = parent, u
    chain.reverse()

    breakpoints = tuple([chain[0][0]] + [v for _, v in chain])
    # slope numerators live over the common value denominator
    denom = lcm(*(v.denominator for v in f.values), 1)
    slopes = tuple(Fraction(blocks[b][0], blocks[b][1] * denom) for b in chain)

    result = SlopeDecomposition(
        variant="min-length", breakpoints=breakpoints, slopes=slopes, epsilon=eps, tau=tau
    )
    _check_min_length(f, result, eps, tau)
    return result


def _check_min_length(f: BranchingFunction, dec: SlopeDecomposition, eps: Fraction, tau: Fraction) -> None:
    m = f.m
    for a, b in zip(dec.breakpoints, dec.breakpoints[1:]):
        if Fraction(b - a) < tau * m:
            raise HypothesisError(f"block [{a}, {b}] shorter than tau*m = {tau * m}")
    for s1, s2 in zip(dec.slopes, dec.slopes[1:]):
        if s1 >= s2:
            raise HypothesisError("slopes not strictly increasing")
    for (a, b), s in zip(zip(dec.breakpoints, dec.breakpoints[1:]), dec.slopes):
        chk = is_superlinear(f, a, b, s, Fraction(0))
        if not chk.ok:
            raise HypothesisError(f"block [{a}, {b}] not ({s}, 0)-superlinear")
    if dec.total_drift() < f(m) - eps * m:
        raise HypothesisError(
            f"optimal decomposition drifts {dec.total_drift()} < f(m) - eps*m = {f(m) - eps * m}"
        )


def katz_tao_certificate(
    f: BranchingFunction,
    sigma: Fraction,
    eps: Fraction,
    P: GridSet | None = None,
) -> CertificateCheck:
    """Check the descent condition f(m) - f(x) <= sigma (m - x) + eps m.

    When it holds, a uniform set realizing f is Katz-Tao
    (delta, sigma, O_T(1) * delta^-eps).  If the realizing set is supplied,
    the measured katz_tao_constant / delta^-eps ratio is returned with it.
    """
    sigma, eps = Fraction(sigma), Fraction(eps)
    if not (0 <= sigma <= 1):
        raise InputError(f"sigma must lie in [0, 1], got {sigma}")
    if eps < 0:
        raise InputError(f"eps must be >= 0, got {eps}")
    m = f.m
    worst_node, worst = m, None
    for x in range(m + 1):
        slack = sigma * (m - x) + eps * m - (f(m) - f(x))
        if worst is None or slack < worst:
            worst, worst_node = slack, x
    holds = worst >= 0
    ratio = None
    if P is not None:
        measured = katz_tao_constant(P, sigma, mode="dyadic")
        ratio = measured / ExactPos.pow2(Fraction(P.q) * eps)
    return CertificateCheck(holds=holds, worst_node=worst_node, min_slack=worst, measured_ratio=ratio)


def frostman_certificate(P: GridSet, T: int, a: int, b: int, sigma: Fraction) -> ExactPos:
    """Measured Frostman constant of the renormalized pieces of a uniform set.

    For each Q in D_{2^-aT}(P), rescale P ∩ Q to [0,1) and measure its
    Frostman constant at resolution Delta = 2^-T(b-a); the maximum over Q
    is the certificate value (expected O_{T}(1) under superlinearity).
    """
    sigma = Fraction(sigma)
    struct = is_uniform(P, T)
    if not isinstance(struct, UniformStructure):
        raise HypothesisError(f"set is not uniform: {struct.reason}")
    f = branching_function(struct)
    if not (0 <= a < b <= f.m):
        raise InputError(f"need 0 <= a < b <= m, got a={a}, b={b}, m={f.m}")
    chk = is_superlinear(f, a, b, sigma, Fraction(0))
    if not chk.ok:
        raise HypothesisError(
            f"branching function is not ({sigma}, 0)-superlinear on [{a}, {b}]"
            f" (violated at node {chk.worst_node})"
        )
    level = a * T
    out = None
    for pos in cells(P, level):
        piece = renormalize(P, DyadicInterval(level, pos))
        skel = skeleton(piece, (b - a) * T)
        c = frostman_constant(skel, sigma, mode="dyadic")
        if out is None or c > out:
            out = c
    return out


@dataclass(frozen=True)
class ScaleSelection:
    """Output of the coarse Katz-Tao scale finder."""

    n0: int
    delta_exp: int  # Delta = 2^-delta_exp
    skeleton: GridSet
    constant: ExactPos
    decomposition: SlopeDecomposition

    def to_json(self) -> dict:
        return {
            "n0": self.n0,
            "delta_exp": self.delta_exp,
            "skeleton": self.skeleton.to_dict(),
            "constant": self.constant.to_json(),
            "decomposition": self.decomposition.to_json(),
        }


def find_katz_tao_scale(P: GridSet, T: int, alpha_bar: Fraction) -> ScaleSelection:
    """Coarsest hull scale at which P is Katz-Tao with exponent alpha_bar.

    Hull-decomposes the branching function, takes n0 = max{j : sigma_j <=
    alpha_bar} and Delta = 2^-a_{n0} T; the Delta-skeleton D_Delta(P) is
    returned with its measured constant.
    """
    alpha_bar = Fraction(alpha_bar)
    if not (0 < alpha_bar <= 1):
        raise InputError(f"alpha_bar must lie in (0, 1], got {alpha_bar}")
    struct = is_uniform(P, T)
    if not isinstance(struct, UniformStructure):
        raise HypothesisError(f"set is not uniform: {struct.reason}")
    f = branching_function(struct)
    dec = decompose_hull(f)
    admissible = [j for j, s in enumerate(dec.slopes, start=1) if s <= alpha_bar]
    if not admissible:
        raise HypothesisError(
            f"no admissible scale: smallest hull slope {dec.slopes[0]} exceeds {alpha_bar}"
        )
    n0 = max(admissible)
    a_n0 = dec.breakpoints[n0]
    level = a_n0 * T
    skel = skeleton(P, level)
    const = katz_tao_constant(skel, alpha_bar, mode="dyadic")
    return ScaleSelection(n0=n0, delta_exp=level, skeleton=skel, constant=const, decomposition=dec)
