"""Exact sum images {a + cb}, adversarial pair sets, and expansion search.

Sums a + cb with a in A, b in B and scalar c = k * 2^-q are binned onto the
delta-grid of [0, 2) by bin = floor((i * 2^q + k * j) / 2^q), all in integer
arithmetic.  The adversary realizing the theorems' "for all G" quantifier
keeps whole heaviest bins until its pair budget is met, which is exactly
optimal: for a fixed pair total, taking bins in decreasing multiplicity
order minimizes the number of occupied bins (exchange argument).

The inner product A x B is evaluated with numpy int64 when 2q + 1 bits fit
(q <= 30) and with arbitrary-precision Python integers otherwise.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .errors import InputError
from .exact import iroot
from .gridset import GridSet, PairSet, make_grid_set

_NUMPY_MAX_Q = 30


def _check_scalar(A: GridSet, B: GridSet, k: int) -> None:
    if A.q != B.q:
        raise InputError(f"exponent mismatch: A has q={A.q}, B has q={B.q}")
    if not (0 <= k <= (1 << A.q)):
        raise InputError(f"scalar index {k} outside [0, 2^q]")


def _bins_array(A: GridSet, B: GridSet, k: int):
    """Bin of a + cb for every (i, j) in A x B, flattened row-major."""
    q = A.q
    if q <= _NUMPY_MAX_Q:
        ai = np.asarray(A.indices, dtype=np.int64)
        bi = np.asarray(B.indices, dtype=np.int64)
        sums = (ai[:, None] << q) + k * bi[None, :]
        return (sums >> q).ravel()
    out = []
    for i in A.indices:
        base = i << q
        out.extend((base + k * j) >> q for j in B.indices)
    return np.asarray(out, dtype=object)


def sum_histogram(A: GridSet, B: GridSet, k: int) -> dict[int, int]:
    """Multiplicity of each occupied bin of {a + cb : (a, b) in A x B}, c = k * 2^-q."""
    _check_scalar(A, B, k)
    if len(A) == 0 or len(B) == 0:
        return {}
    bins, counts = np.unique(_bins_array(A, B, k), return_counts=True)
    return {int(b): int(n) for b, n in zip(bins, counts)}


def affine_image(A: GridSet, B: GridSet, k: int) -> GridSet:
    """Occupied bins of A + cB as a span-2 GridSet at the shared exponent."""
    hist = sum_histogram(A, B, k)
    return make_grid_set(A.q, sorted(hist), span=2)


def pair_image(G: PairSet, k: int) -> GridSet:
    """Occupied bins of {a + cb : (a, b) in G}."""
    if not (0 <= k <= (1 << G.q)):
        raise InputError(f"scalar index {k} outside [0, 2^q]")
    q = G.q
    bins = sorted({(a << q) + k * b >> q for a, b in G.pairs})
    return make_grid_set(q, bins, span=2)


def pair_budget(n_pairs: int, theta: Fraction | None, theta_exp: Fraction | None, q: int) -> int:
    """ceil(theta * n_pairs) with theta given directly or as delta^theta_exp."""
    if (theta is None) == (theta_exp is None):
        raise InputError("exactly one of theta, theta_exp must be given")
    if theta is not None:
        theta = Fraction(theta)
        if not (0 < theta <= 1):
            raise InputError(f"theta must lie in (0, 1], got {theta}")
        budget = -((-theta.numerator * n_pairs) // theta.denominator)
    else:
        e = Fraction(theta_exp)
        if e < 0:
            raise InputError(f"theta exponent must be >= 0, got {e}")
        # smallest integer b with b >= 2^-qe * n:  b^u * 2^(qp) >= n^u
        p, u = e.numerator, e.denominator
        b = iroot(n_pairs ** u // (1 << (q * p)), u)
        while b ** u * (1 << (q * p)) < n_pairs ** u:
            b += 1
        budget = b
    return max(1, min(budget, n_pairs))


@dataclass(frozen=True)
class AdversarialResult:
    pairs: PairSet
    covering: int
    bins: tuple[int, ...]
    budget: int

    def digest(self) -> str:
        """Stable content digest of the chosen pair set."""
        h = hashlib.sha256()
        h.update(f"q={self.pairs.q};budget={self.budget};bins={','.join(map(str, self.bins))};".encode())
        for a, b in sorted(self.pairs.pairs):
            h.update(f"{a},{b};".encode())
        return h.hexdigest()[:16]


def adversarial_covering(
    A: GridSet,
    B: GridSet,
    k: int,
    theta: Fraction | None = None,
    theta_exp: Fraction | None = None,
) -> int:
    """Covering of the optimal adversarial pair set, without materializing it."""
    _check_scalar(A, B, k)
    n_pairs = len(A) * len(B)
    if n_pairs == 0:
        raise InputError("adversarial covering needs nonempty A and B")
    budget = pair_budget(n_pairs, theta, theta_exp, A.q)
    _, counts = np.unique(_bins_array(A, B, k), return_counts=True)
    counts = sorted((int(c) for c in counts), reverse=True)
    total, used = 0, 0
    for c in counts:
        used += 1
        total += c
        if total >= budget:
            return used
    return used


def adversarial_pairs(
    A: GridSet,
    B: GridSet,
    k: int,
    theta: Fraction | None = None,
    theta_exp: Fraction | None = None,
) -> AdversarialResult:
    """The pair set G of prescribed density minimizing |{a + cb : (a,b) in G}|_delta.

    Whole bins are taken in order of decreasing multiplicity (ties: lower
    bin), and the last bin is trimmed to the exact budget keeping its
    lowest-index pairs.
    """
    _check_scalar(A, B, k)
    n_pairs = len(A) * len(B)
    if n_pairs == 0:
        raise InputError("adversarial pair selection needs nonempty A and B")
    budget = pair_budget(n_pairs, theta, theta_exp, A.q)

    bins = _bins_array(A, B, k)
    uniq, counts = np.unique(bins, return_counts=True)
    order = sorted(range(len(uniq)), key=lambda t: (-int(counts[t]), int(uniq[t])))

    chosen: list[int] = []
    total = 0
    for t in order:
        chosen.append(int(uniq[t]))
        total += int(counts[t])
        if total >= budget:
            break
    full_bins, last_bin = chosen[:-1], chosen[-1]
    need_from_last = budget - (total - int(counts[order[len(chosen) - 1]]))

    nb = len(B)
    pairs: set[tuple[int, int]] = set()
    if full_bins:
        mask = np.isin(bins, np.asarray(full_bins, dtype=bins.dtype))
        for pos in np.nonzero(mask)[0]:
            pairs.add((A.indices[int(pos) // nb], B.indices[int(pos) % nb]))
    last_positions = np.nonzero(bins == last_bin)[0]
    last_pairs = sorted(
        (A.indices[int(p) // nb], B.indices[int(p) % nb]) for p in last_positions
    )
    pairs.update(last_pairs[:need_from_last])

    return AdversarialResult(
        pairs=PairSet(q=A.q, pairs=frozenset(pairs)),
        covering=len(chosen),
        bins=tuple(sorted(chosen)),
        budget=budget,
    )


@dataclass(frozen=True)
class ExpansionRecord:
    c_index: int
    full_covering: int
    adversarial_covering: int
    pair_digest: str
    pair_count: int

    def to_json(self) -> dict:
        return {
            "c": self.c_index,
            "full": self.full_covering,
            "adversarial": self.adversarial_covering,
            "pair_digest": self.pair_digest,
            "pairs": self.pair_count,
        }


@dataclass(frozen=True)
class ExpansionReport:
    """Per-multiplier worst-case coverings and the best multiplier found."""

    theta: Fraction | None
    theta_exp: Fraction | None
    records: tuple[ExpansionRecord, ...]
    best_c: int
    best_adversarial: int
    base_cardinality: int

    @property
    def best_ratio(self) -> Fraction:
        return Fraction(self.best_adversarial, self.base_cardinality)

    def to_json(self) -> dict:
        return {
            "theta": str(self.theta) if self.theta is not None else None,
            "theta_exp": str(self.theta_exp) if self.theta_exp is not None else None,
            "per_c": [r.to_json() for r in self.records],
            "best_c": self.best_c,
            "best_adversarial": self.best_adversarial,
            "A_cardinality": self.base_cardinality,
            "best_ratio": str(self.best_ratio),
        }


def expansion_search(
    A: GridSet,
    B: GridSet,
    C: GridSet,
    theta: Fraction | None = None,
    theta_exp: Fraction | None = None,
    jobs: int = 1,
) -> ExpansionReport:
    """Adversarial and full coverings for every c in C; best c maximizes the former."""
    if len(C) == 0:
        raise InputError("expansion search needs a nonempty C")
    if C.q != A.q:
        raise InputError(f"exponent mismatch: C has q={C.q}, A has q={A.q}")

    def evaluate(k: int) -> ExpansionRecord:
        adv = adversarial_pairs(A, B, k, theta=theta, theta_exp=theta_exp)
        full = len(sum_histogram(A, B, k))
        return ExpansionRecord(
            c_index=k,
            full_covering=full,
            adversarial_covering=adv.covering,
            pair_digest=adv.digest(),
            pair_count=len(adv.pairs),
        )

    ks = list(C.indices)
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            records = tuple(pool.map(evaluate, ks))
    else:
        records = tuple(evaluate(k) for k in ks)

    best = max(records, key=lambda r: (r.adversarial_covering, -r.c_index))
    return ExpansionReport(
        theta=Fraction(theta) if theta is not None else None,
        theta_exp=Fraction(theta_exp) if theta_exp is not None else None,
        records=records,
        best_c=best.c_index,
        best_adversarial=best.adversarial_covering,
        base_cardinality=len(A),
    )


@dataclass(frozen=True)
class PiCheck:
    """Exact verdict on a (Pi)-type cardinality condition, with the slack in bits."""

    ok: bool
    margin_bits: float
    variant: str
    necessary_condition_ok: bool | None

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "margin_bits": self.margin_bits,
            "variant": self.variant,
            "necessary_condition_ok": self.necessary_condition_ok,
        }


def _power_compare(lhs: list[tuple[int, Fraction]], rhs: list[tuple[int, Fraction]]) -> bool:
    """prod base^exp >= prod base^exp with integer bases, exactly."""
    u = lcm(*(e.denominator for _, e in lhs + rhs), 1)
    left = Fraction(1)
    for base, e in lhs:
        left *= Fraction(base) ** int(e * u)
    right = Fraction(1)
    for base, e in rhs:
        right *= Fraction(base) ** int(e * u)
    return left >= right


def check_condition_pi(
    B: GridSet,
    C: GridSet,
    alpha: Fraction,
    beta: Fraction,
    gamma: Fraction,
    eta: Fraction,
    variant: str,
) -> PiCheck:
    """Exact check of |B|^g |C|^b delta^bg >= delta^-eta (c3) or the c4 analogue.

    The c3 variant pairs gamma with |B| and beta with |C|; c4 replaces beta
    by alpha.  Also reports the necessary-condition implication
    |B||C| >= |B|^(a/b) |C|^(a/g) whenever beta, gamma >= alpha.
    """
    alpha, beta, gamma, eta = map(Fraction, (alpha, beta, gamma, eta))
    for name, v in (("alpha", alpha), ("beta", beta), ("gamma", gamma)):
        if not (0 < v <= 1):
            raise InputError(f"{name} must lie in (0, 1], got {v}")
    if variant not in ("c3", "c4"):
        raise InputError(f"variant must be 'c3' or 'c4', got {variant!r}")
    if B.q != C.q:
        raise InputError(f"exponent mismatch: B has q={B.q}, C has q={C.q}")
    q = B.q
    nb, nc = len(B), len(C)
    if nb == 0 or nc == 0:
        raise InputError("condition check needs nonempty B and C")
    second = beta if variant == "c3" else alpha
    # |B|^gamma |C|^second >= 2^(q (eta + second * gamma))
    ok = _power_compare(
        [(nb, gamma), (nc, second)],
        [(2, q * (eta + second * gamma))],
    )
    import math

    margin = (
        gamma * math.log2(nb)
        + second * math.log2(nc)
        - float(second * gamma * q)
        - float(eta * q)
    )
    necessary = None
    if beta >= alpha and gamma >= alpha:
        necessary = _power_compare(
            [(nb, Fraction(1)), (nc, Fraction(1))],
            [(nb, alpha / beta), (nc, alpha / gamma)],
        )
    return PiCheck(ok=ok, margin_bits=margin, variant=variant, necessary_condition_ok=necessary)
