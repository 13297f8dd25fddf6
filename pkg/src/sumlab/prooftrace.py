"""Executable scale-selection arguments, producing verifiable window certificates.

Each trace decomposes a branching function, scans left-to-right for the
smallest window index satisfying the variant's defining inequality in exact
log2 arithmetic, and measures the regularity of the renormalized pieces.
The existential "there exists j" of the arguments becomes a deterministic
scan; a failed scan raises with a diagnosis of which input hypothesis is
violated, since the arguments guarantee success when the hypotheses hold.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .branching import (
    BranchingFunction,
    SlopeDecomposition,
    branching_function,
    decompose_min_length,
    frostman_certificate,
)
from .errors import HypothesisError, InputError
from .exact import ExactPos
from .extraction import UniformStructure, is_uniform
from .gridset import GridSet, make_grid_set
from .regularity import frostman_constant, katz_tao_constant
from .sumproduct import check_condition_pi


@dataclass(frozen=True)
class UpperHalfReduction:
    """Scale Delta = 2^-delta_exp whose upper half carries most of C near 0."""

    delta_exp: int
    window: GridSet
    ball_count: int

    def to_json(self) -> dict:
        return {
            "delta_exp": self.delta_exp,
            "window": self.window.to_dict(),
            "ball_count": self.ball_count,
        }


def reduce_c_to_upper_half(C: GridSet, eta: Fraction) -> UpperHalfReduction:
    """Smallest k with |C ∩ (2^-k-1, 2^-k]| >= (1 - 2^-eta/2) |C ∩ [0, 2^-k]|.

    Mirrors the rescaling step that reduces to C ⊂ [1/2, 1]; the scan stops
    at Delta < delta^(1 - eta/2), below which the count bound forces a
    violated cardinality hypothesis.
    """
    eta = Fraction(eta)
    if not (0 < eta <= 1):
        raise InputError(f"eta must lie in (0, 1], got {eta}")
    if len(C) == 0:
        raise InputError("reduction needs a nonempty set")
    q = C.q
    p, u = eta.numerator, eta.denominator
    # scan k while 2^-k >= delta^(1 - eta/2):  2uk <= q(2u - p)
    k_max = (q * (2 * u - p)) // (2 * u)
    idx = C.indices
    from bisect import bisect_right

    for k in range(k_max + 1):
        top = 1 << (q - k)
        total = bisect_right(idx, top)
        inner = bisect_right(idx, top >> 1)
        win = total - inner
        # (b): win >= (1 - 2^-eta/2) total  <=>  (total - win)^2u * 2^p <= total^2u
        if (total - win) ** (2 * u) * (1 << p) <= total ** (2 * u):
            # (a) must follow when |C| >= delta^-eta
            if len(C) ** u >= 1 << (q * p):
                if total ** (2 * u) * (1 << (k * p)) < len(C) ** (2 * u):
                    raise HypothesisError(
                        f"internal: mass bound (a) failed at k={k} despite |C| >= delta^-eta"
                    )
            window = make_grid_set(q, [i for i in idx if (top >> 1) < i <= top], span=C.span)
            return UpperHalfReduction(delta_exp=k, window=window, ball_count=total)
    raise HypothesisError(
        f"no admissible scale above delta^(1 - eta/2): |C| = {len(C)} is too small "
        f"for eta = {eta} at q = {q}"
    )


@dataclass(frozen=True)
class WindowCertificate:
    """A verified scale window with the exponents witnessing the pigeonhole step."""

    variant: str
    T: int
    j: int
    a_lo: int               # window is [a_lo, a_hi] in chain nodes
    a_hi: int
    delta_lo_exp: int       # Delta_j = 2^-delta_lo_exp (coarse end)
    delta_hi_exp: int       # Delta_j+1 = 2^-delta_hi_exp (fine end)
    alpha_prime: Fraction | None
    beta_prime: Fraction
    gamma_prime: Fraction
    redefined_tail: bool
    decomposition: SlopeDecomposition
    checks: tuple[tuple[str, bool], ...]
    measured: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "variant": self.variant,
            "T": self.T,
            "j": self.j,
            "window_nodes": [self.a_lo, self.a_hi],
            "delta_exps": [self.delta_lo_exp, self.delta_hi_exp],
            "alpha_prime": str(self.alpha_prime) if self.alpha_prime is not None else None,
            "beta_prime": str(self.beta_prime),
            "gamma_prime": str(self.gamma_prime),
            "redefined_tail": self.redefined_tail,
            "decomposition": self.decomposition.to_json(),
            "checks": [[name, ok] for name, ok in self.checks],
            "measured": {
                k: (v.to_json() if isinstance(v, ExactPos) else v) for k, v in self.measured.items()
            },
        }


def _uniform_or_die(P: GridSet, T: int, name: str) -> tuple[UniformStructure, BranchingFunction]:
    res = is_uniform(P, T)
    if not isinstance(res, UniformStructure):
        raise HypothesisError(f"{name} is not {{2^-jT}}-uniform: {res.reason}")
    return res, branching_function(res)


def _window_log2(f: BranchingFunction, u: int, v: int) -> int:
    """Integer log2 of the branching between chain nodes u < v."""
    w = (f(v) - f(u)) * f.T
    if w.denominator != 1:
        raise AssertionError("uniform branching produced a non-integer log")
    return w.numerator


def scale_window_abc(
    A: GridSet,
    B: GridSet,
    C: GridSet,
    T: int,
    alpha: Fraction,
    beta: Fraction,
    gamma: Fraction,
    eta: Fraction,
    decomposition_eps: Fraction | None = None,
) -> WindowCertificate:
    """Window of B's branching with beta_j+1 >= eta beating A's branching.

    Scans for the smallest j with
    (Delta_j+1/Delta_j)^(-beta_j+1 - gamma) >= (Delta_j+1/Delta_j)^-eta * |A|_window;
    when A's window branching already exceeds (Delta_j/Delta_j+1)^alpha the
    fine scale is redefined to delta and the inequality re-verified there.
    """
    alpha, beta, gamma, eta = map(Fraction, (alpha, beta, gamma, eta))
    if A.q != B.q or A.q != C.q:
        raise InputError("A, B, C must share the grid exponent")
    _, fA = _uniform_or_die(A, T, "A")
    _, fB = _uniform_or_die(B, T, "B")
    eps_used = Fraction(decomposition_eps) if decomposition_eps is not None else eta
    dec = decompose_min_length(fB, eps_used)
    m = fB.m

    found = None
    for j in range(dec.n):
        a_lo, a_hi = dec.breakpoints[j], dec.breakpoints[j + 1]
        slope = dec.slopes[j]
        if slope < eta:
            continue
        L = a_hi - a_lo
        wA = _window_log2(fA, a_lo, a_hi)
        if T * L * (slope + gamma) >= T * L * eta + wA:
            found = (j, a_lo, a_hi, slope)
            break
    if found is None:
        kt_a = katz_tao_constant(A, alpha)
        b_large = len(B) ** eta.denominator >= 1 << (B.q * (beta * eta.denominator).numerator) \
            if (beta * eta.denominator).denominator == 1 else None
        raise HypothesisError(
            "pigeonhole failed: no window of B satisfies the display; "
            f"measured katz_tao_constant(A, {alpha}) = {float(kt_a):.3g}, "
            f"|B| = {len(B)} vs delta^-beta = 2^{float(beta) * B.q:.3g}"
            + ("" if b_large is None else f" (|B| >= delta^-beta: {b_large})")
        )

    j, a_lo, a_hi, slope = found
    redefined = False
    wA = _window_log2(fA, a_lo, a_hi)
    if Fraction(wA) >= T * (a_hi - a_lo) * alpha:
        a_hi = m
        redefined = True
        L = a_hi - a_lo
        wA = _window_log2(fA, a_lo, a_hi)
        if not (T * L * (slope + gamma) >= T * L * eta + wA):
            raise HypothesisError(
                "tail redefinition failed the display inequality; "
                f"A violates its Katz-Tao ({alpha}) hypothesis "
                f"(measured constant {float(katz_tao_constant(A, alpha)):.3g})"
            )

    L = a_hi - a_lo
    alpha_prime = Fraction(_window_log2(fA, a_lo, a_hi), T * L)
    b_cert = frostman_certificate(B, T, a_lo, a_hi, slope)
    checks = (
        ("beta_window >= eta", slope >= eta),
        ("form4", True),
        ("alpha_prime <= alpha", alpha_prime <= alpha),
    )
    measured = {
        "B_window_frostman": b_cert,
        "C_frostman_gamma": frostman_constant(C, gamma),
        "A_katz_tao_alpha": katz_tao_constant(A, alpha),
    }
    return WindowCertificate(
        variant="abc",
        T=T,
        j=j,
        a_lo=a_lo,
        a_hi=a_hi,
        delta_lo_exp=a_lo * T,
        delta_hi_exp=a_hi * T,
        alpha_prime=alpha_prime,
        beta_prime=slope,
        gamma_prime=gamma,
        redefined_tail=redefined,
        decomposition=dec,
        checks=checks,
        measured=measured,
    )


def _scale_window_c3c4(
    A: GridSet,
    B: GridSet,
    C: GridSet,
    T: int,
    alpha: Fraction,
    beta: Fraction | None,
    gamma: Fraction,
    eta: Fraction,
    variant: str,
    decomposition_eps: Fraction | None,
    frostman_threshold: Fraction,
) -> WindowCertificate:
    alpha, gamma, eta = map(Fraction, (alpha, gamma, eta))
    if A.q != B.q or A.q != C.q:
        raise InputError("A, B, C must share the grid exponent")
    if gamma < alpha:
        raise InputError(f"the {variant} argument needs gamma >= alpha, got {gamma} < {alpha}")
    if variant == "c3":
        beta = Fraction(beta)
        if beta < alpha:
            raise InputError(f"the c3 argument needs beta >= alpha, got {beta} < {alpha}")

    pi = check_condition_pi(B, C, alpha, beta if variant == "c3" else alpha, gamma, eta, variant)
    if not pi.ok:
        raise HypothesisError(
            f"condition (Pi) fails for {variant}: margin {pi.margin_bits:.3g} bits"
        )

    _, fA = _uniform_or_die(A, T, "A")
    _, fB = _uniform_or_die(B, T, "B")
    _, fC = _uniform_or_die(C, T, "C")
    if variant == "c4":
        fr = frostman_constant(C, eta)
        if fr > frostman_threshold:
            raise HypothesisError(
                f"C is not Frostman (delta, {eta}): measured constant "
                f"{float(fr):.3g} exceeds threshold {frostman_threshold}"
            )

    eps_used = Fraction(decomposition_eps) if decomposition_eps is not None else eta / 2
    dec = decompose_min_length(fC, eps_used)
    m = fC.m
    exponent_b = alpha / beta if variant == "c3" else Fraction(1)

    if variant == "c4" and dec.slopes[0] < eta / 2:
        raise HypothesisError(
            f"gamma_1 = {dec.slopes[0]} < eta/2 = {eta / 2}; "
            "C's Frostman (delta, eta) hypothesis fails at the first window"
        )

    found = None
    for j in range(dec.n):
        a_lo, a_hi = dec.breakpoints[j], dec.breakpoints[j + 1]
        g_slope = dec.slopes[j]
        if g_slope < eta / 2:
            continue
        L = a_hi - a_lo
        wB = _window_log2(fB, m - a_hi, m - a_lo)
        lhs = exponent_b * wB + T * L * (alpha / gamma) * g_slope
        rhs = T * L * alpha * (1 + eta / (2 * gamma))
        if lhs >= rhs:
            found = (j, a_lo, a_hi, g_slope)
            break
    if found is None:
        raise HypothesisError(
            "pigeonhole failed despite condition (Pi) holding "
            f"(margin {pi.margin_bits:.3g} bits): either a hypothesis is violated "
            f"(measured katz_tao_constant(C, {gamma}) = "
            f"{float(katz_tao_constant(C, gamma)):.3g}) or this is a bug"
        )

    j, a_lo, a_hi, g_slope = found
    L = a_hi - a_lo
    wB = _window_log2(fB, m - a_hi, m - a_lo)
    beta_prime = Fraction(wB, T * L)
    gamma_prime = g_slope
    beta_floor = (beta if variant == "c3" else alpha) * eta / 2
    combined = beta_prime + gamma_prime >= alpha + alpha * eta / 2
    if g_slope > gamma:
        raise HypothesisError(
            f"window slope {g_slope} exceeds gamma = {gamma}; "
            "C violates its Katz-Tao hypothesis"
        )
    if beta_prime < beta_floor:
        raise HypothesisError(
            f"beta' = {beta_prime} below its floor {beta_floor}; "
            "B's branching contradicts the display inequality"
        )
    if not combined:
        raise HypothesisError(
            f"combined bound beta' + gamma' >= alpha(1 + eta/2) fails: "
            f"{beta_prime} + {gamma_prime} < {alpha + alpha * eta / 2}"
        )

    c_cert = frostman_certificate(C, T, a_lo, a_hi, gamma_prime)
    wA = _window_log2(fA, a_lo, a_hi)
    alpha_prime = Fraction(wA, T * L)
    checks = (
        ("condition_pi", True),
        ("gamma_window >= eta/2", True),
        ("form5" if variant == "c3" else "form5a", True),
        ("beta_prime >= floor", True),
        ("combined >= alpha(1 + eta/2)", True),
    )
    measured = {
        "C_window_frostman": c_cert,
        "A_katz_tao_alpha": katz_tao_constant(A, alpha),
        "C_katz_tao_gamma": katz_tao_constant(C, gamma),
        "pi_margin_bits": pi.margin_bits,
    }
    return WindowCertificate(
        variant=variant,
        T=T,
        j=j,
        a_lo=a_lo,
        a_hi=a_hi,
        delta_lo_exp=a_lo * T,
        delta_hi_exp=a_hi * T,
        alpha_prime=alpha_prime,
        beta_prime=beta_prime,
        gamma_prime=gamma_prime,
        redefined_tail=False,
        decomposition=dec,
        checks=checks,
        measured=measured,
    )


def scale_window_c3(
    A: GridSet,
    B: GridSet,
    C: GridSet,
    T: int,
    alpha: Fraction,
    beta: Fraction,
    gamma: Fraction,
    eta: Fraction,
    decomposition_eps: Fraction | None = None,
) -> WindowCertificate:
    """Window of C's branching satisfying the first theorem's display inequality."""
    return _scale_window_c3c4(
        A, B, C, T, alpha, beta, gamma, eta, "c3", decomposition_eps, Fraction(16)
    )


def scale_window_c4(
    A: GridSet,
    B: GridSet,
    C: GridSet,
    T: int,
    alpha: Fraction,
    gamma: Fraction,
    eta: Fraction,
    decomposition_eps: Fraction | None = None,
    frostman_threshold: Fraction = Fraction(16),
) -> WindowCertificate:
    """As c3 but B enters with exponent 1 and C must be Frostman (delta, eta)."""
    return _scale_window_c3c4(
        A, B, C, T, alpha, None, gamma, eta, "c4", decomposition_eps, frostman_threshold
    )


def reverify_certificate(
    cert: WindowCertificate,
    A: GridSet,
    B: GridSet,
    C: GridSet,
    alpha: Fraction,
    beta: Fraction | None,
    gamma: Fraction,
    eta: Fraction,
) -> list[tuple[str, bool]]:
    """Recompute every certificate inequality from raw covering numbers.

    Uses only direct cell counting on the input sets (no branching functions,
    no trust in the scanner's bookkeeping); returns (name, ok) pairs.
    """
    from .gridset import covering_number

    alpha, gamma, eta = map(Fraction, (alpha, gamma, eta))
    T, a_lo, a_hi = cert.T, cert.a_lo, cert.a_hi
    L = a_hi - a_lo
    m = A.q // T
    results: list[tuple[str, bool]] = []

    def log2_exact(n: int) -> int | None:
        return n.bit_length() - 1 if n > 0 and n & (n - 1) == 0 else None

    def window_log(P: GridSet, lo_node: int, hi_node: int) -> int | None:
        c_fine = covering_number(P, hi_node * T)
        c_coarse = covering_number(P, lo_node * T)
        if c_coarse == 0 or c_fine % c_coarse:
            return None
        return log2_exact(c_fine // c_coarse)

    def support_slope(P: GridSet, lo_node: int, hi_node: int) -> Fraction | None:
        base = covering_number(P, lo_node * T)
        best = None
        for x in range(lo_node + 1, hi_node + 1):
            cov = covering_number(P, x * T)
            if cov % base:
                return None
            w = log2_exact(cov // base)
            if w is None:
                return None
            cand = Fraction(w, T * (x - lo_node))
            if best is None or cand < best:
                best = cand
        return best

    results.append(("window ordered", 0 <= a_lo < a_hi <= m))

    if cert.variant == "abc":
        wA = window_log(A, a_lo, a_hi)
        results.append(("A window branching is a power of 2", wA is not None))
        sB = support_slope(B, a_lo, a_hi)
        results.append(("beta' is B's support slope over the window",
                        sB is not None and sB >= cert.beta_prime))
        results.append(("beta' >= eta", cert.beta_prime >= eta))
        if wA is not None:
            form4 = T * L * (cert.beta_prime + gamma) >= T * L * eta + wA
            results.append(("form4", form4))
            results.append(("alpha' matches A's window",
                            cert.alpha_prime == Fraction(wA, T * L)))
        return results

    # c3 / c4: the decomposition ran on C, B enters through the flipped window
    sC = support_slope(C, a_lo, a_hi)
    results.append(("gamma' is C's support slope over the window",
                    sC is not None and sC >= cert.gamma_prime))
    results.append(("gamma' >= eta/2", cert.gamma_prime >= eta / 2))
    wB = window_log(B, m - a_hi, m - a_lo)
    results.append(("B window branching is a power of 2", wB is not None))
    if wB is not None:
        results.append(("beta' matches B's window", cert.beta_prime == Fraction(wB, T * L)))
        exponent_b = alpha / beta if cert.variant == "c3" else Fraction(1)
        lhs = exponent_b * wB + T * L * (alpha / gamma) * cert.gamma_prime
        rhs = T * L * alpha * (1 + eta / (2 * gamma))
        results.append(("form5" if cert.variant == "c3" else "form5a", lhs >= rhs))
    floor = (beta if cert.variant == "c3" else alpha) * eta / 2
    results.append(("beta' >= floor", cert.beta_prime >= floor))
    results.append(
        ("beta' + gamma' >= alpha(1 + eta/2)",
         cert.beta_prime + cert.gamma_prime >= alpha + alpha * eta / 2)
    )
    pi = check_condition_pi(B, C, alpha, beta if cert.variant == "c3" else alpha,
                            gamma, eta, cert.variant)
    results.append(("condition_pi", pi.ok))
    return results
