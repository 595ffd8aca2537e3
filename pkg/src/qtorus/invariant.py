"""The explicit formula for J^qt(phi) and j^qt(phi) with certified truncation.

Both weighted Rogers-Ramanujan sums reduce to sums over gap-2 offset tuples
J = (0, j2, ..., jk):

    sum_{I in N(1)} phi_I^-M = U / (phi^M - 1),   U = sum_J (1 + phi^j2 + ...)^-M,

because phi_I = phi^i1 * phi_J with J = I - i1.  H_M(phi) is the part of U
whose second index is odd.  U is summed by a depth-first walk that prunes a
branch once a geometric majorant of everything beneath it drops below a
threshold; the majorants of all pruned branches are added up and carried as
certified error.

Majorant: every gap-2 tuple X starting at 0 satisfies phi_X >= 1, and
T = sum_X phi_X^-M <= 1 / (1 - rho^2 / (1 - rho)) with rho = phi^-M.
Extensions of any node whose next part is >= q therefore weigh at most
R(q) = rho^q T / (1 - rho).
"""

from __future__ import annotations

import functools
import math
import sys
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr

from .errors import PrecisionError, ToleranceError
from .fibonacci import fibonacci
from .numerics import ApproxReal, NumericContext, phi_power
from .oracle import J_from_power_sums, j_from_J

__all__ = [
    "TailBound",
    "InvariantReport",
    "Theorem3Bounds",
    "THEOREM3_INTERVAL",
    "G",
    "H",
    "G_tail",
    "H_tail",
    "tail_C_tilde",
    "tail_D_tilde",
    "leading_terms",
    "J_qt",
    "j_qt",
    "J_Bm",
    "fibonacci_side_sum",
    "sandwich_constant",
    "theorem3_bounds",
]

THEOREM3_INTERVAL = (9150, 9840)
DEFAULT_TOL = 1e-20


def _check_M(M: int) -> None:
    if not isinstance(M, int) or M < 4 or M % 2:
        raise ValueError(f"M must be an even integer >= 4, got {M!r}")


def _check_tol(tol, ctx: NumericContext) -> mpfr:
    t = mpfr(tol)
    if not t > 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    if t < gmpy2.mul_2exp(mpfr(1), -(ctx.precision_bits - 32)):
        raise PrecisionError(
            f"tol={tol} is finer than {ctx.precision_bits}-bit arithmetic can certify; "
            "raise precision_bits"
        )
    return t


# ---------------------------------------------------------------------------
# depth-first walk over gap-2 tuples


class _Walker:
    """Sums (S + w[k1] + w[k2] + ...)^-M over gap-2 extensions of a node.

    Two majorants bound the extensions of a node with partial sum S whose
    next part is >= q: R[q], and (S + w[q])^-(M-2) * R2[q], where R2 is the
    same geometric bound for exponent 2 (the extension adds y >= w[q], so
    (S + y)^-M <= (S + w[q])^-(M-2) y^-2).  A branch is cut once the smaller
    of the two drops to delta; the cut mass is accumulated in ``cut``.

    Pruning decisions and the cut mass run in double precision on tables
    inflated by _FLOAT_SLACK, which swamps every float rounding involved;
    the sums themselves stay in MPFR.
    """

    def __init__(self, w, R, R2, M: int, delta):
        self.w = w
        self.wf = [float(x) for x in w]
        self.Rf = [float(x) * _FLOAT_SLACK for x in R]
        self.R2f = [float(x) * _FLOAT_SLACK for x in R2]
        self.M = M
        self.delta = float(delta)
        self.nodes = 0
        self.depth = 0
        self.cut = 0.0

    def walk(self, S, Sf: float, p: int, depth: int = 1):
        total = mpfr(0)
        w, wf, Rf, R2f, delta = self.w, self.wf, self.Rf, self.R2f, self.delta
        e = 2 - self.M
        mM = -self.M
        k = p + 2
        if depth + 1 > self.depth:
            self.depth = depth + 1
        while True:
            bound = Rf[k]
            alt = (Sf + wf[k]) ** e * R2f[k]
            if alt < bound:
                bound = alt
            if bound <= delta:
                self.cut += bound
                return total
            s = S + w[k]
            sf = Sf + wf[k]
            self.nodes += 1
            # a leaf's own walk would cut at once; settle it here
            j = k + 2
            leaf = Rf[j]
            alt = (sf + wf[j]) ** e * R2f[j]
            if alt < leaf:
                leaf = alt
            if leaf <= delta:
                self.cut += leaf
                total += s**mM
            else:
                total += s**mM + self.walk(s, sf, k, depth + 1)
            k += 1

    def branch(self, S, k: int):
        """The node S + w[k] together with all its extensions."""
        s = S + self.w[k]
        self.nodes += 1
        return s ** (-self.M) + self.walk(s, float(s), k)

    def rounding(self, total, ctx: NumericContext) -> mpfr:
        """Bound on the rounding error of a sum produced by this walker.

        Weights carry relative error <= 4u, each node sum adds ``depth``
        roundings, the power -M multiplies relative error by M, and the
        nested additions contribute at most ``nodes`` u.
        """
        with ctx.up():
            per_term = (self.M + 2) * (self.depth + 8)
            return 2 * abs(total) * ctx.unit * (per_term + self.nodes + 2)

    def certified_cut(self, extra, ctx: NumericContext) -> mpfr:
        """The accumulated cut mass plus ``extra``, inflated to cover the
        float summation (relative error <= nodes * 2^-53)."""
        with ctx.up():
            c = mpfr(self.cut) + extra
            return c * (1 + gmpy2.mul_2exp(mpfr(self.nodes + 2), -52))


# relative slack on the float majorant tables
_FLOAT_SLACK = 1 + 2.0**-30


def _majorant_table(M: int, inflation: ApproxReal, delta, ctx: NumericContext, length=None) -> list:
    """R[q] = inflation * rho^q * T / (1 - rho), rho = phi^-M, rounded up.

    Without ``length`` the table runs until an entry falls to delta, plus
    two spare slots so p + 2 never runs off the end.
    """
    rho = phi_power(-M, ctx)
    T = 1 / (1 - rho**2 / (1 - rho))
    head = (inflation * T / (1 - rho)).upper()
    r = rho.upper()
    out = []
    with ctx.up():
        cur = head
        while True:
            out.append(cur)
            if length is None:
                if cur <= delta and len(out) > 3:
                    break
            elif len(out) >= length:
                return out
            cur = cur * r
        out.extend([cur * r, cur * r * r])
    return out


def _tables(M: int, inflation_base: ApproxReal, delta, ctx: NumericContext):
    R = _majorant_table(M, inflation_base**M, delta, ctx)
    R2 = _majorant_table(2, inflation_base**2, delta, ctx, length=len(R))
    return R, R2


@dataclass(frozen=True)
class _Sums:
    value: mpfr
    pruned: mpfr
    rounding: mpfr

    def enclosure(self, ctx: NumericContext) -> ApproxReal:
        """Centre the one-sided pruned mass: true value in [value, value + pruned]."""
        if not ctx.tracked:
            return ApproxReal(self.value, mpfr(0), ctx)
        with ctx.gmp():
            half = self.pruned / 2
            v = self.value + half
        with ctx.up():
            e = half + self.rounding + abs(v) * ctx.unit
        return ApproxReal(v, e, ctx)


def _adaptive(run, tol, M: int):
    """Call run(delta) with shrinking delta until every sum it returns has
    pruned / 2 + rounding <= tol.

    The walk visits roughly delta^(-1/M) nodes and each ends in one cut of
    size about delta, so the pruned mass scales like delta^((M-1)/M); that
    exponent predicts the next delta, and two runs refine it.
    """
    tol = float(tol)
    delta = tol
    slope = (M - 1) / M
    prev = None
    for _ in range(16):
        if delta < 1e-250:
            break
        result = run(delta)
        pruned = max(float(s.pruned) for s in result)
        rnd = max(float(s.rounding) for s in result)
        if rnd > tol / 4:
            raise PrecisionError("rounding error exceeds the tolerance; raise precision_bits")
        if pruned / 2 + rnd <= tol:
            return result
        if prev is not None and prev[1] > pruned > 0:
            measured = math.log(prev[1] / pruned) / math.log(prev[0] / delta)
            slope = min(1.0, max(0.5, measured))
        prev = (delta, pruned)
        target = 1.6 * (tol - rnd)
        delta *= min(0.5, (target / pruned) ** (1 / slope))
    raise ToleranceError(f"could not reach tolerance {tol:g}")


def _deep_recursion(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        rec = sys.getrecursionlimit()
        try:
            sys.setrecursionlimit(max(rec, 10_000))
            return fn(*args, **kwargs)
        finally:
            sys.setrecursionlimit(rec)

    return wrapper


@functools.lru_cache(maxsize=64)
@_deep_recursion
def _offset_sums(M: int, tol, ctx: NumericContext) -> tuple[_Sums, _Sums]:
    """(U, U_odd): gap-2 tuples (0, j2, ...) of length >= 2, all / odd j2."""

    def run(delta):
        R, R2 = _tables(M, ctx.exact(1), delta, ctx)
        with ctx.gmp():
            w = [phi_power(k, ctx).value for k in range(len(R))]
            walker = _Walker(w, R, R2, M, delta)
            u_even = mpfr(0)
            u_odd = mpfr(0)
            one = mpfr(1)
            odd_walker = _Walker(w, R, R2, M, delta)
            k = 2
            while R[k] > delta:
                if k % 2:
                    u_odd += odd_walker.branch(one, k)
                else:
                    u_even += walker.branch(one, k)
                k += 1
            root_cut = R[k]
            u_all = u_even + u_odd
        odd_cut = odd_walker.certified_cut(root_cut, ctx)
        with ctx.up():
            all_cut = walker.certified_cut(0, ctx) + odd_cut
            rounding = walker.rounding(u_all, ctx) + odd_walker.rounding(u_all, ctx)
        return (
            _Sums(u_all, all_cut, rounding),
            _Sums(u_odd, odd_cut, odd_walker.rounding(u_odd, ctx)),
        )

    return _adaptive(run, tol, M)


def _geometric(M: int, ctx: NumericContext) -> ApproxReal:
    """sum_{i>=1} phi^-Mi = 1 / (phi^M - 1)."""
    return 1 / (phi_power(M, ctx) - 1)


def G(M: int, tol, ctx: NumericContext) -> ApproxReal:
    """G_M(phi) = sum_{i>=1} phi^-Mi + sum_{I in N(1)} phi_I^-M, error <= tol."""
    _check_M(M)
    t = _check_tol(tol, ctx)
    geo = _geometric(M, ctx)
    with ctx.down():
        scale = phi_power(M, ctx).lower() - 1
    U, _ = _offset_sums(M, float(t * scale), ctx)
    return (1 + U.enclosure(ctx)) * geo


def H(M: int, tol, ctx: NumericContext) -> ApproxReal:
    """H_M(phi) = sum over M(0) of (1 + phi^i2 + ...)^-M, error <= tol."""
    _check_M(M)
    t = _check_tol(tol, ctx)
    _, U_odd = _offset_sums(M, float(t), ctx)
    return U_odd.enclosure(ctx)


def tail_C_tilde(M: int, ctx: NumericContext) -> ApproxReal:
    """1/(phi^2M (phi^M-1)^2) + 1/(phi^M (phi^M-1)^2 (phi^2M - phi^M - 1))."""
    _check_M(M)
    pm = phi_power(M, ctx)
    p2m = phi_power(2 * M, ctx)
    return 1 / (p2m * (pm - 1) ** 2) + 1 / (pm * (pm - 1) ** 2 * (p2m - pm - 1))


def tail_D_tilde(M: int, ctx: NumericContext) -> ApproxReal:
    """1/(phi^3M (phi^2M-1)) + 1/(phi^M (phi^2M-1) (phi^2M - phi^M - 1))."""
    _check_M(M)
    pm = phi_power(M, ctx)
    p2m = phi_power(2 * M, ctx)
    p3m = phi_power(3 * M, ctx)
    return 1 / (p3m * (p2m - 1)) + 1 / (pm * (p2m - 1) * (p2m - pm - 1))


def leading_terms(M: int, ctx: NumericContext) -> tuple[ApproxReal, ApproxReal, ApproxReal]:
    """(1/(phi^M-1), 1/((phi^M-1)(phi^2+1)^M), (1+phi^3)^-M)."""
    geo = _geometric(M, ctx)
    two = geo / (phi_power(2, ctx) + 1) ** M
    h = (1 + phi_power(3, ctx)) ** (-M)
    return geo, two, h


@dataclass(frozen=True)
class TailBound:
    """A tuple sum split as leading_term + remainder, the remainder known up to
    its enumerated part plus a one-sided certified tail."""

    leading_term: ApproxReal
    enumerated_remainder: ApproxReal
    certified_tail: mpfr

    @property
    def total(self) -> ApproxReal:
        s = self.leading_term + self.enumerated_remainder
        with s.ctx.up():
            e = s.abs_error + self.certified_tail
        return ApproxReal(s.value, e, s.ctx)

    def remainder_interval(self) -> tuple[mpfr, mpfr]:
        r = self.enumerated_remainder
        with r.ctx.up():
            hi = r.upper() + self.certified_tail
        return r.lower(), hi


def G_tail(M: int, tol, ctx: NumericContext) -> TailBound:
    """sum_{I in N(1)} phi_I^-M = 1/((phi^M-1)(phi^2+1)^M) + C(M)."""
    _check_M(M)
    t = _check_tol(tol, ctx)
    geo, lead, _ = leading_terms(M, ctx)
    with ctx.down():
        scale = phi_power(M, ctx).lower() - 1
    U, _ = _offset_sums(M, float(t * scale), ctx)
    enumerated = ApproxReal(U.value, U.rounding, ctx) * geo
    with ctx.up():
        tail = U.pruned * geo.upper()
    return TailBound(lead, enumerated - lead, tail)


def H_tail(M: int, tol, ctx: NumericContext) -> TailBound:
    """sum_{I in M(0)} phi_I^-M = (1 + phi^3)^-M + D(M)."""
    _check_M(M)
    t = _check_tol(tol, ctx)
    _, _, lead = leading_terms(M, ctx)
    _, U_odd = _offset_sums(M, float(t), ctx)
    enumerated = ApproxReal(U_odd.value, U_odd.rounding, ctx)
    return TailBound(lead, enumerated - lead, U_odd.pruned)


@dataclass(frozen=True)
class InvariantReport:
    G4: ApproxReal
    G6: ApproxReal
    H4: ApproxReal
    H6: ApproxReal
    J_qt: ApproxReal
    j_qt: ApproxReal | None
    theorem3_interval: tuple[int, int] = THEOREM3_INTERVAL
    within_interval: bool = False
    notes: tuple[str, ...] = ()


def _components(tol4, tol6, ctx: NumericContext):
    """G4, G6, H4, H6 from one walk per M; G_M + H_M good to tol4 / tol6."""
    out = {}
    for M, tol in ((4, tol4), (6, tol6)):
        with ctx.down():
            scale = phi_power(M, ctx).lower() - 1
        # A_M = G_M + H_M has error <= dU (1/(phi^M-1) + 1)
        U, U_odd = _offset_sums(M, float(tol * scale / (1 + scale)), ctx)
        out[f"G{M}"] = (1 + U.enclosure(ctx)) * _geometric(M, ctx)
        out[f"H{M}"] = U_odd.enclosure(ctx)
    return out


def J_qt(tol, ctx: NumericContext) -> ApproxReal:
    """49 (G6 + H6)^2 / (40 (G4 + H4)^3) with abs_error <= tol."""
    J, _ = _J_with_parts(tol, ctx)
    return J


def _J_with_parts(tol, ctx: NumericContext):
    t = _check_tol(tol, ctx)
    # dJ <= J (3 dA4 / A4 + 2 dA6 / A6) with J < 0.825, A4 > 0.17, A6 > 0.059,
    # so dA4 <= tol/40 and dA6 <= tol/80 keep dJ below 0.72 tol
    parts = _components(t / 40, t / 80, ctx)
    J = J_from_power_sums(parts["G6"] + parts["H6"], parts["G4"] + parts["H4"])
    if ctx.tracked and J.abs_error > t:
        raise ToleranceError(f"J error {J.error_str()} exceeds tol={tol}")
    return J, parts


def j_qt(tol, ctx: NumericContext) -> InvariantReport:
    """j^qt(phi) = 1728 / (1 - J^qt(phi)); ``tol`` bounds the error of J.

    The division amplifies J's error by 1728 / (1 - J)^2, about 5.3e4.
    """
    J, parts = _J_with_parts(tol, ctx)
    gap = 1 - J
    if gap.contains(0) or abs(gap.value) < 10 * gap.abs_error:
        raise PrecisionError("1 - J is not separated from zero; raise precision or tighten tol")
    j, notes = j_from_J(J)
    lo, hi = THEOREM3_INTERVAL
    inside = j.lower() > lo and j.upper() < hi
    if not J.certainly_positive() or not (J.upper() < 1):
        notes.append("J outside (0, 1): sign of j flipped")
    return InvariantReport(
        parts["G4"], parts["G6"], parts["H4"], parts["H6"], J, j,
        THEOREM3_INTERVAL, inside, tuple(notes),
    )


# ---------------------------------------------------------------------------
# Fibonacci side: J over B_m(phi) in closed Zeckendorf form


def sandwich_constant(m: int, ctx: NumericContext) -> ApproxReal:
    """C_m = (1 + phi^-2m) / (1 - phi^-2m)."""
    x = phi_power(-2 * m, ctx)
    return (1 + x) / (1 - x)


@functools.lru_cache(maxsize=64)
@_deep_recursion
def _fib_side(m: int, k: int, tol, ctx: NumericContext) -> tuple[_Sums, _Sums]:
    """Sums of (F_m / F_I)^k over B_m(phi) split into
    (tuples with lead >= m + 1, tuples in M(m)).

    Parts are offsets o = i - m with weights F_{m+o} / F_m >= phi^o / C_m,
    so the phi-majorants inflated by powers of C_m bound every pruned branch.
    """
    C = sandwich_constant(m, ctx)
    Fm = fibonacci(m)

    def run(delta):
        R, R2 = _tables(k, C, delta, ctx)
        with ctx.gmp():
            den = mpfr(Fm)
            w = [mpfr(fibonacci(m + o)) / den for o in range(len(R))]
            # lead >= m + 1: offsets >= 1 from an empty prefix
            wa = _Walker(w, R, R2, k, delta)
            a = wa.walk(mpfr(0), 0.0, -1)
            # M(m): offset 0 then an odd offset >= 3
            wb = _Walker(w, R, R2, k, delta)
            b = mpfr(0)
            one = w[0]
            q = 3
            while min(R[q], R2[q]) > delta:
                b += wb.branch(one, q)
                q += 2
            b_cut = min(R[q], R2[q])
        return (
            _Sums(a, wa.certified_cut(0, ctx), wa.rounding(a, ctx)),
            _Sums(b, wb.certified_cut(b_cut, ctx), wb.rounding(b, ctx)),
        )

    return _adaptive(run, tol, k)


def fibonacci_side_sum(m: int, k: int, tol, ctx: NumericContext) -> ApproxReal:
    """F_m^k * sum_{n in B_m(phi)} n^-k, error <= tol."""
    if m < 3:
        raise ValueError(f"m must be >= 3, got {m}")
    t = _check_tol(tol, ctx)
    a, b = _fib_side(m, k, float(t / 2), ctx)
    return a.enclosure(ctx) + b.enclosure(ctx)


def J_Bm(m: int, tol, ctx: NumericContext) -> ApproxReal:
    """J over the whole of B_m(phi), summed over Zeckendorf forms; error <= tol."""
    t = _check_tol(tol, ctx)
    # F_m / F_{m+1} >= 0.6 puts s4 >= 0.129 and s6 >= 0.046; with J < 0.9
    # these shares keep dJ <= J (3 ds4 / s4 + 2 ds6 / s6) below 0.63 tol
    s6 = fibonacci_side_sum(m, 6, t / 128, ctx)
    s4 = fibonacci_side_sum(m, 4, t / 64, ctx)
    J = J_from_power_sums(s6, s4)
    if ctx.tracked and J.abs_error > t:
        raise ToleranceError(f"J_Bm error {J.error_str()} exceeds tol={tol}")
    return J


# ---------------------------------------------------------------------------
# closed-form bracket


@dataclass(frozen=True)
class Theorem3Bounds:
    J_lo: ApproxReal
    J_hi: ApproxReal
    j_lo: ApproxReal
    j_hi: ApproxReal

    def interval_ok(self) -> bool:
        lo, hi = THEOREM3_INTERVAL
        return self.j_lo.lower() > lo and self.j_hi.upper() < hi


def theorem3_bounds(ctx: NumericContext) -> Theorem3Bounds:
    """Closed-form brackets for J^qt(phi) and their images under 1728/(1-J).

    Upper: tail bounds C~(6) + D~(6) added to the numerator base.
    Lower: tail bounds C~(4) + D~(4) added to the denominator base.
    """
    base = {}
    for M in (4, 6):
        geo, two, h = leading_terms(M, ctx)
        base[M] = geo + two + h
    num_hi = base[6] + tail_C_tilde(6, ctx) + tail_D_tilde(6, ctx)
    den_hi = base[4] + tail_C_tilde(4, ctx) + tail_D_tilde(4, ctx)
    J_hi = J_from_power_sums(num_hi, base[4])
    J_lo = J_from_power_sums(base[6], den_hi)
    return Theorem3Bounds(J_lo, J_hi, 1728 / (1 - J_lo), 1728 / (1 - J_hi))
