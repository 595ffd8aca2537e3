"""Brute-force ground truth for B_eps(theta) = {n >= 1 : ||n theta|| < eps}.

The scan runs on fixed-point integers: theta and eps are rounded to W-bit
fixed point once, and each comparison carries an explicit integer error
margin.  Comparisons the margin cannot decide raise IndeterminateComparison,
except at indices declared to sit exactly on the boundary (for theta = phi
and eps = phi^-m that is n = F_m alone).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import gmpy2
from gmpy2 import mpfr

from .errors import EmptySetError, IndeterminateComparison, NearPoleWarning, PrecisionError
from .fibonacci import fibonacci
from .numerics import ApproxReal, NumericContext, golden_ratio

__all__ = [
    "BSetReport",
    "ConvergentList",
    "enumerate_B",
    "golden_threshold",
    "j_eps",
    "j_from_J",
    "J_from_power_sums",
    "convergents",
]

_GUARD_BITS = 16


@dataclass(frozen=True)
class BSetReport:
    theta: ApproxReal
    epsilon: ApproxReal
    n_max: int
    members: tuple[int, ...]
    J_eps: ApproxReal | None = None
    j_eps: ApproxReal | None = None
    truncation_note: str = ""
    warnings: tuple[str, ...] = field(default=())

    @property
    def count(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class ConvergentList:
    partial_quotients: tuple[int, ...]
    convergents: tuple[tuple[int, int], ...]
    rational: bool = False


def _fixed(x: ApproxReal, bits: int) -> tuple[int, int]:
    """Fixed-point image X of x with |x * 2^bits - X| <= err (both ints)."""
    num, den = x.value.as_integer_ratio()
    X = (num << bits) // den if bits >= 0 else num // (den << -bits)
    with x.ctx.up():
        e = gmpy2.mul_2exp(x.abs_error, bits)
    return X, int(gmpy2.ceil(e)) + 1


def golden_threshold(m: int, ctx: NumericContext) -> tuple[ApproxReal, frozenset[int]]:
    """eps = phi^-m together with the set of n lying exactly on ||n phi|| = eps.

    n phi - k = +-phi^-m = +-(F_m phi - F_{m+1}) forces n = F_m because phi
    is irrational, so F_m is the only exact tie.
    """
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    return golden_ratio(ctx) ** (-m), frozenset({fibonacci(m)})


def enumerate_B(
    theta,
    epsilon,
    n_max: int,
    ctx: NumericContext,
    *,
    boundary: Iterable[int] = (),
) -> BSetReport:
    """All 1 <= n <= n_max with ||n theta|| < epsilon (strict).

    ``boundary`` lists n known to satisfy ||n theta|| == epsilon exactly;
    they are excluded rather than reported as undecidable.
    """
    theta = ctx.exact(theta)
    eps = ctx.exact(epsilon)
    if not eps.lower() > 0:
        raise ValueError(f"epsilon must be > 0, got {eps}")
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    ties = frozenset(boundary)

    W = ctx.precision_bits + _GUARD_BITS
    one = 1 << W
    half = one >> 1
    T, t_err = _fixed(theta, W)
    E, e_err = _fixed(eps, W)
    T %= one

    members = []
    r = 0
    margin = 0
    for n in range(1, n_max + 1):
        r += T
        if r >= one:
            r -= one
        margin += t_err
        d = r if r <= half else one - r
        if d + margin < E - e_err:
            members.append(n)
        elif d - margin >= E + e_err:
            continue
        elif n in ties:
            continue
        else:
            raise IndeterminateComparison(
                f"||{n} theta|| vs epsilon undecided at {ctx.precision_bits} bits; raise the precision"
            )
    return BSetReport(theta, eps, n_max, tuple(members))


def _power_sum(members, k: int, n_max: int, ctx: NumericContext, tail: bool) -> ApproxReal:
    """sum n^-k over members, fixed point, plus the bound on n > n_max if ``tail``."""
    W = ctx.precision_bits + _GUARD_BITS
    one = 1 << W
    acc = 0
    for n in members:
        acc += one // n**k
    with ctx.gmp():
        v = gmpy2.mul_2exp(mpfr(acc), -W)
    with ctx.up():
        e = gmpy2.mul_2exp(mpfr(len(members) + 1), -W) + abs(v) * ctx.unit
        if tail:
            # sum_{n > N} n^-k <= integral_N^inf x^-k dx
            e += 1 / (mpfr(k - 1) * mpfr(n_max) ** (k - 1))
    if not ctx.tracked:
        e = mpfr(0)
    return ApproxReal(v, e, ctx)


def J_from_power_sums(s6: ApproxReal, s4: ApproxReal) -> ApproxReal:
    """49 s6^2 / (40 s4^3)."""
    return 49 * s6**2 / (40 * s4**3)


def j_from_J(J: ApproxReal) -> tuple[ApproxReal | None, list[str]]:
    """1728 / (1 - J), or None when 1 - J cannot be separated from zero."""
    gap = 1 - J
    notes = []
    if gap.contains(0):
        notes.append("1 - J encloses zero: j is unbounded at this accuracy")
        warnings.warn(notes[-1], NearPoleWarning, stacklevel=3)
        return None, notes
    if abs(gap.value) < 10 * gap.abs_error:
        notes.append("1 - J is within 10 error radii of zero: digits of j are unreliable")
        warnings.warn(notes[-1], NearPoleWarning, stacklevel=3)
    return 1728 / gap, notes


def j_eps(
    theta,
    epsilon,
    n_max: int,
    ctx: NumericContext,
    *,
    boundary: Iterable[int] = (),
    include_tail: bool = True,
) -> BSetReport:
    """J_eps and j_eps = 1728 / (1 - J_eps) over B_eps(theta) truncated at n_max.

    With ``include_tail`` the power sums' errors absorb the bound
    sum_{n > n_max} n^-k, so the enclosures cover the untruncated set.
    """
    rep = enumerate_B(theta, epsilon, n_max, ctx, boundary=boundary)
    if not rep.members:
        raise EmptySetError(f"B_eps has no members up to n_max={n_max}")
    s6 = _power_sum(rep.members, 6, n_max, ctx, include_tail)
    s4 = _power_sum(rep.members, 4, n_max, ctx, include_tail)
    J = J_from_power_sums(s6, s4)
    j, notes = j_from_J(J)
    if include_tail:
        note = f"members scanned up to n_max={n_max}; tail sum_(n>n_max) n^-k folded into the error"
    else:
        note = f"members scanned up to n_max={n_max}; values describe the truncated set only"
    return BSetReport(
        rep.theta, rep.epsilon, n_max, rep.members, J, j, note, tuple(notes)
    )


def _fraction(x) -> Fraction:
    n, d = x.as_integer_ratio()
    return Fraction(int(n), int(d))


def convergents(theta, count: int, ctx: NumericContext, *, max_quotient: int | None = None) -> ConvergentList:
    """Continued-fraction partial quotients and convergents p_k/q_k, k = 0, 1, ...

    The expansion is run on an exact rational enclosure [lo, hi] of theta.
    It stops early and sets ``rational`` when theta lies within its error of
    an exact convergent or a partial quotient exceeds ``max_quotient``.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    theta = ctx.exact(theta)
    if max_quotient is None:
        max_quotient = 1 << (ctx.precision_bits // 4)
    lo, hi, mid = (_fraction(x) for x in (theta.lower(), theta.upper(), theta.value))

    quotients: list[int] = []
    pairs: list[tuple[int, int]] = []
    # p_{-2}, p_{-1} = 0, 1 and q_{-2}, q_{-1} = 1, 0
    p_prev, p = 0, 1
    q_prev, q = 1, 0
    rational = False
    for _ in range(count):
        a = math.floor(mid)
        if math.floor(lo) != math.floor(hi):
            near = round(mid)
            if lo <= near <= hi:
                a = near
                rational = True
            else:
                raise PrecisionError("partial quotient undecided; raise the precision")
        if a > max_quotient and quotients:
            rational = True
            break
        quotients.append(a)
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        pairs.append((p, q))
        if rational or lo == hi == a:
            rational = True
            break
        lo, hi, mid = lo - a, hi - a, mid - a
        if lo <= 0 <= hi:
            rational = True
            break
        lo, hi, mid = 1 / hi, 1 / lo, 1 / mid
    return ConvergentList(tuple(quotients), tuple(pairs), rational)
