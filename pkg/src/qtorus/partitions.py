"""Rogers-Ramanujan partitions and their golden-ratio weighted sums.

P(n) holds the partitions of n into distinct parts differing by at least 2;
Q(n) keeps those whose smallest part is odd and at least 3.  Summing the
weights (phi^i1 + ... + phi^ik)^-M over every P(n) reproduces G_M(phi); the
weights (1 + phi^i1 + ...)^-M over every Q(n) reproduce H_M(phi).
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass

from .fibonacci import IndexTuple
from .numerics import ApproxReal, NumericContext, golden_ratio, phi_power

__all__ = [
    "Family",
    "PartitionSet",
    "SeriesCoefficients",
    "partitions_P",
    "partitions_Q",
    "rr_series_coeffs",
    "weighted_sum_P",
    "weighted_sum_Q",
    "weighted_series_P",
    "weighted_series_Q",
    "min_largest_part",
]


class Family(enum.Enum):
    P = "P"
    Q = "Q"


@dataclass(frozen=True)
class PartitionSet:
    n: int
    family: Family
    members: tuple[IndexTuple, ...]

    def __post_init__(self):
        for part in self.members:
            if sum(part) != self.n:
                raise ValueError(f"{part} does not sum to {self.n}")
            if self.family is Family.Q and (part.lead < 3 or part.lead % 2 == 0):
                raise ValueError(f"{part} is not a Q-partition")

    @property
    def count(self) -> int:
        return len(self.members)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


@dataclass(frozen=True)
class SeriesCoefficients:
    coeffs: tuple[int, ...]

    def __getitem__(self, n: int) -> int:
        return self.coeffs[n]

    def __len__(self):
        return len(self.coeffs)


@functools.lru_cache(maxsize=None)
def _gap_partitions(n: int, lo: int) -> tuple[tuple[int, ...], ...]:
    """Partitions of n into gap-2 parts, each part >= lo."""
    out = []
    if n >= lo:
        out.append((n,))
    a = lo
    while 2 * a + 2 <= n:
        for rest in _gap_partitions(n - a, a + 2):
            out.append((a,) + rest)
        a += 1
    return tuple(out)


def partitions_P(n: int) -> PartitionSet:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    parts = sorted(_gap_partitions(n, 1), key=lambda t: (len(t), t))
    return PartitionSet(n, Family.P, tuple(IndexTuple(t, 1) for t in parts))


def partitions_Q(n: int) -> PartitionSet:
    p = partitions_P(n)
    keep = tuple(I for I in p if I.lead >= 3 and I.lead % 2 == 1)
    return PartitionSet(n, Family.Q, keep)


def rr_series_coeffs(N: int) -> SeriesCoefficients:
    """Coefficients through x^N of sum_k x^(k^2) / ((1-x)(1-x^2)...(1-x^k)).

    Pure integer arithmetic; dividing by (1 - x^j) is a running sum with
    stride j.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    total = [0] * (N + 1)
    k = 0
    while k * k <= N:
        term = [0] * (N + 1)
        term[k * k] = 1
        for j in range(1, k + 1):
            for d in range(j, N + 1):
                term[d] += term[d - j]
        for d in range(N + 1):
            total[d] += term[d]
        k += 1
    return SeriesCoefficients(tuple(total))


def _weight(part: IndexTuple, M: int, ctx: NumericContext, offset: int) -> ApproxReal:
    s = ctx.exact(offset)
    for i in part:
        s = s + phi_power(i, ctx)
    return s ** (-M)


def _check_M(M: int) -> None:
    if M < 2 or M % 2:
        raise ValueError(f"M must be a positive even integer, got {M}")


def weighted_sum_P(n: int, M: int, ctx: NumericContext) -> ApproxReal:
    """Sum over I in P(n) of (phi^i1 + ... + phi^ik)^-M."""
    _check_M(M)
    total = ctx.exact(0)
    for part in partitions_P(n):
        total = total + _weight(part, M, ctx, 0)
    return total


def weighted_sum_Q(n: int, M: int, ctx: NumericContext) -> ApproxReal:
    """Sum over I in Q(n) of (1 + phi^i1 + ... + phi^ik)^-M."""
    _check_M(M)
    total = ctx.exact(0)
    for part in partitions_Q(n):
        total = total + _weight(part, M, ctx, 1)
    return total


def _max_gap_sum(top: int) -> int:
    """Largest sum of a gap-2 partition with every part <= top."""
    return sum(range(top, 0, -2))


def min_largest_part(n: int) -> int:
    """Smallest possible largest part among partitions of n in P(n)."""
    top = 1
    while _max_gap_sum(top) < n:
        top += 1
    return top


def _tail_bound(n_cut: int, M: int, ctx: NumericContext) -> ApproxReal:
    """Bound the weights of every gap-2 partition of an integer > n_cut.

    Such a partition has largest part L >= min_largest_part(n_cut + 1).  The
    gap-2 tuples with largest part L number F_L <= phi^(L-1), and each weighs
    at most phi^(-M L), so the tail is at most
    sum_{L >= L0} phi^(L - 1 - M L) = phi^(-1) r^L0 / (1 - r), r = phi^(1-M).
    """
    phi = golden_ratio(ctx)
    L0 = min_largest_part(n_cut + 1)
    r = phi ** (1 - M)
    bound = (r**L0 / (phi * (1 - r))).upper()
    # one-sided [0, bound] written as a centred enclosure
    half = ctx.exact(bound) / 2
    return ApproxReal(half.value, half.upper(), ctx)


def weighted_series_P(M: int, n_cut: int, ctx: NumericContext) -> ApproxReal:
    """G_M(phi) by summing weighted_sum_P over n <= n_cut.

    The omitted partitions have one-sided mass in [0, tail]; the returned
    enclosure covers that whole range.
    """
    total = ctx.exact(0)
    for n in range(1, n_cut + 1):
        total = total + weighted_sum_P(n, M, ctx)
    return total + _tail_bound(n_cut, M, ctx)


def weighted_series_Q(M: int, n_cut: int, ctx: NumericContext) -> ApproxReal:
    """H_M(phi) by summing weighted_sum_Q over n <= n_cut, tail folded in as above."""
    total = ctx.exact(0)
    for n in range(1, n_cut + 1):
        total = total + weighted_sum_Q(n, M, ctx)
    return total + _tail_bound(n_cut, M, ctx)
