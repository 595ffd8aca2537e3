"""Zeckendorf characterisation of B_m(phi) = {n : ||n phi|| < phi^-m}, and the
index families N(m), M(m) of gap-2 tuples."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator

from .fibonacci import IndexTuple, zeckendorf

__all__ = [
    "Case",
    "MembershipVerdict",
    "classify",
    "enumerate_N",
    "enumerate_M",
    "gap_tuples",
]


class Case(enum.Enum):
    SINGLETON_OR_CASE_I = "singleton_or_case_I"
    CASE_II = "case_II"
    EXCLUDED_SMALL_LEAD = "excluded_small_lead"
    EXCLUDED_EVEN_GAP = "excluded_even_gap"
    EXCLUDED_EQUAL_BOUNDARY = "excluded_equal_boundary"


_INCLUDED = {Case.SINGLETON_OR_CASE_I, Case.CASE_II}


@dataclass(frozen=True)
class MembershipVerdict:
    n: int
    m: int
    in_B: bool
    case: Case
    zeckendorf: IndexTuple

    def __post_init__(self):
        if self.in_B != (self.case in _INCLUDED):
            raise ValueError("in_B disagrees with case")


def classify(n: int, m: int) -> MembershipVerdict:
    """Decide whether ||n phi|| < phi^-m from the Zeckendorf form of n.

    Members are exactly the n whose leading index exceeds m, plus those
    with leading index m whose second index sits an odd distance above m.
    A lone F_m lies exactly on the boundary and is excluded.
    """
    if m < 3:
        raise ValueError(f"m must be >= 3, got {m}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    z = zeckendorf(n)
    lead = z.lead
    if lead >= m + 1:
        case = Case.SINGLETON_OR_CASE_I
    elif lead < m:
        case = Case.EXCLUDED_SMALL_LEAD
    elif len(z) == 1:
        case = Case.EXCLUDED_EQUAL_BOUNDARY
    elif (z[1] - m) % 2:
        case = Case.CASE_II
    else:
        case = Case.EXCLUDED_EVEN_GAP
    return MembershipVerdict(n, m, case in _INCLUDED, case, z)


def gap_tuples(lo: int, hi: int) -> Iterator[tuple[int, ...]]:
    """All non-empty gap-2 tuples with parts in [lo, hi], depth first."""

    def walk(prefix, nxt):
        for k in range(nxt, hi + 1):
            t = prefix + (k,)
            yield t
            yield from walk(t, k + 2)

    yield from walk((), lo)


def enumerate_N(m: int, max_part: int) -> list[IndexTuple]:
    """N(m) truncated at ``max_part``: gap-2 tuples of length >= 2, all parts >= m.

    Ordered by length, then lexicographically.
    """
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    out = [IndexTuple(t, m) for t in gap_tuples(m, max_part) if len(t) >= 2]
    out.sort(key=IndexTuple.sort_key)
    return out


def enumerate_M(m: int, max_part: int) -> list[IndexTuple]:
    """Members of N(m) with first part exactly m and second part m + odd."""
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    out = []
    for k in range(m + 3, max_part + 1, 2):
        out.append(IndexTuple((m, k), m))
        for rest in gap_tuples(k + 2, max_part):
            out.append(IndexTuple((m, k) + rest, m))
    out.sort(key=IndexTuple.sort_key)
    return out
