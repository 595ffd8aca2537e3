"""Exact Fibonacci numbers, Binet's formula, approximation errors and Zeckendorf forms."""

from __future__ import annotations

import bisect
import math
import threading
from dataclasses import dataclass
from typing import Iterator, Sequence

from .numerics import ApproxReal, NumericContext, golden_ratio, sqrt5

__all__ = [
    "IndexTuple",
    "FibCache",
    "fibonacci",
    "binet",
    "epsilon",
    "zeckendorf",
    "fib_sum",
]


@dataclass(frozen=True)
class IndexTuple:
    """Strictly increasing integers with consecutive gaps of at least 2.

    ``floor`` is the smallest admissible index: 2 for Zeckendorf forms, m for
    members of N(m), 0 for M(0), 1 for Rogers-Ramanujan partitions.
    """

    indices: tuple[int, ...]
    floor: int = 2

    def __post_init__(self):
        idx = tuple(self.indices)
        object.__setattr__(self, "indices", idx)
        if not idx:
            raise ValueError("an IndexTuple needs at least one index")
        if idx[0] < self.floor:
            raise ValueError(f"index {idx[0]} is below the floor {self.floor}")
        for a, b in zip(idx, idx[1:]):
            if b < a + 2:
                raise ValueError(f"indices {a}, {b} violate the gap-2 condition")

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def __getitem__(self, i):
        return self.indices[i]

    @property
    def lead(self) -> int:
        return self.indices[0]

    def sort_key(self) -> tuple:
        return (len(self.indices), self.indices)

    def __str__(self):
        return "(" + ", ".join(map(str, self.indices)) + ")"


class FibCache:
    """Append-only table F_0 = 0, F_1 = 1, F_2 = 1, ... of exact integers.

    Reads never block; growth is serialised by a lock.
    """

    def __init__(self, size: int = 300):
        self._table = [0, 1]
        self._lock = threading.Lock()
        self.ensure(size)

    def ensure(self, m: int) -> None:
        if m < len(self._table):
            return
        with self._lock:
            t = self._table
            while len(t) <= m:
                t.append(t[-1] + t[-2])

    def __getitem__(self, m: int) -> int:
        if m >= len(self._table):
            self.ensure(m)
        return self._table[m]

    def values(self, upto: int) -> Sequence[int]:
        self.ensure(upto)
        return self._table[: upto + 1]


_FIB = FibCache()


def fibonacci(m: int) -> int:
    """F_m with F_1 = F_2 = 1."""
    if m < 1:
        raise ValueError(f"fibonacci index must be >= 1, got {m}")
    return _FIB[m]


def binet(m: int, ctx: NumericContext) -> ApproxReal:
    if m < 1:
        raise ValueError(f"index must be >= 1, got {m}")
    phi = golden_ratio(ctx)
    sign = -1 if m % 2 else 1
    return (phi**m - sign * phi ** (-m)) / sqrt5(ctx)


def epsilon(m: int, ctx: NumericContext) -> ApproxReal:
    """F_m * phi - F_{m+1}, evaluated directly.

    F_m ~ phi^m amplifies the error of phi by phi^m while the result is
    phi^-m, so keeping full relative precision takes 2 m log2(phi) extra
    bits; the result is then rounded back into ``ctx``.
    """
    if m < 1:
        raise ValueError(f"index must be >= 1, got {m}")
    guard = 2 * math.ceil(m * math.log2((1 + math.sqrt(5)) / 2)) + 16
    wide = ctx.with_precision(ctx.precision_bits + guard)
    phi = golden_ratio(wide)
    return (phi * fibonacci(m) - fibonacci(m + 1)).round_to(ctx)


def _fib_prefix(n: int) -> list[int]:
    """F_0..F_k with F_k > n."""
    k = 2
    while _FIB[k] <= n:
        k += 8
    return list(_FIB.values(k))


def zeckendorf(n: int) -> IndexTuple:
    """Greedy Zeckendorf decomposition with indices >= 2."""
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    table = _fib_prefix(n)
    parts = []
    hi = len(table)
    while n:
        i = bisect.bisect_right(table, n, 2, hi) - 1
        parts.append(i)
        n -= table[i]
        hi = i - 1
    parts.reverse()
    return IndexTuple(tuple(parts), 2)


def fib_sum(index_tuple) -> int:
    if not isinstance(index_tuple, IndexTuple):
        index_tuple = IndexTuple(tuple(index_tuple), 2)
    if index_tuple.lead < 2:
        raise ValueError("Fibonacci sums take indices >= 2")
    return sum(_FIB[i] for i in index_tuple)
