import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qtorus.fibonacci import FibCache, IndexTuple, binet, epsilon, fib_sum, fibonacci, zeckendorf
from qtorus.numerics import golden_ratio, phi_power

mpmath.mp.dps = 150


@pytest.fixture(autouse=True)
def _mp_digits():
    # mpmath precision is process-global; pin it per test
    with mpmath.workdps(150):
        yield


def test_small_values():
    assert [fibonacci(m) for m in range(1, 13)] == [1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144]
    with pytest.raises(ValueError):
        fibonacci(0)


def test_cache_grows_on_demand():
    c = FibCache(5)
    assert c[40] == 102334155
    assert list(c.values(6)) == [0, 1, 1, 2, 3, 5, 8]


@pytest.mark.parametrize("m", [1, 2, 10, 75, 200])
def test_binet_matches_integer(ctx, m):
    assert binet(m, ctx).contains(fibonacci(m))


def test_index_tuple_validation():
    IndexTuple((2, 4, 9))
    with pytest.raises(ValueError):
        IndexTuple((2, 3))
    with pytest.raises(ValueError):
        IndexTuple((1, 3))
    with pytest.raises(ValueError):
        IndexTuple(())
    assert IndexTuple((0, 3), floor=0).lead == 0
    assert str(IndexTuple((4, 6, 11))) == "(4, 6, 11)"


def test_zeckendorf_examples():
    assert zeckendorf(100).indices == (4, 6, 11)
    assert zeckendorf(1).indices == (2,)
    assert zeckendorf(26).indices == (5, 8)
    assert fib_sum(zeckendorf(100)) == 100
    with pytest.raises(ValueError):
        zeckendorf(0)


def test_fib_sum_rejects_index_one():
    with pytest.raises(ValueError):
        fib_sum(IndexTuple((1, 3), floor=1))


def test_zeckendorf_round_trip_to_a_million():
    for n in range(1, 10**6 + 1):
        z = zeckendorf(n)
        assert fib_sum(z) == n


def gap2_representation_counts(limit: int) -> np.ndarray:
    """Number of gap-2 index sets in {2, ..., K} whose Fibonacci sum is n, n <= limit.

    ways_k = ways_{k-1} + (ways_{k-2} shifted by F_k): either k is unused, or
    it is used and k - 1 is not.
    """
    K = 2
    while fibonacci(K + 1) <= limit:
        K += 1
    prev2 = np.zeros(limit + 1, dtype=np.int64)
    prev2[0] = 1
    prev1 = prev2.copy()  # index sets drawn from {2..1} = {}
    for k in range(2, K + 1):
        f = fibonacci(k)
        cur = prev1.copy()
        cur[f:] += prev2[: limit + 1 - f]
        prev2, prev1 = prev1, cur
    return prev1


def test_zeckendorf_uniqueness_to_a_million():
    counts = gap2_representation_counts(10**6)
    assert counts[0] == 1
    assert (counts[1:] == 1).all()


@given(st.integers(min_value=1, max_value=10**40))
def test_zeckendorf_property(n):
    z = zeckendorf(n)
    assert fib_sum(z) == n
    assert all(b - a >= 2 for a, b in zip(z, z[1:]))


def test_epsilon_identity_to_200(ctx):
    phi = mpmath.mpf(1 + mpmath.sqrt(5)) / 2
    for m in range(1, 201):
        e = epsilon(m, ctx)
        assert abs(e).contains(phi_power(-m, ctx))
        # sign alternates: F_m phi - F_{m+1} = (-1)^(m+1) phi^-m
        assert (e.value > 0) == (m % 2 == 1)
        v = mpmath.mpf(e.value.as_integer_ratio()[0]) / e.value.as_integer_ratio()[1]
        assert abs(abs(v) - phi ** (-m)) <= phi ** (-m) * mpmath.mpf(2) ** -200


def test_epsilon_direct_subtraction_loses_bits(ctx):
    # the naive subtraction at working precision cannot resolve phi^-200
    naive = golden_ratio(ctx) * fibonacci(200) - fibonacci(201)
    assert float(naive.abs_error) > float(phi_power(-200, ctx).value)
    assert float(epsilon(200, ctx).abs_error) < 1e-115
