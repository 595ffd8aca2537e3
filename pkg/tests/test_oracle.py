import warnings
from fractions import Fraction

import mpmath
import pytest

from qtorus.errors import EmptySetError, IndeterminateComparison, NearPoleWarning
from qtorus.fibonacci import fibonacci
from qtorus.numerics import golden_ratio
from qtorus.oracle import (
    J_from_power_sums,
    convergents,
    enumerate_B,
    golden_threshold,
    j_eps,
    j_from_J,
)


def exact_members(theta: Fraction, eps: Fraction, n_max):
    out = []
    for n in range(1, n_max + 1):
        x = n * theta
        if abs(x - round(x)) < eps:
            out.append(n)
    return out


@pytest.mark.parametrize("theta, eps", [(Fraction(3, 7), Fraction(1, 10)), (Fraction(1, 2), Fraction(1, 3))])
def test_rational_scan_matches_exact(ctx, theta, eps):
    assert list(enumerate_B(theta, eps, 500, ctx).members) == exact_members(theta, eps, 500)


def test_golden_scan_matches_mpmath(ctx):
    with mpmath.workdps(80):
        phi = (1 + mpmath.sqrt(5)) / 2
        eps_mp = phi**-6
        want = [n for n in range(1, 5001) if abs(n * phi - mpmath.nint(n * phi)) < eps_mp]
    eps, ties = golden_threshold(6, ctx)
    got = enumerate_B(golden_ratio(ctx), eps, 5000, ctx, boundary=ties).members
    assert list(got) == want


def test_tie_without_boundary_is_indeterminate(ctx):
    eps, ties = golden_threshold(6, ctx)
    assert ties == {fibonacci(6)}
    with pytest.raises(IndeterminateComparison):
        enumerate_B(golden_ratio(ctx), eps, 100, ctx)


def test_bad_arguments(ctx):
    with pytest.raises(ValueError):
        enumerate_B(Fraction(1, 3), -1, 10, ctx)
    with pytest.raises(ValueError):
        enumerate_B(Fraction(1, 3), Fraction(1, 10), 0, ctx)
    with pytest.raises(EmptySetError):
        j_eps(Fraction(1, 3), Fraction(1, 1000), 2, ctx)


def test_J_identities(ctx):
    j, notes = j_from_J(ctx.exact(0))
    assert j.contains(1728) and notes == []
    # sum over all n of n^-6, n^-4 gives exactly 1
    s6 = ctx.exact(Fraction(1, 945)) * mpmath_pi(ctx) ** 6
    s4 = ctx.exact(Fraction(1, 90)) * mpmath_pi(ctx) ** 4
    assert J_from_power_sums(s6, s4).contains(1)


def mpmath_pi(ctx):
    with mpmath.workdps(100):
        return ctx.exact(Fraction(str(mpmath.pi)))


def test_rational_theta_diverges(ctx):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rep = j_eps(Fraction(1, 2), Fraction(1, 10), 100_000, ctx)
    assert abs(float(rep.J_eps) - 1) < 1e-3
    assert rep.j_eps is None
    assert any(issubclass(w.category, NearPoleWarning) for w in caught)


def test_tail_is_folded_into_error(ctx):
    eps, ties = golden_threshold(5, ctx)
    with_tail = j_eps(golden_ratio(ctx), eps, 20_000, ctx, boundary=ties)
    bare = j_eps(golden_ratio(ctx), eps, 20_000, ctx, boundary=ties, include_tail=False)
    assert with_tail.J_eps.abs_error > 1e3 * bare.J_eps.abs_error
    longer = j_eps(golden_ratio(ctx), eps, 200_000, ctx, boundary=ties)
    assert with_tail.J_eps.contains(longer.J_eps)


def test_convergents_of_phi(ctx):
    cl = convergents(golden_ratio(ctx), 8, ctx)
    assert cl.partial_quotients == (1,) * 8
    assert cl.convergents == tuple((fibonacci(k + 2), fibonacci(k + 1)) for k in range(8))
    assert not cl.rational


def test_convergents_of_sqrt2_and_e(ctx):
    root2 = ctx.exact(2).sqrt()
    assert convergents(root2, 6, ctx).partial_quotients == (1, 2, 2, 2, 2, 2)
    with mpmath.workdps(100):
        e = ctx.exact(Fraction(str(mpmath.e)))
    assert convergents(e, 9, ctx).partial_quotients == (2, 1, 2, 1, 1, 4, 1, 1, 6)


def test_convergents_of_rational_stop(ctx):
    cl = convergents(Fraction(355, 113), 10, ctx)
    assert cl.rational
    assert cl.convergents[-1] == (355, 113)
    assert cl.partial_quotients == (3, 7, 16)


def test_convergent_quality(ctx):
    phi = golden_ratio(ctx)
    for p, q in convergents(phi, 20, ctx).convergents:
        assert float(abs(phi * q - p)) < 1 / q
