import sys

import mpmath
import pytest

from qtorus import invariant as inv
from qtorus.errors import PrecisionError
from qtorus.fibonacci import fibonacci
from qtorus.numerics import golden_ratio, make_context
from qtorus.oracle import J_from_power_sums, golden_threshold, j_eps
from qtorus.partitions import weighted_series_P, weighted_series_Q

mpmath.mp.dps = 40


@pytest.fixture(autouse=True)
def _mp_digits():
    # mpmath precision is process-global; pin it per test
    with mpmath.workdps(40):
        yield


PHI = (1 + mpmath.sqrt(5)) / 2


def mp(x):
    n, d = x.value.as_integer_ratio()
    return mpmath.mpf(int(n)) / int(d)


def mp_err(x):
    n, d = x.abs_error.as_integer_ratio()
    return mpmath.mpf(int(n)) / int(d)


def naive_offset_sums(M, threshold):
    """Plain truncation of U and of its odd-j2 part: every tuple whose own
    weight exceeds threshold / 10 (no majorants, so only a lower bound)."""
    sys.setrecursionlimit(10_000)
    w = [PHI**k for k in range(200)]
    tot = [mpmath.mpf(0), mpmath.mpf(0)]

    def rec(S, p, par):
        k = p + 2
        while True:
            s = S + w[k]
            t = s**-M
            if t * 10 < threshold and w[k] ** -M * 10 < threshold:
                return
            tot[par] += t
            rec(s, k, par)
            k += 1

    k = 2
    while w[k] ** -M > threshold * 1e-3:
        s = 1 + w[k]
        tot[k % 2] += s**-M
        rec(s, k, k % 2)
        k += 1
    return tot[0] + tot[1], tot[1]


@pytest.fixture(scope="module")
def naive():
    out = {}
    for M in (4, 6):
        U, U_odd = naive_offset_sums(M, mpmath.mpf("1e-15"))
        out[f"G{M}"] = (1 + U) / (PHI**M - 1)
        out[f"H{M}"] = U_odd
    return out


def test_closed_forms(ctx):
    assert abs(mp(inv._geometric(4, ctx)) - mpmath.mpf("0.1708203932")) < 1e-10
    assert abs(mp(inv._geometric(6, ctx)) - mpmath.mpf("0.0590170")) < 1e-7
    geo, two, h = inv.leading_terms(4, ctx)
    assert abs(mp(two) - 1 / ((PHI**4 - 1) * (PHI**2 + 1) ** 4)) < 1e-30
    assert abs(mp(h) - mpmath.mpf("1.3304e-3")) < 1e-7
    assert abs(mp(inv.leading_terms(6, ctx)[2]) - mpmath.mpf("4.85e-5")) < 1e-7
    assert abs(mp(inv.tail_C_tilde(6, ctx)) - mpmath.mpf("1.15e-5")) < 1e-7


@pytest.mark.parametrize("M", [4, 6, 8])
def test_tail_closed_forms_match_mpmath(ctx, M):
    a, b, c = PHI**M, PHI ** (2 * M), PHI ** (3 * M)
    C = 1 / (b * (a - 1) ** 2) + 1 / (a * (a - 1) ** 2 * (b - a - 1))
    D = 1 / (c * (b - 1)) + 1 / (a * (b - 1) * (b - a - 1))
    assert abs(mp(inv.tail_C_tilde(M, ctx)) / C - 1) < 1e-30
    assert abs(mp(inv.tail_D_tilde(M, ctx)) / D - 1) < 1e-30
    assert inv.tail_C_tilde(M, ctx).certainly_positive()


def test_D_tilde_decreasing(ctx):
    vals = [inv.tail_D_tilde(M, ctx) for M in (4, 6, 8, 10)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("name", ["G4", "G6", "H4", "H6"])
def test_components_against_naive_enumeration(ctx, naive, name):
    M = int(name[1])
    x = (inv.G if name[0] == "G" else inv.H)(M, 1e-20, ctx)
    assert float(x.abs_error) <= 1e-20
    # the naive sum omits only positive terms
    assert naive[name] <= mp(x) + mp_err(x)
    assert mp(x) - naive[name] < 1e-12


@pytest.mark.parametrize("M", [4, 6])
def test_tail_sandwiches(ctx, M):
    C = inv.tail_C_tilde(M, ctx)
    D = inv.tail_D_tilde(M, ctx)
    lo, hi = inv.G_tail(M, 1e-15, ctx).remainder_interval()
    assert 0 < lo and hi < C.lower()
    lo, hi = inv.H_tail(M, 1e-15, ctx).remainder_interval()
    assert 0 < lo and hi < D.lower()


def test_tail_total_matches_G(ctx):
    tb = inv.G_tail(4, 1e-15, ctx)
    G = inv.G(4, 1e-15, ctx)
    geo = inv._geometric(4, ctx)
    assert (tb.total + geo).contains(G)


@pytest.mark.parametrize("M", [4, 6])
def test_H_exceeds_two_part_truncation(ctx, M):
    phi = golden_ratio(ctx)
    partial = (1 + phi**3) ** -M + (1 + phi**5) ** -M
    assert inv.H(M, 1e-15, ctx).lower() > partial.upper()


@pytest.mark.parametrize("M", [4, 6])
def test_partition_route_cross_validation(M):
    ctx = make_context(128)
    G = inv.G(M, 1e-15, ctx)
    H = inv.H(M, 1e-15, ctx)
    Gp = weighted_series_P(M, 60, ctx)
    Hp = weighted_series_Q(M, 60, ctx)
    assert Gp.contains(G) and Hp.contains(H)
    assert float(Gp.abs_error) < 1e-6


def test_J_within_closed_form_bracket(ctx):
    J = inv.J_qt(1e-15, ctx)
    b = inv.theorem3_bounds(ctx)
    assert b.J_lo.upper() < J.lower() and J.upper() < b.J_hi.lower()
    assert b.interval_ok()


def test_leading_only_terms(ctx):
    J, parts = inv._J_with_parts(1e-15, ctx)
    b = inv.theorem3_bounds(ctx)
    base = {M: sum(inv.leading_terms(M, ctx)[1:], inv.leading_terms(M, ctx)[0]) for M in (4, 6)}
    # every omitted term is positive, so both bases fall short of G_M + H_M
    for M in (4, 6):
        assert base[M] < parts[f"G{M}"] + parts[f"H{M}"]
    lead = J_from_power_sums(base[6], base[4])
    # the cubed denominator shrinks faster: the truncated ratio lands above J,
    # still inside the closed-form bracket
    assert J < lead
    assert b.J_lo < lead < b.J_hi


def test_j_report(ctx):
    rep = inv.j_qt(1e-15, ctx)
    assert rep.within_interval
    assert float(rep.j_qt.abs_error) < 1e-8
    assert rep.theorem3_interval == (9150, 9840)
    assert rep.j_qt.contains(1728 / (1 - rep.J_qt))
    # certified value, confirmed by an independent assembly from the U sums
    assert abs(mp(rep.j_qt) - mpmath.mpf("9538.2496556147071229")) < 1e-10


def test_tol_below_precision_is_rejected():
    with pytest.raises(PrecisionError):
        inv.J_qt(1e-40, make_context(96))


def test_bad_M(ctx):
    with pytest.raises(ValueError):
        inv.G(5, 1e-10, ctx)
    with pytest.raises(ValueError):
        inv.H(2, 1e-10, ctx)


def test_precision_robustness(ctx, ctx512):
    a = inv.J_qt(1e-15, ctx)
    b = inv.J_qt(1e-15, ctx512)
    assert abs(mp(a) - mp(b)) <= mp_err(a)


# ---------------------------------------------------------------------------
# Fibonacci side


@pytest.fixture(scope="module")
def J_ref(ctx):
    return inv.J_qt(1e-14, ctx)


@pytest.mark.parametrize("m", [5, 8, 12])
def test_sandwich(ctx, J_ref, m):
    Jb = inv.J_Bm(m, 1e-12, ctx)
    C24 = inv.sandwich_constant(m, ctx) ** 24
    assert (J_ref / C24).upper() < Jb.lower()
    assert Jb.upper() < (J_ref * C24).lower()


def test_gap_shrinks(ctx, J_ref):
    gaps = [abs(mp(inv.J_Bm(m, 1e-12, ctx)) - mp(J_ref)) for m in (5, 6, 8, 12)]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))


@pytest.mark.parametrize("k", [4, 6])
def test_single_term_truncation_is_below(ctx, k):
    m = 7
    first = (mpmath.mpf(fibonacci(m)) / fibonacci(m + 1)) ** k
    assert first < mp(inv.fibonacci_side_sum(m, k, 1e-12, ctx))


def test_fibonacci_side_matches_brute_sum(ctx):
    # F_m^k sum n^-k over B_m(phi), scanned directly
    m = 6
    eps, ties = golden_threshold(m, ctx)
    rep = j_eps(golden_ratio(ctx), eps, 300_000, ctx, boundary=ties)
    s4 = sum(mpmath.mpf(fibonacci(m)) ** 4 / mpmath.mpf(n) ** 4 for n in rep.members)
    tail = mpmath.mpf(fibonacci(m)) ** 4 / (3 * mpmath.mpf(300_000) ** 3)
    got = mp(inv.fibonacci_side_sum(m, 4, 1e-14, ctx))
    assert s4 <= got + 1e-14 and got <= s4 + tail + 1e-14


@pytest.mark.slow
def test_brute_oracle_agrees_with_zeckendorf_side(ctx, J_ref):
    for m in range(5, 13):
        eps, ties = golden_threshold(m, ctx)
        rep = j_eps(golden_ratio(ctx), eps, 10**6, ctx, boundary=ties)
        Jb = inv.J_Bm(m, 1e-12, ctx)
        assert rep.J_eps.contains(Jb), m
        C24 = inv.sandwich_constant(m, ctx) ** 24
        assert (J_ref / C24).upper() < rep.J_eps.lower() and rep.J_eps.upper() < (J_ref * C24).lower()
