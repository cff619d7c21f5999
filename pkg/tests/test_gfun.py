import math
import random
from fractions import Fraction

import pytest

from periodrel.gfun import (
    GaussManinCoefficients,
    GFunMatrix,
    check_period_equation,
    compute_radii,
    derive_G,
)
from periodrel.scalars import Place
from periodrel.series import TruncatedSeries

TS = TruncatedSeries


def hypergeometric_fixture(order: int) -> TS:
    """sum C(2n,n)^2 (X/16)^n, generated by its coefficient recurrence
    c_{n+1}/c_n = ((2n+1)/(2n+2))^2 rather than by binomials."""
    c = [Fraction(1)]
    for n in range(order):
        c.append(c[-1] * Fraction((2 * n + 1) ** 2, (2 * n + 2) ** 2))
    return TS.from_coeffs(c, order)


def test_hypergeometric_fixture_against_binomials():
    f = hypergeometric_fixture(30)
    for n in range(31):
        assert f.coeffs[n] == Fraction(math.comb(2 * n, n) ** 2, 16**n)


def constant_family(g, order, consts):
    """a[i][k][l] built from constant scalars consts[i][k][l]."""
    n = len(consts[0]) - 1
    series = tuple(
        tuple(
            tuple(TS.constant(Fraction(consts[i][k][l]), order) for l in range(g))
            for k in range(n + 1)
        )
        for i in range(g)
    )
    return GaussManinCoefficients(g, n, series)


def test_identity_family_returns_input():
    g, order = 2, 12
    rng = random.Random(0)
    grid = [
        [TS.from_coeffs([rng.randint(-4, 4) for _ in range(order + 1)], order) for _ in range(g)]
        for _ in range(g)
    ]
    f = GFunMatrix.from_series(g, grid)
    out = derive_G(f, GaussManinCoefficients.identity_family(g, order))
    for i in range(g):
        for j in range(g):
            assert out.entries[i][j] == f.entries[i][j]


def test_single_derivative_family():
    # g = 1, N = 1, a = (0, 1): derived series is the formal derivative
    order = 10
    f = GFunMatrix.from_series(1, [[TS.geometric(order)]])
    a = constant_family(1, order, [[[0], [1]]])
    out = derive_G(f, a)
    assert out.entries[0][0] == TS.geometric(order).derivative().truncate(order - 1)


def test_picard_fuchs_family_annihilates_hypergeometric():
    # the degree-2 coefficient family X(1-X) d^2 + (1-2X) d - 1/4 kills the
    # fixture; the oracle is the recurrence generator itself
    order = 32
    f = GFunMatrix.from_series(1, [[hypergeometric_fixture(order)]])
    a0 = TS.constant(Fraction(-1, 4), order)
    a1 = TS.from_coeffs([1, -2], order)
    a2 = TS.from_coeffs([0, 1, -1], order)
    fam = GaussManinCoefficients(1, 2, ((tuple([a0]), tuple([a1]), tuple([a2])),))
    out = derive_G(f, fam)
    assert out.entries[0][0].is_zero()
    assert out.order == order - 2 == 30


def test_derivative_matches_recurrence_oracle():
    # G = F' compared against coefficients (n+1) c_{n+1} produced straight
    # from the recurrence
    order = 31
    f = GFunMatrix.from_series(1, [[hypergeometric_fixture(order)]])
    fam = constant_family(1, order, [[[0], [1]]])
    out = derive_G(f, fam)
    c = [Fraction(1)]
    for n in range(order):
        c.append(c[-1] * Fraction((2 * n + 1) ** 2, (2 * n + 2) ** 2))
    for n in range(30):
        assert out.entries[0][0].coeffs[n] == (n + 1) * c[n + 1]


def test_derive_is_linear_in_f():
    g, order = 2, 10
    rng = random.Random(1)
    mk = lambda: GFunMatrix.from_series(
        g,
        [
            [TS.from_coeffs([Fraction(rng.randint(-3, 3)) for _ in range(order + 1)], order) for _ in range(g)]
            for _ in range(g)
        ],
    )
    f1, f2 = mk(), mk()
    consts = [[[rng.randint(-2, 2) for _ in range(g)] for _ in range(3)] for _ in range(g)]
    fam = constant_family(g, order, consts)
    lhs = derive_G(f1 + f2, fam)
    rhs = derive_G(f1, fam) + derive_G(f2, fam)
    for i in range(g):
        for j in range(g):
            assert lhs.entries[i][j] == rhs.entries[i][j]


def test_second_derivative_composes():
    order = 12
    f = GFunMatrix.from_series(1, [[hypergeometric_fixture(order)]])
    once = constant_family(1, order, [[[0], [1]]])
    twice = constant_family(1, order, [[[0], [0], [1]]])
    via_two_steps = derive_G(derive_G(f, once), once)
    direct = derive_G(f, twice)
    assert via_two_steps.entries[0][0] == direct.entries[0][0]


def test_insufficient_precision_rejected():
    f = GFunMatrix.from_series(1, [[TS.geometric(1)]])
    fam = constant_family(1, 1, [[[0], [0], [1]]])
    with pytest.raises(ValueError, match="insufficient precision"):
        derive_G(f, fam)


# ---------------------------------------------------------------------------
# radii


def test_radii_integer_coefficients_certified_one():
    g, order = 1, 8
    f = GFunMatrix.from_series(g, [[TS.geometric(order)]], integral=True)
    fam = GaussManinCoefficients.identity_family(g, order)
    radii = compute_radii(f, None, fam, [], [Place.finite(5)])
    r, cert = radii.lookup(Place.finite(5))
    assert r == 1.0 and cert


def test_radii_worked_small_and_large_excluded_values():
    g, order, p = 1, 8, 7
    f = GFunMatrix.from_series(g, [[TS.geometric(order)]])
    fam = GaussManinCoefficients.identity_family(g, order)
    # |1/p|_p = p > 1: the minimum stays at 1
    r1, _ = compute_radii(f, None, fam, [Fraction(1, p)], [Place.finite(p)]).lookup(Place.finite(p))
    assert r1 == 1.0
    # |p|_p = 1/p: the excluded value wins
    r2, _ = compute_radii(f, None, fam, [Fraction(p)], [Place.finite(p)]).lookup(Place.finite(p))
    assert r2 == pytest.approx(1.0 / p)


def test_radii_archimedean_heuristic_uncertified():
    g, order = 1, 12
    f = GFunMatrix.from_series(g, [[TS.geometric(order)]])
    # coefficient series 1/(1 - 2X): heuristic radius 1/2
    s = TS.from_coeffs([2**n for n in range(order + 1)], order)
    fam = GaussManinCoefficients(1, 0, (((s,),),))
    r, cert = compute_radii(f, None, fam, [], [Place.arch()]).lookup(Place.arch())
    assert r == pytest.approx(0.5)
    assert not cert


def test_radii_monotone_under_more_inputs():
    rng = random.Random(2)
    g, order = 1, 10
    f = GFunMatrix.from_series(g, [[TS.geometric(order)]])
    fam = GaussManinCoefficients.identity_family(g, order)
    places = [Place.finite(3), Place.arch()]
    for _ in range(20):
        excl = [Fraction(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(rng.randint(0, 3))]
        more = excl + [Fraction(rng.randint(1, 9), rng.randint(1, 9))]
        base = compute_radii(f, None, fam, excl, places)
        extended = compute_radii(f, None, fam, more, places)
        for v in places:
            assert extended.lookup(v)[0] <= base.lookup(v)[0]


# ---------------------------------------------------------------------------
# period-equation checks


def _constant_matrix_series(g, order, values):
    return GFunMatrix.from_series(
        g,
        [[TS.constant(Fraction(values[i][j]), order) for j in range(g)] for i in range(g)],
        integral=all(Fraction(values[i][j]).denominator == 1 for i in range(g) for j in range(g)),
    )


def test_check_constant_series_exact_match():
    g = 2
    vals = [[1, 2], [3, 4]]
    f = _constant_matrix_series(g, 6, vals)
    gmat = _constant_matrix_series(g, 6, [[0, 1], [1, 0]])
    ref_f = tuple(tuple(Fraction(x) for x in row) for row in vals)
    ref_g = tuple(tuple(Fraction(x) for x in row) for row in [[0, 1], [1, 0]])
    report = check_period_equation(f, gmat, ref_f, ref_g, Fraction(3), Place.finite(3))
    assert report.all_ok
    assert all(e.discrepancy == 0.0 for e in report.entries)


def test_check_truncation_self_consistency():
    # comparing a series against its own shorter evaluation stays within the
    # tail bound of the shorter truncation
    from periodrel.series import padic_partial_sum

    order_small, order_big = 6, 14
    f_small = GFunMatrix.from_series(1, [[TS.geometric(order_small)]], integral=True)
    g_small = GFunMatrix.from_series(1, [[TS.zero(order_small)]], integral=True)
    x = Fraction(3)
    ref = padic_partial_sum(TS.geometric(order_big), x)
    report = check_period_equation(
        f_small, g_small, ((ref,),), ((Fraction(0),),), x, Place.finite(3)
    )
    assert report.all_ok


def test_check_flags_corrupted_entry():
    order = 8
    f = GFunMatrix.from_series(1, [[TS.geometric(order)]], integral=True)
    gz = GFunMatrix.from_series(1, [[TS.zero(order)]], integral=True)
    from periodrel.series import padic_partial_sum

    x = Fraction(5)
    good = padic_partial_sum(TS.geometric(order), x)
    report = check_period_equation(f, gz, ((good + 1,),), ((Fraction(0),),), x, Place.finite(5))
    assert not report.all_ok
    bad = [e for e in report.entries if not e.ok]
    assert bad and bad[0].discrepancy > bad[0].tail_bound


def test_gfun_json_roundtrip():
    f = GFunMatrix.from_series(1, [[hypergeometric_fixture(6)]])
    assert GFunMatrix.from_json(f.to_json()).entries[0][0] == f.entries[0][0]
    fam = GaussManinCoefficients.identity_family(2, 6)
    rt = GaussManinCoefficients.from_json(fam.to_json())
    assert rt.g == 2 and rt.deriv_order == 0
