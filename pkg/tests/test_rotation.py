import cmath
import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from zetadyn import rotation as R
from zetadyn.errors import IntervalTooWide, ZeroUnavailable
from zetadyn.zeros import ZeroRecord

ROWS = {
    1: [88, 1, 5, 1, 1, 2, 2, 5, 2, 15],
    2: [132, 9, 14, 1, 1, 1, 2, 1, 52, 1],
    3: [157, 5, 1, 12, 3],
    4: [191, 5, 2, 15, 3],
    10: [312, 1, 2, 1, 48],
}


@pytest.mark.parametrize("gamma, theta, digits", [
    (14.1347, 0.0112552, 6), (21.022039638771555, 0.00756943, 6), (0.5, 0.25, 15)])
def test_gamma_to_theta_examples(gamma, theta, digits):
    r = R.gamma_to_theta(gamma)
    assert float(f"{r.theta:.{digits}g}") == pytest.approx(theta, rel=10 ** -digits)
    assert r.multiplier_residual < 1e-14


def test_theta_at_gamma_one_half():
    # arctan(1) / pi = 1/4; the multiplier is 1 - 1/(1/2 + i/2) = i
    r = R.gamma_to_theta(0.5)
    assert r.theta == pytest.approx(0.25, abs=1e-16)
    assert abs(1 - 1 / complex(0.5, 0.5) - 1j) < 1e-15


def test_multiplier_is_on_unit_circle():
    for g in (14.134725, 100.0, 977.3):
        r = R.gamma_to_theta(g)
        lam = 1 - 1 / complex(0.5, g)
        assert abs(cmath.exp(2j * math.pi * r.theta) - lam) < 1e-13


def test_inverse_consistency_and_monotonicity(first_zeros):
    thetas = []
    for rec in first_zeros:
        r = R.gamma_to_theta(rec.gamma)
        back = R.theta_to_gamma(r.theta)
        assert abs(back - rec.gamma) <= 10 ** (-14 + 2) * rec.gamma
        thetas.append(r.theta)
    assert all(b < a for a, b in zip(thetas, thetas[1:]))
    with mpmath.workdps(50):
        r = R.gamma_to_theta(mpmath.mpf("14.134725141734693790457251983562470270784"), 40)
        back = R.theta_to_gamma(r.theta)
        assert abs(back / mpmath.mpf("14.134725141734693790457251983562470270784") - 1) < 1e-38


def test_gamma_must_be_positive():
    with pytest.raises(ValueError):
        R.gamma_to_theta(0)


def test_cf_trivial_cases():
    cf = R.continued_fraction(0.5, 0.5)
    assert cf.quotients == (2,) and cf.certified_count == 1
    with mpmath.workdps(40):
        phi = (mpmath.sqrt(5) - 1) / 2
        eps = mpmath.mpf(10) ** -30
        cf = R.continued_fraction(phi - eps, phi + eps)
    assert cf.certified_count >= 60 // 2 and set(cf.certified) == {1}
    assert cf.format().startswith("[1,1,1")


def test_cf_interval_too_wide():
    with pytest.raises(IntervalTooWide):
        R.continued_fraction(0.3, 0.6)
    with pytest.raises(ValueError):
        R.continued_fraction(0, 0.1)


def test_cf_uncertified_tail_marked():
    x = Fraction(3, 20)
    cf = R.continued_fraction(x - Fraction(1, 10 ** 6), x + Fraction(1, 10 ** 6), max_terms=8)
    assert cf.quotients[:2] == (6, 1)
    assert cf.certified_count < len(cf.quotients)
    assert cf.format().endswith("?]")
    assert cf.bounded_type_summary()["max"] == max(cf.certified)


@settings(max_examples=200, deadline=None)
@given(st.fractions(min_value=Fraction(1, 10 ** 6), max_value=Fraction(999_999, 10 ** 6)))
def test_convergent_bound(x):
    cf = R.continued_fraction(x, max_terms=30)
    for p, q in R.convergents(cf.certified):
        # equality only at the last convergent, where x = p/q exactly
        assert abs(x - Fraction(p, q)) < Fraction(1, q * q) or x == Fraction(p, q)


def test_convergent_bound_float_interval():
    lo, hi = R.theta_interval(14.134725141734693, 14)
    cf = R.continued_fraction(lo, hi)
    for p, q in R.convergents(cf.certified):
        assert abs(lo - Fraction(p, q)) < Fraction(1, q * q)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 10])
def test_table_rows_prefixes(zeros30, n):
    row = R.rotation_row(n, 30, zeros30)
    want = ROWS[n]
    assert row.certified_count >= len(want)
    assert list(row.quotients[: len(want)]) == want


def test_table_row_100(zeros30):
    row = R.rotation_row(100, 30, zeros30)
    assert float(row.theta) == pytest.approx(0.00067289, rel=1e-5)
    assert row.certified_count >= 10


def test_certification_is_sound(zeros30):
    for n in (1, 2, 3, 4):
        hi = R.rotation_row(n, 30, zeros30)
        lo = R.rotation_row(n, 28, zeros30)
        assert lo.certified_count <= hi.certified_count
        assert lo.expansion.certified == hi.expansion.certified[: lo.certified_count]


def test_zero_unavailable():
    rec = ZeroRecord(1, 14.134725141734693, 14, 1e-15)
    with pytest.raises(ZeroUnavailable):
        R.rotation_row(1, 30, [rec])
    with pytest.raises(ZeroUnavailable):
        R.rotation_row(2, 10, [rec])


def test_cf_cap_is_not_termination():
    # both ends agree far beyond max_terms, so every emitted quotient is certified
    with mpmath.workdps(40):
        phi = (mpmath.sqrt(5) - 1) / 2
        eps = mpmath.mpf(10) ** -30
        cf = R.continued_fraction(phi - eps, phi + eps, max_terms=10)
    assert cf.quotients == (1,) * 10 and cf.certified_count == 10


def test_full_rows_at_70_digits(zeros30):
    cache = R.ensure_cached(list(zeros30), [1], 70)
    row = R.rotation_row(1, 70, cache)
    assert row.certified_count == 50
    assert row.quotients[-5:] == (8, 7, 34, 4, 1)
