from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from mockgw import qseries as qs
from mockgw.qseries import QSeries, TruncationError


def test_construction_drops_zeros_and_terms_past_cutoff():
    s = QSeries([(0, 1), (F(1, 2), 0), (3, 5)], cutoff=2)
    assert list(s.terms()) == [(0, 1)]
    assert s.cutoff == 2


def test_duplicate_exponent_rejected():
    with pytest.raises(ValueError):
        QSeries([(1, 1), (1, 2)], 5)


def test_floats_rejected():
    with pytest.raises(TypeError):
        QSeries([(0.5, 1)], 5)


def test_coefficient_beyond_cutoff_raises():
    s = QSeries([(0, 1)], 3)
    assert s.coefficient(F(5, 2)) == 0
    with pytest.raises(TruncationError, match="beyond truncation"):
        s.coefficient(3)


def test_mixed_fractional_exponents():
    a = qs.monomial(F(1, 24), 1, 10)
    b = qs.monomial(F(-1, 8), 2, 10)
    c = a * b
    assert list(c.terms()) == [(F(-1, 12), 2)]
    # cutoff limited by the other factor's valuation
    assert c.cutoff == 10 + F(-1, 8)


def test_geometric_inverse():
    one_minus_q = QSeries([(0, 1), (1, -1)], 20)
    inv = qs.inv(one_minus_q)
    assert inv.cutoff == 20
    assert list(inv.terms()) == [(n, 1) for n in range(20)]


def test_inverse_with_fractional_valuation():
    a = QSeries([(F(1, 3), 2), (F(4, 3), 1)], 10)
    b = qs.inv(a)
    assert b.valuation() == F(-1, 3)
    prod = a * b
    assert prod.agrees_with(qs.one(prod.cutoff))


def test_zero_not_invertible():
    with pytest.raises(ZeroDivisionError):
        qs.inv(QSeries([], 5))


def test_pow_negative_and_zero():
    a = QSeries([(0, 1), (1, 1)], 8)
    assert (a ** 0) == qs.one(8)
    assert (a ** -2) * (a ** 2) == qs.one(8)


def test_zero_series_product_cutoff():
    z = QSeries([], 4)
    a = QSeries([(F(1, 2), 1)], 10)
    p = z * a
    assert p.is_zero()
    # zero is only known below 4, so the product is known below 4 + 1/2
    assert p.cutoff == F(9, 2)


def test_shift_scale_truncate():
    a = QSeries([(0, 1), (1, 2)], 3)
    assert a.shift(F(1, 2)).exponents == (F(1, 2), F(3, 2))
    assert a.scale(3).coefficients == (3, 6)
    assert a.truncate(1).exponents == (0,)
    with pytest.raises(TruncationError):
        a.truncate(4)


def test_json_round_trip_is_exact():
    a = QSeries([(F(-1, 8), F(7, 3)), (F(23, 24), -5)], F(79, 8))
    text = qs.to_json(a)
    assert qs.from_json(text) == a
    assert '"79"' in text


# -- property-based ring axioms --------------------------------------------

fracs = st.fractions(min_value=-5, max_value=5, max_denominator=6)
exps = st.integers(0, 24).map(lambda n: F(n, 4))


@st.composite
def series(draw):
    cutoff = F(draw(st.integers(4, 12)))
    terms = draw(st.dictionaries(exps, fracs, max_size=6))
    return QSeries(terms.items(), cutoff)


@settings(max_examples=60, deadline=None)
@given(series(), series(), series())
def test_ring_axioms(a, b, c):
    assert (a + b).agrees_with(b + a)
    assert (a * b).agrees_with(b * a)
    assert ((a + b) + c).agrees_with(a + (b + c))
    assert ((a * b) * c).agrees_with(a * (b * c))
    assert (a * (b + c)).agrees_with(a * b + a * c)


@settings(max_examples=60, deadline=None)
@given(series())
def test_inverse_property(a):
    if a.is_zero():
        return
    b = qs.inv(a)
    assert (a * b).agrees_with(qs.one((a * b).cutoff))


@settings(max_examples=40, deadline=None)
@given(series())
def test_json_round_trip_property(a):
    assert qs.from_json(qs.to_json(a)) == a
