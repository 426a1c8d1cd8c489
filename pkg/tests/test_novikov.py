from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from eqcartan.novikov import (
    CoefficientError,
    InversionError,
    NovikovElem,
    ScalarSetup,
    USeries,
    dq,
    format_novikov,
    format_useries,
    invert_truncated,
    parse_novikov,
    parse_useries,
    useries_du,
    useries_invert_unit,
)

SETUP_Q = ScalarSetup.make(1, "Q")
SETUP_HALF = ScalarSetup.make(Fraction(1, 2), "Q")
SETUP_F5 = ScalarSetup.make(1, "F5")
SETUP_Z6 = ScalarSetup.make(1, "Z/6")


def elem(setup, pairs):
    return NovikovElem.build(setup, pairs)


coeffs = st.fractions(max_denominator=20).filter(lambda f: f != 0)
exponents = st.integers(min_value=-6, max_value=6)


@st.composite
def novikov_elems(draw, setup=SETUP_Q):
    n = draw(st.integers(min_value=0, max_value=4))
    pairs = {}
    for _ in range(n):
        pairs[draw(exponents)] = draw(coeffs)
    return elem(setup, list(pairs.items()))


# -- ring axioms and arithmetic ------------------------------------------------


def test_monomial_product():
    a = SETUP_Q.monomial(2, 3)
    b = SETUP_Q.monomial(Fraction(1, 2), -1)
    assert format_novikov(a * b) == "q^2"


def test_addition_collects_exponents():
    a = elem(SETUP_Q, [(0, 1), (2, 3)])
    b = elem(SETUP_Q, [(2, -3), (1, 5)])
    assert sorted((a + b).terms) == [(0, 1), (1, 5)]


@given(novikov_elems(), novikov_elems(), novikov_elems())
@settings(max_examples=60, deadline=None)
def test_mul_distributes(a, b, c):
    assert a * (b + c) == a * b + a * c


@given(novikov_elems(), novikov_elems())
@settings(max_examples=60, deadline=None)
def test_mul_commutes(a, b):
    assert a * b == b * a


@given(novikov_elems(), novikov_elems())
@settings(max_examples=60, deadline=None)
def test_dq_is_a_derivation(a, b):
    assert dq(a * b) == dq(a) * b + a * dq(b)


def test_dq_monomial():
    x = SETUP_HALF.monomial(4, Fraction(3, 2))
    assert list(dq(x).terms) == [(SETUP_HALF.lattice.index_of(Fraction(1, 2)),
                            Fraction(6))]


def test_dq_fractional_exponent_needs_rational_coefficients():
    setup = ScalarSetup.make(Fraction(1, 2), "Z")
    x = setup.monomial(1, Fraction(1, 2))
    with pytest.raises(CoefficientError):
        dq(x)


def test_valuation_and_leading():
    a = elem(SETUP_Q, [(3, 7), (-2, 1)])
    assert a.valuation() == Fraction(-2)
    assert a.leading() == (SETUP_Q.lattice.index_of(-2), 1)


# -- truncation metadata -------------------------------------------------------


def test_truncation_drops_high_terms_and_records_bound():
    a = elem(SETUP_Q, [(0, 1), (5, 2)]).truncate(3)
    assert a.trunc == 3
    assert list(a.terms) == [(0, 1)]


def test_truncation_propagates_through_sum():
    a = elem(SETUP_Q, [(0, 1)]).truncate(3)
    b = elem(SETUP_Q, [(1, 1)])
    assert (a + b).trunc == 3


def test_truncation_tightens_under_product():
    # (1 + O(q^3)) * q^2 is only known to O(q^5)
    a = elem(SETUP_Q, [(0, 1)]).truncate(3)
    b = SETUP_Q.monomial(1, 2)
    assert (a * b).trunc == 5


# -- inversion -----------------------------------------------------------------


def test_invert_matches_geometric_series():
    a = elem(SETUP_Q, [(0, 1), (1, -1)])  # 1 - q
    inv = invert_truncated(a, 6)
    expected = elem(SETUP_Q, [(k, 1) for k in range(6)]).truncate(6)
    assert sorted(inv.terms) == sorted(expected.terms)
    prod = a * inv
    assert list(prod.terms) == [(0, 1)]
    assert prod.trunc == 6


@given(novikov_elems())
@settings(max_examples=40, deadline=None)
def test_invert_is_an_inverse_to_budget(tail):
    # units of the form 1 + (higher order): multiply back and compare with 1
    shift = 1 - min([i for i, _ in tail.terms], default=0)
    a = SETUP_Q.one() + tail * SETUP_Q.monomial(1, shift)
    inv = invert_truncated(a, 5)
    prod = a * inv
    assert [(i, c) for i, c in prod.terms if i < 5] == [(0, 1)]


def test_invert_zero_fails():
    with pytest.raises(InversionError):
        invert_truncated(SETUP_Q.zero(), 4)


def test_invert_nonunit_coefficient_over_z():
    setup = ScalarSetup.make(1, "Z")
    with pytest.raises((InversionError, CoefficientError)):
        invert_truncated(setup.monomial(2, 0), 4)


# -- coefficient rings ---------------------------------------------------------


def test_f5_arithmetic_wraps():
    a = SETUP_F5.monomial(3, 0)
    b = SETUP_F5.monomial(4, 0)
    assert not (a * b + SETUP_F5.monomial(3, 0)).has_terms()  # 12+3 = 0 mod 5


def test_z6_zero_divisors_cancel():
    a = SETUP_Z6.monomial(2, 1)
    b = SETUP_Z6.monomial(3, 1)
    assert not (a * b).has_terms()


def test_lattice_mismatch_rejected():
    a = SETUP_Q.monomial(1, 1)
    b = SETUP_HALF.monomial(1, 1)
    with pytest.raises(Exception):
        a + b


# -- u-series ------------------------------------------------------------------


def test_useries_product_truncates_at_order():
    one = SETUP_Q.one()
    a = USeries.build(SETUP_Q, 3, [one, one, one])
    sq = a * a
    assert [c.terms[0][1] if c.has_terms() else 0
            for c in sq.coeffs] == [1, 2, 3]


def test_useries_valid_propagates():
    one = SETUP_Q.one()
    a = USeries.build(SETUP_Q, 4, [one, one], valid=2)
    b = USeries.from_novikov(one, 4, 1)  # u
    assert (a * b).valid == 3
    assert (a + b).valid == 2


def test_useries_du():
    one = SETUP_Q.one()
    a = USeries.build(SETUP_Q, 4, [one, one, one, one])
    d = useries_du(a)
    assert d.valid == 3
    assert [c.terms[0][1] if c.has_terms() else 0
            for c in d.coeffs[:3]] == [1, 2, 3]


def test_useries_unit_inverse():
    one = SETUP_Q.one()
    q = SETUP_Q.monomial(1, 1)
    p = USeries.build(SETUP_Q, 4, [one, q, one, q])
    inv = useries_invert_unit(p, 8)
    prod = p * inv
    assert prod.coeffs[0].is_exact and list(prod.coeffs[0].terms) == [(0, 1)]
    assert all(not c.has_terms() for c in prod.coeffs[1:])


def test_useries_shift_down():
    one = SETUP_Q.one()
    a = USeries.build(SETUP_Q, 3, [SETUP_Q.zero(), one, one])
    s = a.shift_down(1)
    assert list(s.coeffs[0].terms) == [(0, 1)]
    assert s.valid == 2


# -- text grammar --------------------------------------------------------------


@pytest.mark.parametrize("text", [
    "0", "1", "-1", "q", "q^-1", "2*q^3", "1/2*q^-2 + q + 3",
])
def test_novikov_parse_format_roundtrip(text):
    x = parse_novikov(text, SETUP_Q)
    assert parse_novikov(format_novikov(x), SETUP_Q) == x


@given(novikov_elems())
@settings(max_examples=60, deadline=None)
def test_format_parse_identity(a):
    assert parse_novikov(format_novikov(a), SETUP_Q) == a


def test_parse_fractional_exponent():
    x = parse_novikov("q^(1/2)", SETUP_HALF)
    assert x.valuation() == Fraction(1, 2)


def test_parse_rejects_off_lattice_exponent():
    with pytest.raises(Exception):
        parse_novikov("q^(1/2)", SETUP_Q)


def test_useries_roundtrip():
    text = "1 + q + (q^2)*u + (2)*u^2"
    a = parse_useries(text, SETUP_Q, 3)
    assert parse_useries(format_useries(a), SETUP_Q, 3).coeffs == a.coeffs
