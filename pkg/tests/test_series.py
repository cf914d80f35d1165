"""Truncated Laurent series: exact arithmetic with certified precision."""

import pytest
from hypothesis import given, strategies as st

from kisinlab import (InsufficientPrecision, from_terms, get_ctx,
                      format_series, monomial, one, parse_series, zero,
                      get_default_prec, set_default_prec)
from kisinlab.series import s_add, s_mul, s_phi, s_sub


def test_parse_format_roundtrip(f3):
    for text in ("0", "1", "u", "2*u^-1", "1 + 2*u^3", "u^-2 + u^2"):
        s = parse_series(f3, text)
        assert format_series(s) == text


def test_parse_collects_terms(f3):
    assert parse_series(f3, "u+u") == parse_series(f3, "2*u")
    assert parse_series(f3, "u+2*u") == zero(f3)


def test_add_mul_basics(f3):
    a = parse_series(f3, "1+u")
    b = parse_series(f3, "2+u^2")
    assert format_series(s_add(a, b)) == "u + u^2"
    assert s_mul(a, one(f3)) == a
    assert s_mul(a, zero(f3)).is_zero()


def test_mul_valuations_add(f3):
    a = monomial(f3, 2, 3)
    b = monomial(f3, 2, -1)
    assert s_mul(a, b).valuation() == 2
    assert format_series(s_mul(a, b)) == "u^2"


def test_valuation_of_certified_zero(f3):
    assert zero(f3).is_zero()
    a = parse_series(f3, "1+u^4")
    assert s_sub(a, a).is_zero()


def test_insufficient_precision_on_murky_zero(f3):
    # all stored coefficients vanish but the window is finite, so a
    # certified valuation cannot be produced
    murky = from_terms(f3, {}, 8)
    with pytest.raises(InsufficientPrecision):
        murky.valuation()
    assert murky.valuation(certified=False) is None


def test_inverse_of_unit(f3):
    a = parse_series(f3, "1+u")
    prod = s_mul(a, a.inv(12))
    assert prod.coeff(0) == 1
    for i in range(1, 10):
        assert prod.coeff(i) == 0


def test_inverse_respects_valuation(f3):
    a = parse_series(f3, "u^2+u^3")
    assert a.inv(10).valuation() == -2


def test_phi_substitutes_u_to_up(f3):
    a = parse_series(f3, "1+u+2*u^2")
    assert format_series(s_phi(a)) == "1 + u^3 + 2*u^6"
    assert s_phi(monomial(f3, 1, -1)).valuation() == -3


def test_phi_fixes_coefficients(f9):
    # u goes to u^p while every coefficient stays put, including ones
    # outside the prime subfield
    c = 4
    img = s_phi(monomial(f9, c, 1))
    assert img.coeff(3) == c != f9.frobenius(c)


def test_precision_window_propagates(f3):
    a = from_terms(f3, {0: 1}, 5)
    b = from_terms(f3, {0: 1}, 3)
    assert s_add(a, b).prec == 3
    assert s_mul(a, monomial(f3, 1, 2)).prec == 7


def test_default_prec_scoping():
    old = get_default_prec()
    try:
        set_default_prec(17)
        assert get_default_prec() == 17
    finally:
        set_default_prec(old)


@given(st.dictionaries(st.integers(-3, 6), st.integers(0, 2), max_size=5),
       st.dictionaries(st.integers(-3, 6), st.integers(0, 2), max_size=5))
def test_ring_commutativity(ta, tb):
    ctx = get_ctx(3)
    a, b = from_terms(ctx, ta, None), from_terms(ctx, tb, None)
    assert s_add(a, b) == s_add(b, a)
    assert s_mul(a, b) == s_mul(b, a)


@given(st.dictionaries(st.integers(-2, 5), st.integers(1, 2),
                       min_size=1, max_size=4))
def test_phi_is_multiplicative(terms):
    ctx = get_ctx(3)
    a = from_terms(ctx, terms, None)
    assert s_phi(s_mul(a, a)) == s_mul(s_phi(a), s_phi(a))
