"""Lattices: canonical forms, elementary divisors, smith bases."""

import pytest

from kisinlab import (Lattice, d1d2, format_lattice, get_ctx, hermite_form,
                      lattice_from_columns, monomial, one, parse_lattice,
                      parse_series, phi_image, rel_position, smith_basis,
                      standard_lattice, zero)
from kisinlab import PhiModule, parse_matrix


def test_standard_lattice(f3):
    L = standard_lattice(f3)
    assert (L.m, L.n) == (0, 0)
    assert format_lattice(L) == "lat(0,0,0)"


def test_format_parse_roundtrip(f3):
    for text in ("lat(0,0,0)", "lat(2,-1,u^-1)", "lat(3,1,u + u^2)"):
        assert format_lattice(parse_lattice(f3, text)) == text


def test_equality_ignores_basis_choice(f3):
    # lat(m,n,r): only r mod u^m matters for the column span
    a = Lattice(f3, 2, 0, parse_series(f3, "u"))
    b = Lattice(f3, 2, 0, parse_series(f3, "1"))
    c = Lattice(f3, 2, 0, parse_series(f3, "2*u"))
    assert a != b and a != c and b != c
    d = Lattice(f3, 2, 0, parse_series(f3, "u+u^2"))
    assert a == d


def test_lattice_from_columns_invariance(f3):
    u = monomial(f3, 1, 1)
    c1 = (parse_series(f3, "1+u"), one(f3))
    c2 = (parse_series(f3, "u^2"), zero(f3))
    L = lattice_from_columns(f3, c1, c2)
    # swapping columns or adding a multiple of one to the other keeps
    # the span
    assert lattice_from_columns(f3, c2, c1) == L
    c2p = (c2[0].add(c1[0].mul(u)), c2[1].add(c1[1].mul(u)))
    assert lattice_from_columns(f3, c1, c2p) == L
    # scaling a column by the unit 2 likewise
    c1p = (c1[0].scale(2), c1[1].scale(2))
    assert lattice_from_columns(f3, c1p, c2) == L


def test_hermite_form_idempotent(f3):
    L = parse_lattice(f3, "lat(3,-1,2*u^-1+u)")
    M = hermite_form(f3, ((monomial(f3, 1, L.m), L.r),
                          (zero(f3), monomial(f3, 1, L.n))))
    assert M == L


def test_rel_position_of_shifted_standard(f3):
    L = standard_lattice(f3)
    M = Lattice(f3, 3, 1, zero(f3))
    d = rel_position(L, M)
    assert (d.a, d.b) == (3, 1)
    assert (d.d1, d.d2) == (2, 4)
    # swapping the arguments flips the sign of d2 but keeps d1
    e = rel_position(M, L)
    assert (e.d1, e.d2) == (2, -4)


def test_d1d2_matches_rel_position(f3):
    L = parse_lattice(f3, "lat(2,-1,u^-1)")
    M = parse_lattice(f3, "lat(1,0,0)")
    d = rel_position(L, M)
    assert d1d2(L, M) == (d.d1, d.d2)


def test_homothety_shifts_divisors(f3):
    L = parse_lattice(f3, "lat(2,-1,u^-1)")
    M = Lattice(f3, L.m + 1, L.n + 1, L.r.shift(1))
    d = rel_position(L, M)
    assert (d.a, d.b) == (1, 1)


def test_smith_basis_postconditions(f3):
    prec = 24
    pairs = [
        ("lat(0,0,0)", "lat(3,1,0)"),
        ("lat(2,-1,u^-1)", "lat(1,0,0)"),
        ("lat(1,1,0)", "lat(2,-2,2*u^-1+u)"),
    ]
    for ta, tb in pairs:
        L1, L2 = parse_lattice(f3, ta), parse_lattice(f3, tb)
        (f1, f2), (alpha, beta) = smith_basis(L1, L2, prec)
        assert alpha >= beta
        d = rel_position(L1, L2)
        assert (alpha, beta) == (d.a, d.b)
        # f1, f2 is a basis of L1; u^alpha f1, u^beta f2 one of L2
        assert lattice_from_columns(f3, f1, f2) == L1
        g1 = tuple(c.shift(alpha) for c in f1)
        g2 = tuple(c.shift(beta) for c in f2)
        assert lattice_from_columns(f3, g1, g2) == L2


def test_phi_image_of_standard(f3):
    phi = PhiModule(f3, parse_matrix(f3, "0,u^2;1,0"))
    L = standard_lattice(f3)
    M = phi_image(phi, L)
    d = rel_position(L, M)
    assert (d.a, d.b) == (2, 0)


def test_phi_image_twist(f3):
    # phi_image respects the semilinear scaling: Phi(u^n L) = u^(pn) Phi(L)
    phi = PhiModule(f3, parse_matrix(f3, "1,1;0,u"))
    L = parse_lattice(f3, "lat(1,-1,u^-1)")
    Lup = Lattice(f3, L.m + 1, L.n + 1, L.r.shift(1))
    img, imgup = phi_image(phi, L), phi_image(phi, Lup)
    d = rel_position(img, imgup)
    assert (d.a, d.b) == (3, 3)


def test_sort_key_is_input_order_independent(f3):
    A = parse_lattice(f3, "lat(1,0,0)")
    B = parse_lattice(f3, "lat(0,1,0)")
    C = parse_lattice(f3, "lat(1,0,u)")
    fwd = sorted([A, B, C], key=Lattice.sort_key)
    rev = sorted([C, B, A], key=Lattice.sort_key)
    assert fwd == rev
