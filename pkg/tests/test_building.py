"""Tree coordinates: points, projections, distances, the phi action."""

from fractions import Fraction

import pytest

from kisinlab import (NotALattice, Simple, apartment_point, ball_vertices,
                      classify, d1d2, get_ctx, lattice_to_point, materialize,
                      parse_lattice, parse_matrix, phi_image, phi_point,
                      point_to_lattice, PhiModule, project_to_apartment,
                      project_to_lines, render_dot, tree_d1, tree_d2)


def test_point_lattice_roundtrip(f3):
    for text in ("lat(0,0,0)", "lat(2,-1,u^-1)", "lat(1,0,2)"):
        L = parse_lattice(f3, text)
        assert point_to_lattice(lattice_to_point(L)) == L


def test_apartment_point_parity(f3):
    P = apartment_point(f3, 1, 1)
    assert point_to_lattice(P) == parse_lattice(f3, "lat(1,0,0)")
    with pytest.raises(NotALattice):
        point_to_lattice(apartment_point(f3, 1, 0))


def test_coordinates_of_standard(f3):
    P = lattice_to_point(parse_lattice(f3, "lat(0,0,0)"))
    assert (P.x, P.y) == (0, 0)
    # lat(m,n,r): x = m - n, y = m + n
    Q = lattice_to_point(parse_lattice(f3, "lat(2,-1,u^-1)"))
    assert (Q.x, Q.y) == (3, 1)


def test_tree_distance_is_metric_on_samples(f3):
    pts = [lattice_to_point(parse_lattice(f3, t)) for t in
           ("lat(0,0,0)", "lat(1,0,0)", "lat(2,0,u)", "lat(2,-1,u^-1)",
            "lat(3,0,1+u^2)")]
    for P in pts:
        assert tree_d1(P, P) == 0
        for Q in pts:
            assert tree_d1(P, Q) == tree_d1(Q, P)
            assert tree_d2(P, Q) == -tree_d2(Q, P)
            for R in pts:
                assert tree_d1(P, R) <= tree_d1(P, Q) + tree_d1(Q, R)


def test_tree_routes_match_divisor_routes(f3):
    # d1/d2 computed from coordinates equal the elementary-divisor ones
    texts = ("lat(0,0,0)", "lat(1,0,0)", "lat(1,0,1)", "lat(2,0,u)",
             "lat(2,-1,u^-1)", "lat(1,1,0)", "lat(3,0,1+2*u^2)")
    for ta in texts:
        for tb in texts:
            La, Lb = parse_lattice(f3, ta), parse_lattice(f3, tb)
            d1, d2 = d1d2(La, Lb)
            Pa, Pb = lattice_to_point(La), lattice_to_point(Lb)
            assert tree_d1(Pa, Pb) == d1
            assert tree_d2(Pa, Pb) == d2


def test_apartment_distance_is_max_metric(f3):
    P = apartment_point(f3, 0, 0)
    Q = apartment_point(f3, 3, 1)
    assert tree_d1(P, Q) == 3
    assert tree_d2(P, Q) == 1
    # d1 sees only the column separation; fractional coordinates work too
    R = apartment_point(f3, Fraction(1, 2), Fraction(3, 2))
    assert tree_d1(P, R) == Fraction(1, 2)
    assert tree_d2(P, R) == Fraction(3, 2)


def test_projection_to_apartment(f3):
    # a branch point hangs off the apartment at its divergence column
    P = lattice_to_point(parse_lattice(f3, "lat(2,0,u)"))
    piP = project_to_apartment(P)
    assert piP.q.is_zero()
    assert tree_d1(P, piP) + tree_d1(piP, apartment_point(f3, 0, 2)) \
        == tree_d1(P, apartment_point(f3, 0, 2))
    # projecting twice changes nothing
    assert tree_d1(project_to_apartment(piP), piP) == 0


def test_projection_to_lines_keeps_constant_branch(f3):
    # q = 1 + u: the constant-branch line through q(0)=1 retains the point
    # up to its branch column
    L = parse_lattice(f3, "lat(2,0,1+u)")
    P = lattice_to_point(L)
    piP = project_to_lines(P)
    assert tree_d1(P, piP) < tree_d1(P, project_to_apartment(P))


def test_phi_point_matches_matrix_route(f3):
    mats = ("0,u^2;1,0", "1,0;0,u", "1,u^2;0,u", "1,1;0,u")
    for text in mats:
        phi = PhiModule(f3, parse_matrix(f3, text))
        nf = classify(phi)
        for vtx, _ in ball_vertices(f3, 0, None, 3):
            for y in (vtx[0] % 2, vtx[0] % 2 + 2):
                L = materialize(f3, vtx, y)
                P = phi_point(nf, lattice_to_point(L))
                M = phi_image(nf.to_phi(), L)
                Q = lattice_to_point(M)
                assert tree_d1(P, Q) == 0 and P.y == Q.y


def test_render_dot_smoke(f3):
    pts = [lattice_to_point(parse_lattice(f3, t))
           for t in ("lat(0,0,0)", "lat(1,0,0)")]
    dot = render_dot(pts, title="two vertices")
    assert dot.startswith("graph")
    assert "two vertices" in dot
