"""Typed loci: enumeration, strata, components, zero stratum, families."""

from fractions import Fraction

import pytest

from kisinlab import (NonSplit, PhiModule, Simple, SplitIso, SplitNonIso,
                      VParams, classify, compare_relaxed_locus,
                      component_report, connectivity_certificate,
                      distance_routes, enumerate_admissible, fixed_point,
                      format_lattice, lattice_to_point, m_of_v, materialize,
                      observed_x0, one, p1_family, parse_matrix, parse_series,
                      predict_components, predict_dimension, predict_empty,
                      predict_singleton, predict_x0_decomposition, ray_family,
                      s_rank_with_labels, stratify, stratum_candidates,
                      tree_d1, x0_irredundancy, x0_point_set, zero)


def lats(xs):
    return [format_lattice(L) for L in xs]


def test_fixed_point_columns(f3):
    P = fixed_point(Simple(f3, 1, 2))
    assert (P.x, P.y) == (Fraction(1, 2), Fraction(-1))
    nf = classify(PhiModule(f3, parse_matrix(f3, "1,1;0,u")))
    Q = fixed_point(nf)
    assert (Q.x, Q.y) == (Fraction(1, 2), Fraction(-1, 2))


def test_level_congruence(f3):
    nf = Simple(f3, 1, 2)
    assert m_of_v(nf, VParams(5, 4, 0)) == 2
    # v(det) odd, d' odd: the level is a half-integer and the locus is
    # empty before any enumeration
    bad = enumerate_admissible(Simple(f3, 1, 1), VParams(1, 0, 0))
    assert bad.level is None and len(bad) == 0
    assert "integer" in bad.reason
    assert predict_empty(Simple(f3, 1, 1), VParams(1, 0, 0)) is True


def test_singleton_locus(f3):
    nf = Simple(f3, 1, 2)
    v = VParams(5, 4, 0)
    adm = enumerate_admissible(nf, v)
    assert adm.level == 2
    assert lats(adm) == ["lat(1,1,0)"]
    assert adm.strata() == {(4, 2): adm.lattices}
    assert adm.divisors(adm.lattices[0]).as_tuple() == (4, 2)
    assert predict_empty(nf, v) is False
    assert predict_singleton(nf, v) is True
    assert predict_dimension(nf, v) == 0


def test_line_locus(f3):
    nf = Simple(f3, 1, 2)
    v = VParams(7, 6, 0)
    adm = enumerate_admissible(nf, v)
    assert adm.level == 3
    assert lats(adm) == ["lat(1,2,0)", "lat(2,1,0)", "lat(2,1,u)",
                         "lat(2,1,2*u)"]
    assert {d: len(Ls) for d, Ls in adm.strata().items()} == {
        (7, 1): 3, (5, 3): 1}
    assert predict_singleton(nf, v) is False
    assert predict_dimension(nf, v) == 1


def test_stratify_matches_enumeration(f3):
    nf = Simple(f3, 1, 2)
    v = VParams(7, 6, 0)
    assert stratum_candidates(v) == [(7, 1), (6, 2), (5, 3), (4, 4)]
    rows = stratify(nf, v)
    observed = {d: len(Ls) for d, Ls in enumerate_admissible(nf, v).strata().items()}
    for row in rows:
        assert row["count"] == observed.get((row["a"], row["b"]), 0)
    assert [r["dim"] for r in rows] == [1, None, 0, None]


def test_antidiagonal_only_tables(f3):
    with pytest.raises(ValueError):
        stratify(SplitIso(f3, 1, 0), VParams(1, 1, 0))
    with pytest.raises(ValueError):
        predict_dimension(SplitIso(f3, 1, 0), VParams(1, 1, 0))
    with pytest.raises(ValueError):
        predict_components(Simple(f3, 1, 2), VParams(1, 1, 0))
    with pytest.raises(ValueError):
        component_report(Simple(f3, 1, 2), VParams(1, 1, 0))
    with pytest.raises(ValueError):
        predict_x0_decomposition(Simple(f3, 1, 2), VParams(1, 1, 0))


def test_predictions_against_enumeration_simple(f3):
    for s in (1, 2, 5):
        nf = Simple(f3, 1, s)
        for e in (1, 2, 3):
            for r1 in range(e + 1):
                for r2 in range(r1 + 1):
                    v = VParams(e, r1, r2)
                    adm = enumerate_admissible(nf, v)
                    assert predict_empty(nf, v) == (len(adm) == 0)
                    assert predict_singleton(nf, v) == (len(adm) == 1)
                    if len(adm) == 0:
                        assert predict_dimension(nf, v) is None
                    else:
                        p = f3.p
                        want = max((a - b) // (p + 1)
                                   for a, b in adm.strata())
                        assert predict_dimension(nf, v) == want


def test_distance_routes_agree(f3):
    mods = [Simple(f3, 1, 2), SplitIso(f3, 1, 1), SplitNonIso(f3, 1, 0, 2, 1),
            classify(PhiModule(f3, parse_matrix(f3, "1,1;0,u")))]
    for nf in mods:
        for x in range(-2, 3):
            for y in (x % 2, x % 2 + 2):
                L = materialize(f3, (x, ()), y)
                a, b, c = distance_routes(nf, L)
                assert a == b == c, (nf.literal(), x, y)


def test_relaxed_locus_directions(f3):
    # boundary type: the two tests must agree
    both = compare_relaxed_locus(Simple(f3, 1, 2), VParams(5, 4, 0))
    assert both["predicted_coincide"] and both["observed_coincide"]
    # interior type: the relaxed locus is strictly bigger here
    gap = compare_relaxed_locus(Simple(f3, 1, 2), VParams(2, 1, 1))
    assert not gap["predicted_coincide"] and not gap["observed_coincide"]
    assert (gap["n_strict"], gap["n_relaxed"]) == (0, 1)


def test_components_ordinary_line(f3):
    # the locus is a single line of ordinary points and the zero stratum
    # is empty: the predicted ball Z consists of boundary points only
    nf = SplitIso(f3, 1, 0)
    v = VParams(2, 2, 0)
    rep = component_report(nf, v)
    assert lats(rep["admissible"]) == [
        "lat(0,1,0)", "lat(1,0,0)", "lat(1,0,1)", "lat(1,0,2)"]
    pred = predict_components(nf, v)
    assert pred["X_Ma"]["shape"] == "line"
    assert pred["X_Ma"]["points"] == rep["labels"]["X_Ma"]
    assert rep["zero_stratum"] == []
    assert x0_point_set(nf, v) == set() == observed_x0(nf, v)
    dec = predict_x0_decomposition(nf, v)
    assert [(c["name"], c["radius"], c["dim"], c["kept"])
            for c in dec["components"]] == [("Z", 1, 1, True)]


def test_components_split_iso_two_pieces(f3):
    nf = SplitIso(f3, 1, 1)
    v = VParams(7, 6, 0)
    rep = component_report(nf, v)
    assert len(rep["admissible"]) == 8
    assert sorted(lats(rep["zero_stratum"])) == [
        "lat(1,2,0)", "lat(2,1,0)", "lat(2,1,2*u)", "lat(2,1,u)"]
    dec = predict_x0_decomposition(nf, v)
    assert dec["level"] == 3 and dec["dim"] == 1
    assert [(c["name"], c["radius"], c["dim"], c["kept"])
            for c in dec["components"]] == [("Z", 1, 1, True),
                                            ("Z0", 0, 1, True)]
    assert x0_point_set(nf, v, dec) == observed_x0(nf, v)
    irr = x0_irredundancy(nf, v, dec)
    assert irr["kept_irredundant"] and irr["uncovered_dropped"] == []
    parts = connectivity_certificate(f3, rep["admissible"].lattices)
    assert sorted(len(g) for g in parts) == [4, 4]


def test_components_split_noniso(f3):
    nf = SplitNonIso(f3, 1, 0, 2, 1)
    v = VParams(7, 7, 0)
    rep = component_report(nf, v)
    assert len(rep["admissible"]) == 8
    assert lats(rep["labels"]["X_Ma"]) == ["lat(0,3,0)"]
    assert rep["labels"]["X_Mb"] == []
    assert len(rep["zero_stratum"]) == 7
    pred = predict_components(nf, v)
    assert pred["X_Ma"]["points"] == rep["labels"]["X_Ma"]
    assert pred["X_Mb"]["shape"] == "empty"
    dec = predict_x0_decomposition(nf, v)
    assert [(c["name"], c["radius"], c["dim"], c["kept"])
            for c in dec["components"]] == [("Z", 1, 1, True),
                                            ("Z+0", 1, 1, True),
                                            ("Z-0", 0, 0, True)]
    assert x0_point_set(nf, v, dec) == observed_x0(nf, v)
    parts = connectivity_certificate(f3, rep["admissible"].lattices)
    assert sorted(len(g) for g in parts) == [1, 7]


def test_components_nonsplit(f3):
    nf = classify(PhiModule(f3, parse_matrix(f3, "1,1;0,u")))
    v = VParams(3, 3, 0)
    rep = component_report(nf, v)
    assert lats(rep["admissible"]) == ["lat(0,1,0)", "lat(1,0,0)"]
    assert lats(rep["labels"]["X_Ma"]) == ["lat(0,1,0)"]
    assert lats(rep["zero_stratum"]) == ["lat(1,0,0)"]
    dec = predict_x0_decomposition(nf, v)
    assert [(c["name"], c["radius"], c["dim"], c["kept"])
            for c in dec["components"]] == [("Z", 0, 0, True),
                                            ("Z-0", 0, 0, True)]
    assert x0_point_set(nf, v, dec) == observed_x0(nf, v)
    # one ordinary point, one zero-stratum point: no rational line joins
    # them, so the certificate reports two classes
    parts = connectivity_certificate(f3, rep["admissible"].lattices)
    assert [lats(g) for g in parts] == [["lat(0,1,0)"], ["lat(1,0,0)"]]


def test_components_pinned_zone_boundary(f3):
    # gamma of valuation s with s = t: the ordinary candidate sits
    # exactly on the pinned zone's edge (k - s)/p and is a genuine
    # ordinary lattice there -- here the standard lattice, fixed by the
    # module with stable line e1
    nf = NonSplit(f3, 1, 0, 1, 0, one(f3))
    assert nf.literal() == "nonsplit:a=1,s=0,b=1,t=0,gamma=1"
    v = VParams(1, 1, 1)
    rep = component_report(nf, v)
    assert lats(rep["admissible"]) == ["lat(0,0,0)"]
    pred = predict_components(nf, v)
    assert pred["X_Ma"]["shape"] == "point"
    assert lats(pred["X_Ma"]["points"]) == ["lat(0,0,0)"]
    assert rep["zero_stratum"] == []
    # emptiness tables make no claim for this shape
    assert predict_empty(nf, v) is None


def test_components_negative_offset(f3):
    # twist reduction pushes v(gamma) below zero; all routes stay consistent
    nf = classify(PhiModule(f3, parse_matrix(f3, "2,u;0,u^3")))
    assert nf.literal() == "nonsplit:a=2,s=0,b=1,t=1,gamma=u^-2"
    v = VParams(3, 3, 0)
    rep = component_report(nf, v)
    adm = rep["admissible"]
    assert adm.level == 1 and len(adm) == 1
    assert len(rep["labels"]["X_Ma"]) == 1 and rep["labels"]["X_Mb"] == []
    assert rep["zero_stratum"] == []
    pred = predict_components(nf, v)
    assert pred["X_Ma"]["points"] == rep["labels"]["X_Ma"]
    assert x0_point_set(nf, v) == set()


def test_s_rank_rejects_wrong_type(f3):
    nf = SplitIso(f3, 1, 1)
    v = VParams(7, 6, 0)
    far = materialize(f3, (7, ()), 3)
    with pytest.raises(ValueError):
        s_rank_with_labels(nf, v, far)


def test_p1_family_frozen(f3):
    b1 = (parse_series(f3, "u"), zero(f3))
    b2 = (zero(f3), one(f3))
    inner = p1_family(b1, b2)
    assert sorted(lats(inner)) == [
        "lat(0,1,0)", "lat(1,0,0)", "lat(1,0,1)", "lat(1,0,2)"]
    assert sorted(lats(p1_family(b1, b2, "outer1", 2))) == [
        "lat(-1,2,0)", "lat(2,-1,0)", "lat(2,-1,2*u^-1)", "lat(2,-1,u^-1)"]
    assert sorted(lats(p1_family(b1, b2, "outer2", 2))) == [
        "lat(-1,2,0)", "lat(3,-2,0)", "lat(3,-2,2*u^-1)", "lat(3,-2,u^-1)"]
    with pytest.raises(ValueError):
        p1_family(b1, b2, "sideways")
    # the ordinary line of the isotypic module at type (2,2,0) is exactly
    # this inner family
    pred = predict_components(SplitIso(f3, 1, 0), VParams(2, 2, 0))
    assert sorted(lats(pred["X_Ma"]["points"])) == sorted(lats(inner))


def test_ray_family_geometry(f3):
    fam = ray_family(f3, (0, ()), 2)
    assert fam == [(-2, ()), (2, ()), (2, ((0, 1),)), (2, ((0, 2),))]
    assert len(fam) == f3.q + 1
    base = lattice_to_point(materialize(f3, (0, ()), 0))
    for vtx in fam:
        P = lattice_to_point(materialize(f3, vtx, vtx[0] % 2))
        assert tree_d1(base, P) == 2
