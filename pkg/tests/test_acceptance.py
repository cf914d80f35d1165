"""Acceptance gate: the seven package-level checks, one verdict line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the verdict
lines; each criterion asserts exact equality throughout and prints a
single PASS line with its coverage numbers.
"""

import random
import time

from kisinlab import (NoAdmissibleLattice, NonSplit, PhiModule, Simple,
                      SplitIso, SplitNonIso, VParams, ball_vertices,
                      brute_is_split, classify, component_report,
                      descent_check, distance_routes, enumerate_admissible,
                      get_ctx, materialize, observed_x0, one, parse_matrix,
                      parse_series, predict_components, predict_empty,
                      predict_singleton, stratify, verify_extremal,
                      x0_irredundancy, x0_point_set)


def _shapes(ctx):
    return [Simple(ctx, 1, 2), SplitIso(ctx, 1, 1),
            SplitNonIso(ctx, 1, 0, 2, 1),
            NonSplit(ctx, 1, 0, 1, 1, parse_series(ctx, "u"))]


def _reducibles(ctx):
    mods = [SplitIso(ctx, 1, 0), SplitIso(ctx, 1, 1),
            SplitNonIso(ctx, 1, 0, 2, 1), SplitNonIso(ctx, 1, 1, 2, 0),
            classify(PhiModule(ctx, parse_matrix(ctx, "1,1;0,u"))),
            NonSplit(ctx, 1, 0, 1, 0, one(ctx))]
    if ctx.p == 3:
        # twist reduction with a negative offset valuation
        mods.append(classify(PhiModule(ctx, parse_matrix(ctx, "2,u;0,u^3"))))
    return mods


def test_criterion_1_distance_identities():
    """Every lattice of a tree ball satisfies the image-distance
    identities with both sides computed by independent paths: matrix
    multiplication + divisor reduction, tree metric on the mapped point,
    and the closed-form projection formulas."""
    t0 = time.time()
    checks = 0
    # ball radii reduced for the two large fields to hold the time
    # budget; the identities are still checked exactly on every
    # enumerated lattice
    for p, k, radius in [(3, 1, 6), (5, 1, 6), (3, 2, 4), (5, 2, 2)]:
        ctx = get_ctx(p, k)
        for nf in _shapes(ctx):
            for vtx, _ in ball_vertices(ctx, 0, None, radius):
                L = materialize(ctx, vtx, vtx[0] % 2)
                a, b, c = distance_routes(nf, L)
                assert a == b == c, (p, k, nf.literal(), vtx)
                checks += 1
    elapsed = time.time() - t0
    assert elapsed < 60, f"criterion 1 overran: {elapsed:.1f}s"
    print(f"\nCRITERION 1: PASS ({checks} lattice checks, 4 fields, "
          f"{elapsed:.1f}s)")


def test_criterion_2_simple_strata():
    """Every nonempty stratum of the antidiagonal case carries exactly
    q^dim rational points with dim = floor((a-b)/(p+1)), and
    nonemptiness matches the congruence test, over F_p and F_{p^2}."""
    t0 = time.time()
    rows = nonempty = 0
    for p, k, smax, emax in [(3, 1, 8, 4), (5, 1, 24, 3), (3, 2, 8, 3),
                             (5, 2, 10, 2)]:
        ctx = get_ctx(p, k)
        for s in range(1, smax):
            if s % (p + 1) == 0:
                continue
            nf = Simple(ctx, 1, s)
            for e in range(1, emax + 1):
                for r1 in range(e + 1):
                    v = VParams(e, r1, 0)
                    observed = {d: len(Ls) for d, Ls in
                                enumerate_admissible(nf, v).strata().items()}
                    table = stratify(nf, v)
                    for row in table:
                        got = observed.get((row["a"], row["b"]), 0)
                        assert row["count"] == got, (p, k, s, e, r1, row)
                        assert row["nonempty"] == (got > 0)
                        if row["nonempty"]:
                            assert got == (p ** k) ** row["dim"]
                            nonempty += 1
                        rows += 1
                    assert set(observed) <= {(r["a"], r["b"]) for r in table}
    elapsed = time.time() - t0
    assert elapsed < 300, f"criterion 2 overran: {elapsed:.1f}s"
    print(f"\nCRITERION 2: PASS ({rows} stratum rows, {nonempty} nonempty, "
          f"{elapsed:.1f}s)")


def test_criterion_3_empty_singleton():
    """Enumeration cardinality is 0 or 1 exactly when the closed-form
    emptiness/singleton criteria say so, over 200+ parameter tuples."""
    t0 = time.time()
    tuples = decided_empty = decided_single = 0
    for p in (3, 5):
        ctx = get_ctx(p, 1)
        mods = [Simple(ctx, 1, 1), Simple(ctx, 1, 2), Simple(ctx, 1, 5),
                SplitIso(ctx, 1, 0), SplitIso(ctx, 1, 1),
                SplitNonIso(ctx, 1, 0, 2, 1),
                classify(PhiModule(ctx, parse_matrix(ctx, "1,1;0,u")))]
        for nf in mods:
            for e in (1, 2, 3):
                for r1 in range(e + 1):
                    for r2 in range(r1 + 1):
                        v = VParams(e, r1, r2)
                        n = len(enumerate_admissible(nf, v))
                        tuples += 1
                        pe = predict_empty(nf, v)
                        if pe is not None:
                            assert pe == (n == 0), (p, nf.literal(), e, r1, r2)
                            decided_empty += 1
                        ps = predict_singleton(nf, v)
                        if ps is not None:
                            assert ps == (n == 1), (p, nf.literal(), e, r1, r2)
                            decided_single += 1
    assert tuples >= 200
    elapsed = time.time() - t0
    assert elapsed < 300, f"criterion 3 overran: {elapsed:.1f}s"
    print(f"\nCRITERION 3: PASS ({tuples} tuples, {decided_empty} empty + "
          f"{decided_single} singleton verdicts, {elapsed:.1f}s)")


def test_criterion_4_component_structure():
    """Predicted ordinary-component shapes (empty / point / line with
    q+1 points) match the stable-rank partition of the enumerated locus
    for all three reducible shapes; at most two labels ever light up."""
    t0 = time.time()
    instances = by_shape = 0
    shapes_seen = set()
    for p in (3, 5):
        ctx = get_ctx(p, 1)
        for nf in _reducibles(ctx):
            for e in (1, 2, 3):
                for r1 in range(e + 1):
                    for r2 in range(r1 + 1):
                        v = VParams(e, r1, r2)
                        if not len(enumerate_admissible(nf, v)):
                            continue
                        instances += 1
                        pred = predict_components(nf, v)
                        rep = component_report(nf, v)
                        assert len(pred) <= 2
                        nonzero = 0
                        for label, entry in pred.items():
                            got = sorted(rep["labels"][label],
                                         key=lambda L: L.sort_key())
                            assert entry["points"] == got, (
                                p, nf.literal(), e, r1, r2, label)
                            assert entry["shape"] in ("empty", "point",
                                                      "line")
                            shapes_seen.add(entry["shape"])
                            if entry["shape"] == "line":
                                assert len(entry["points"]) == ctx.q + 1
                            if entry["points"]:
                                nonzero += 1
                            by_shape += 1
                        assert nonzero <= 2
    assert shapes_seen == {"empty", "point", "line"}
    elapsed = time.time() - t0
    print(f"\nCRITERION 4: PASS ({instances} instances, {by_shape} label "
          f"tables, shapes {sorted(shapes_seen)}, {elapsed:.1f}s)")


def test_criterion_5_zero_stratum():
    """The zero stratum equals the union of the predicted balls minus
    the ordinary table points, and the flagged component list is
    irredundant except for the documented dropped-center cases."""
    t0 = time.time()
    instances = dropped = 0
    for p, emax in ((3, 6), (5, 3)):
        ctx = get_ctx(p, 1)
        for nf in _reducibles(ctx):
            for e in range(1, emax + 1):
                for r1 in range(e + 1):
                    for r2 in range(r1 + 1):
                        v = VParams(e, r1, r2)
                        if not len(enumerate_admissible(nf, v)):
                            continue
                        instances += 1
                        assert x0_point_set(nf, v) == observed_x0(nf, v), (
                            p, nf.literal(), e, r1, r2)
                        irr = x0_irredundancy(nf, v)
                        assert irr["kept_irredundant"], (
                            p, nf.literal(), e, r1, r2)
                        assert all(n == "Z" for n in
                                   irr["uncovered_dropped"]), (
                            p, nf.literal(), e, r1, r2, irr)
                        dropped += len(irr["uncovered_dropped"])
    assert dropped > 0, "sweep never reached a dropped center ball"
    elapsed = time.time() - t0
    print(f"\nCRITERION 5: PASS ({instances} instances, {dropped} documented "
          f"dropped centers, {elapsed:.1f}s)")


def _max_row(p, s, e):
    s1, s2 = s % (p + 1), s % (p - 1)
    m, l = s // (p + 1), s // (p - 1)
    if (l + m) % 2 == 0:
        return "max1" if s2 >= s1 else "max2"
    return "max3" if s1 + s2 >= p + 1 else "max4"


def _min_row(p, s, e):
    s1, s2p = s % (p + 1), (2 * e - s) % (p - 1)
    m, lp = s // (p + 1), (2 * e - s) // (p - 1)
    if (lp + m) % 2 == 0:
        return "min1" if s1 <= s2p else "min2"
    return "min3" if s1 + s2p >= p + 1 else "min4"


def test_criterion_6_extremal_lattices():
    """Extremal lattices: containment certificates on sweeps spanning
    e < p-1 and e >= p-1, the small-bound pinching implication, every
    derived divisor-table row hit at least twice, and Frobenius descent
    of the extremal lattices from the quadratic extension."""
    t0 = time.time()
    rows = {}
    instances = big_e_split = 0
    for p in (3, 5):
        ctx = get_ctx(p, 1)
        for s in range(1, p * p - 1):
            if s % (p + 1) == 0:
                continue
            nf = Simple(ctx, 1, s)
            for e in range(1, 6):
                try:
                    rep = verify_extremal(nf, e)
                except NoAdmissibleLattice:
                    continue
                instances += 1
                # find_extremal certifies containment internally; the
                # closed-form rows must agree with the observed divisors
                assert rep["predicted_matches"] is True, (p, s, e)
                if rep["small_e"]:
                    assert rep["coincide"], (p, s, e)
                elif not rep["coincide"]:
                    big_e_split += 1
                for row in (_max_row(p, s, e), _min_row(p, s, e)):
                    rows[row] = rows.get(row, 0) + 1
        for nf in (SplitIso(ctx, 1, 0), SplitIso(ctx, 1, 1),
                   SplitNonIso(ctx, 1, 0, 2, 1)):
            for e in range(1, 5):
                try:
                    rep = verify_extremal(nf, e)
                except NoAdmissibleLattice:
                    continue
                instances += 1
                assert rep["predicted_matches"] is True, (p, nf.literal(), e)
                if rep["small_e"]:
                    assert rep["coincide"], (p, nf.literal(), e)
                side = "split_max", "split_min"
                for row in side:
                    rows[row] = rows.get(row, 0) + 1
    assert big_e_split > 0, "sweep never saw min != max at e >= p-1"
    missing = [r for r in ("max1", "max2", "max3", "max4", "min1", "min2",
                           "min3", "min4", "split_max", "split_min")
               if rows.get(r, 0) < 2]
    assert not missing, f"table rows hit fewer than twice: {missing}"
    f3 = get_ctx(3, 1)
    for nf, e in ((Simple(f3, 1, 2), 3), (SplitNonIso(f3, 1, 0, 2, 1), 3),
                  (Simple(get_ctx(5, 1), 1, 1), 2)):
        rep = descent_check(nf, e)
        assert rep == {"divisors_match": True, "coords_match": True,
                       "coeffs_fixed": True, "coincide_match": True}, (
            nf.literal(), e)
    elapsed = time.time() - t0
    assert elapsed < 600, f"criterion 6 overran: {elapsed:.1f}s"
    print(f"\nCRITERION 6: PASS ({instances} instances, row coverage "
          f"{dict(sorted(rows.items()))}, {big_e_split} split windows at "
          f"e >= p-1, 3 descents, {elapsed:.1f}s)")


def test_criterion_7_dual_path_classification():
    """The normal-form route and the dense-solver route agree on the
    split question for 1000+ seeded random triangular modules, and every
    nonsplit verdict satisfies the offset-valuation bound."""
    t0 = time.time()
    rng = random.Random(1234)
    total = n_split = 0
    for p, count in ((3, 700), (5, 300)):
        ctx = get_ctx(p, 1)
        for _ in range(count):
            a = rng.randrange(1, p)
            b = rng.randrange(1, p)
            s = rng.randrange(0, 5)
            t = rng.randrange(0, 5)
            gterms = {rng.randrange(0, 6): rng.randrange(0, p)
                      for _ in range(rng.randrange(0, 3))}
            gtext = " + ".join(f"{c}*u^{e}" for e, c in sorted(gterms.items())
                               if c) or "0"
            mat = parse_matrix(ctx, f"{a}*u^{s},{gtext};0,{b}*u^{t}")
            nf = classify(PhiModule(ctx, mat))
            split_brute = brute_is_split(ctx, mat)
            assert split_brute == (nf.case != "nonsplit"), (
                p, a, s, b, t, gterms)
            if nf.case == "nonsplit":
                assert nf.k * (p - 1) <= p * nf.t - nf.s, (p, a, s, b, t,
                                                           gterms)
            total += 1
            n_split += split_brute
    assert total >= 1000 and 0 < n_split < total
    elapsed = time.time() - t0
    print(f"\nCRITERION 7: PASS ({total} modules, {n_split} split / "
          f"{total - n_split} nonsplit, {elapsed:.1f}s)")
