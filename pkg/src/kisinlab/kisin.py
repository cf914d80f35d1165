"""Lattice combinatorics of admissible loci for rank-2 phi-modules.

Closed-form predictions (admissibility windows, stratum counts,
component tables, zero-stratum ball decompositions) together with the
enumeration glue that realizes them as explicit sets of lattices in the
tree.  Conventions:

* a lattice L has image divisors (a, b) with a >= b; d1 = a - b is the
  tree distance to the image and d2 = a + b the level rise;
* admissibility at type (e; r1, r2) means b >= e - r1 together with
  a + b = 2e - r1 - r2, which pins the level of every admissible
  lattice to m = (2e - d' - v(det))/(p - 1);
* every point set is the rational one: branch digits, stratum counts
  and component points run over the coefficient field, never over its
  closure.
"""

import math
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .field import FieldCtx
from .series import from_terms
from .latmod import (Lattice, format_lattice, lattice_from_columns,
                     phi_image, rel_position)
from .building import (BuildingPoint, apartment_point, lattice_to_point,
                       phi_point, project_to_apartment, project_to_lines,
                       tree_d1, tree_d2)
from .oracle import DEFAULT_BUDGET, ball_vertices, materialize


def _as_phi(nf):
    return nf.to_phi() if hasattr(nf, "to_phi") else nf


# -- the fixed point and the admissible level ---------------------------------

def fixed_point(nf) -> BuildingPoint:
    """The unique point of the building the module's action fixes.

    The antidiagonal form fixes column s/(p+1); the triangular forms fix
    column (t-s)/(p-1).  Both sit at level -v(det)/(p-1).
    """
    ctx = nf.ctx
    p = ctx.p
    if nf.case == "simple":
        return apartment_point(ctx, Fraction(nf.s, p + 1),
                               Fraction(-nf.s, p - 1))
    return apartment_point(ctx, Fraction(nf.t - nf.s, p - 1),
                           Fraction(-(nf.s + nf.t), p - 1))


def m_of_v(nf, v) -> Fraction:
    """Level of the admissible locus: (2e - d' - v(det))/(p - 1).

    Integrality of this value is exactly the congruence needed for the
    locus to be nonempty; every admissible lattice sits at this level.
    """
    return Fraction(2 * v.e - v.dprime - nf.det_valuation(), nf.ctx.p - 1)


def is_v_admissible(nf, L: Lattice, v) -> bool:
    """Divisor-route admissibility: b >= e - r1 and a + b = 2e - d'."""
    d = rel_position(L, phi_image(_as_phi(nf), L))
    return d.b >= v.e - v.r1 and d.d2 == 2 * v.e - v.dprime


def is_locally_admissible(nf, L: Lattice, v) -> bool:
    """The relaxed membership: 0 <= b <= a <= e on the right level, with
    the coarse gap bound d1 <= max(d', 2e - d') kept alongside even
    though the box makes it redundant."""
    d = rel_position(L, phi_image(_as_phi(nf), L))
    return (d.d2 == 2 * v.e - v.dprime
            and 0 <= d.b and d.a <= v.e
            and d.d1 <= max(v.dprime, 2 * v.e - v.dprime))


# -- closed-form image distances ----------------------------------------------

def phi_distance_formulas(nf, Q: BuildingPoint):
    """(d1, d2) between a point and its image, from projections alone.

    d2 is always (p - 1) times the level offset from the fixed point P.
    The antidiagonal form scales distance to P by exactly p + 1.  The
    triangular forms pivot around their branch locus: with Q' the
    projection of Q to the union of constant-branch lines (isotypic
    split) or to the standard apartment (otherwise),

        d1 = (p + 1) d1(Q, P) - 2 d1(Q', P),

    except that a nonsplit offset gamma of valuation kappa pins every Q
    with min(x, v(q)) >= (kappa - s)/p to d1 = (p+1)x + s + t - 2 kappa.
    """
    p = nf.ctx.p
    P = fixed_point(nf)
    d2 = (p - 1) * (Q.y - P.y)
    if nf.case == "simple":
        return ((p + 1) * tree_d1(Q, P), d2)
    if nf.case == "nonsplit":
        edge = Fraction(nf.k - nf.s, p)
        if Q.x >= edge and Q.q.valuation() >= edge:
            return ((p + 1) * Q.x + nf.s + nf.t - 2 * nf.k, d2)
    proj = project_to_lines if nf.case == "split_iso" else project_to_apartment
    Qp = proj(Q)
    return ((p + 1) * tree_d1(Q, P) - 2 * tree_d1(Qp, P), d2)


def distance_routes(nf, L: Lattice):
    """The image position of a lattice by three independent routes.

    (a) multiply out the matrix image and reduce divisors, (b) map the
    point through the building and measure with the tree metric, (c)
    evaluate the closed-form projection identities.  Returns the three
    (d1, d2) pairs, which must agree.
    """
    d = rel_position(L, phi_image(_as_phi(nf), L))
    route_a = (Fraction(d.d1), Fraction(d.d2))
    Q = lattice_to_point(L)
    img = phi_point(nf, Q)
    route_b = (tree_d1(Q, img), Fraction(tree_d2(Q, img)))
    d1c, d2c = phi_distance_formulas(nf, Q)
    route_c = (Fraction(d1c), Fraction(d2c))
    return route_a, route_b, route_c


# -- enumeration ---------------------------------------------------------------

def _search_bound(nf, cap) -> Fraction:
    """Distance from the fixed point within which every lattice of image
    distance d1 <= cap must lie.

    Antidiagonal: d1 = (p+1) d1(Q, P).  Triangular: the pivot identity
    gives d1 >= (p-1) d1(Q, P).  A nonsplit offset of valuation kappa
    adds the zone d1 = (p+1)x + s + t - 2 kappa whose points can sit a
    further 1 + 2 max(0, s - kappa)/p from the fixed column.
    """
    p = nf.ctx.p
    cap = Fraction(cap)
    if nf.case == "simple":
        return cap / (p + 1)
    bound = cap / (p - 1)
    if nf.case == "nonsplit":
        zone = (Fraction(cap - nf.s - nf.t + 2 * nf.k, p + 1)
                + 1 + Fraction(2 * max(0, nf.s - nf.k), p))
        bound = max(bound, zone)
    return bound


def _center_vertex(nf, parity: int):
    """Integral column nearest the fixed point with the given parity."""
    P = fixed_point(nf)
    cx = math.floor(P.x)
    if (cx - parity) % 2:
        cx += 1
    return cx, abs(P.x - cx)


def enumerate_level(nf, y: int, cap, budget: int = DEFAULT_BUDGET):
    """All lattices at level y with image distance d1 <= cap, with their
    divisor pairs, via ball search around the fixed point.

    The search radius is the closed-form bound plus two; the two extra
    shells must come back empty, which is asserted, so the bound itself
    is re-verified on every call.
    """
    ctx = nf.ctx
    phi = _as_phi(nf)
    bound = _search_bound(nf, cap)
    if bound < 0:
        return []
    cx, off = _center_vertex(nf, y % 2)
    radius = math.floor(bound + off) + 2
    want_d2 = (ctx.p - 1) * y + nf.det_valuation()
    found = []
    max_dist = 0
    for vtx, dist in ball_vertices(ctx, cx, None, radius, budget):
        if (vtx[0] - y) % 2:
            continue
        L = materialize(ctx, vtx, y)
        d = rel_position(L, phi_image(phi, L))
        assert d.d2 == want_d2, "level rise must be forced by the level"
        if d.d1 <= cap:
            found.append((L, d))
            max_dist = max(max_dist, dist)
    assert max_dist <= radius - 2, \
        "lattice found in the outer shells: search bound violated"
    found.sort(key=lambda pair: pair[0].sort_key())
    return found


class AdmissibleSet:
    """The admissible locus at one type, with divisor bookkeeping."""

    def __init__(self, nf, v, level, pairs, reason=None):
        self.nf = nf
        self.v = v
        self.level = level        # int, or None when the congruence fails
        self.pairs = pairs        # [(Lattice, ElemDiv)], sorted
        self.reason = reason      # why empty, when known a priori
        self._div = {L: d for L, d in pairs}

    @property
    def lattices(self) -> List[Lattice]:
        return [L for L, _ in self.pairs]

    def divisors(self, L: Lattice):
        return self._div[L]

    def strata(self) -> Dict[Tuple[int, int], List[Lattice]]:
        out = {}
        for L, d in self.pairs:
            out.setdefault(d.as_tuple(), []).append(L)
        return out

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.lattices)

    def __contains__(self, L):
        return L in self._div

    def to_json(self) -> dict:
        obj = {
            "case": self.nf.case,
            "type": {"e": self.v.e, "r1": self.v.r1, "r2": self.v.r2},
            "level": self.level,
            "size": len(self.pairs),
            "lattices": [L.to_json() for L in self.lattices],
            "strata": {f"{a},{b}": [format_lattice(L) for L in Ls]
                       for (a, b), Ls in sorted(self.strata().items())},
        }
        if self.reason:
            obj["empty_reason"] = self.reason
        return obj


def enumerate_admissible(nf, v, budget: int = DEFAULT_BUDGET) -> AdmissibleSet:
    """Every admissible lattice of the module at type v.

    Empty with a recorded reason when the level congruence fails.  At
    the admissible level the floor b >= e - r1 is the cap d1 <= r1 - r2.
    """
    m_v = m_of_v(nf, v)
    if m_v.denominator != 1:
        return AdmissibleSet(
            nf, v, None, [],
            reason="level (2e - d' - v(det))/(p - 1) is not an integer")
    pairs = enumerate_level(nf, int(m_v), v.r1 - v.r2, budget)
    return AdmissibleSet(nf, v, int(m_v), pairs)


def enumerate_relaxed(nf, v, budget: int = DEFAULT_BUDGET) -> List[Lattice]:
    """Lattices passing only the relaxed membership test."""
    m_v = m_of_v(nf, v)
    if m_v.denominator != 1:
        return []
    cap = max(v.dprime, 2 * v.e - v.dprime)
    return [L for L, _ in enumerate_level(nf, int(m_v), cap, budget)
            if is_locally_admissible(nf, L, v)]


def compare_relaxed_locus(nf, v, budget: int = DEFAULT_BUDGET) -> dict:
    """Compare the strict locus with the relaxed one.

    The two coincide for every module exactly in the boundary types
    r1 = e or r2 = 0; the report carries both the predicted and the
    observed verdicts so sweeps can exercise each direction.
    """
    strict = set(enumerate_admissible(nf, v, budget))
    relaxed = set(enumerate_relaxed(nf, v, budget))
    assert strict <= relaxed, "strict locus must sit inside the relaxed one"
    return {
        "predicted_coincide": v.r1 == v.e or v.r2 == 0,
        "observed_coincide": strict == relaxed,
        "n_strict": len(strict),
        "n_relaxed": len(relaxed),
    }


# -- stratum tables (antidiagonal case) ----------------------------------------

def stratum_candidates(v) -> List[Tuple[int, int]]:
    """Divisor pairs allowed by the admissibility window at type v."""
    out = []
    b = v.e - v.r1
    while 2 * b <= 2 * v.e - v.dprime:
        out.append((2 * v.e - v.dprime - b, b))
        b += 1
    return out


def stratify(nf, v) -> List[dict]:
    """Closed-form stratum table for the antidiagonal case.

    A stratum (a, b) inside the admissibility window is nonempty iff
    a + b = s mod p-1 and pa + b matches s or ps mod p^2-1; a nonempty
    stratum is an affine cell of dimension floor((a-b)/(p+1)), with
    q^dim rational points.
    """
    if nf.case != "simple":
        raise ValueError("closed-form strata need the antidiagonal case")
    ctx = nf.ctx
    p = ctx.p
    rows = []
    for a, b in stratum_candidates(v):
        nonempty = ((a + b - nf.s) % (p - 1) == 0
                    and ((p * a + b - nf.s) % (p * p - 1) == 0
                         or (p * a + b - p * nf.s) % (p * p - 1) == 0))
        n = (a - b) // (p + 1)
        rows.append({"a": a, "b": b, "nonempty": nonempty,
                     "dim": n if nonempty else None,
                     "count": ctx.q ** n if nonempty else 0})
    return rows


# -- whole-locus predictions -----------------------------------------------------

def predict_empty(nf, v) -> Optional[bool]:
    """Closed-form emptiness of the admissible locus.

    None means the tables make no claim for this shape (nonsplit modules
    beyond the level congruence).
    """
    p = nf.ctx.p
    m_v = m_of_v(nf, v)
    if m_v.denominator != 1:
        return True
    m = int(m_v)
    if nf.case == "simple":
        rho = Fraction(v.r1 - v.r2, p + 1)
        sigma = Fraction(nf.s, p + 1)
        xi = sigma - math.floor(sigma)
        if (math.floor(sigma) - m) % 2 == 0:
            return rho < xi
        return rho < 1 - xi
    rho = Fraction(v.r1 - v.r2, p - 1)
    if nf.case == "split_iso" or (nf.case == "split_noniso"
                                  and nf.s == nf.t):
        return rho < 1 if m % 2 else False
    if nf.case == "split_noniso":
        tau = Fraction(nf.t - nf.s, p - 1)
        xi = tau - math.floor(tau)
        if (math.floor(tau) - m) % 2 == 0:
            return rho < xi
        return rho < 1 - xi
    # nonsplit: the relaxed locus forces delta- <= (k - s)/p, so the
    # other way round everything is empty; beyond that, no claim
    if Fraction(nf.t - nf.s, p - 1) - rho > Fraction(nf.k - nf.s, p):
        return True
    return None


def predict_singleton(nf, v) -> Optional[bool]:
    """Closed-form 'exactly one admissible lattice', None when no claim."""
    p = nf.ctx.p
    m_v = m_of_v(nf, v)
    if m_v.denominator != 1:
        return False
    m = int(m_v)
    if nf.case == "simple":
        rho = Fraction(v.r1 - v.r2, p + 1)
        sigma = Fraction(nf.s, p + 1)
        xi = sigma - math.floor(sigma)
        if (math.floor(sigma) - m) % 2 == 0:
            return xi <= rho < 2 - xi
        return 1 - xi <= rho < 1 + xi
    rho = Fraction(v.r1 - v.r2, p - 1)
    if nf.case == "split_iso" or (nf.case == "split_noniso"
                                  and nf.s == nf.t):
        return rho < 2 if m % 2 == 0 else False
    if nf.case == "split_noniso":
        tau = Fraction(nf.t - nf.s, p - 1)
        xi = tau - math.floor(tau)
        if (math.floor(tau) - m) % 2 == 0:
            return xi <= rho < 2 - xi
        return 1 - xi <= rho < 1 + xi
    return None


def predict_dimension(nf, v) -> Optional[int]:
    """Closed-form dimension of the antidiagonal-case locus.

    None when the locus is empty.  The dimension takes one of two forms
    by the parity of floor(rho) + floor(s/(p+1)) - m.
    """
    if nf.case != "simple":
        raise ValueError("closed-form dimension needs the antidiagonal case")
    p = nf.ctx.p
    if predict_empty(nf, v):
        return None
    m = int(m_of_v(nf, v))
    rho = Fraction(v.r1 - v.r2, p + 1)
    sigma = Fraction(nf.s, p + 1)
    if (math.floor(rho) + math.floor(sigma) - m) % 2 == 0:
        return math.floor(rho - sigma) + math.floor(sigma)
    return math.floor(rho + sigma) + math.floor(-sigma)


# -- ordinary components ---------------------------------------------------------

def _label_map(nf) -> Dict[int, str]:
    """Stable-line constants -> component labels.

    Classes of rank-1 modules are determined by the constant alone, so
    the two labels collapse onto one when a = b.
    """
    labels = {nf.a: "X_Ma"}
    if nf.case in ("split_noniso", "nonsplit"):
        labels.setdefault(nf.b, "X_Mb")
    return labels


def _vertex_lattice(ctx: FieldCtx, x: int, y: int) -> Lattice:
    """The level-y lattice on the standard apartment at column x."""
    return materialize(ctx, (x, ()), y)


def _branch_lattice(ctx: FieldCtx, x: int, y: int, z: int) -> Lattice:
    """The level-y lattice at column x > 0 on the constant branch z."""
    if z and x < 1:
        raise ValueError("constant branches need a positive column")
    return materialize(ctx, (x, ((0, z),)) if z else (x, ()), y)


def s_rank_with_labels(nf, v, L: Lattice):
    """Number of independent ordinary directions of a lattice, with the
    class labels they realize.

    With j = e - r1, a line O w inside L with image c u^j w reduces mod
    u to an eigenvector of C, the u^j-coefficient of the matrix of the
    module in a basis of L (every entry has valuation >= j when L is
    admissible, j being the smaller divisor's floor).  Conversely an
    eigendirection with eigenvalue c != 0 lifts to an exact line:
    w -> c^{-1} u^{-j} B phi(w) contracts u-adically, so iterating from
    the eigenvector converges to a fixed point.  The rank adds up the
    nonzero eigenspaces; any unit eigenvalue outside the diagonal
    constants would contradict the classification and raises.
    """
    ctx = nf.ctx
    j = v.e - v.r1
    B = _as_phi(nf).relative_matrix(L)
    C = [[0, 0], [0, 0]]
    for rr in range(2):
        for cc in range(2):
            entry = B[rr][cc]
            if entry.vbound() < j:
                raise ValueError(
                    "matrix entry below valuation e - r1: the lattice "
                    "is not admissible at this type")
            C[rr][cc] = entry.coeff(j)

    def eigdim(c):
        m00 = ctx.sub(C[0][0], c)
        m11 = ctx.sub(C[1][1], c)
        if ctx.sub(ctx.mul(m00, m11), ctx.mul(C[0][1], C[1][0])) != 0:
            return 0
        if m00 == 0 and m11 == 0 and C[0][1] == 0 and C[1][0] == 0:
            return 2
        return 1

    labels = _label_map(nf)
    rank = 0
    found = []
    for c in sorted(labels):
        d = eigdim(c)
        if d:
            rank += d
            found.append(labels[c])
    for c in ctx.units():
        if c not in labels and eigdim(c):
            raise AssertionError(
                "stable-line constant outside the diagonal classes")
    return rank, found


def component_report(nf, v, budget: int = DEFAULT_BUDGET) -> dict:
    """Observed partition of the admissible locus by ordinary class.

    Returns the admissible set plus, per label, the sorted lattices
    carrying a line of that class, and the zero stratum (lattices with
    no line at the ordinary shift).
    """
    if nf.case == "simple":
        raise ValueError("ordinary components need a reducible shape")
    adm = enumerate_admissible(nf, v, budget)
    by_label = {label: [] for label in set(_label_map(nf).values())}
    zero = []
    ranks = {}
    for L in adm:
        rank, found = s_rank_with_labels(nf, v, L)
        ranks[L] = rank
        if not found:
            zero.append(L)
        for label in found:
            by_label[label].append(L)
    for lats in by_label.values():
        lats.sort(key=Lattice.sort_key)
    zero.sort(key=Lattice.sort_key)
    return {"admissible": adm, "labels": by_label,
            "zero_stratum": zero, "s_rank": ranks}


def predict_components(nf, v) -> Dict[str, dict]:
    """Closed-form ordinary components, per class label.

    Each label maps to {"shape": "empty" | "point" | "line", "points"}.

    * isotypic split: the single class is nonempty iff rho = (r1-r2)/(p-1)
      is an integer with the parity of the level m; the component is the
      vertex [0, m] when rho = 0 and otherwise the line through the
      vertices [rho, m]_z (z in F) and [-rho, m].
    * two summands: the first class can only sit at the single vertex
      [delta, m] with delta = (t - s - (r1 - r2))/(p - 1), alive iff
      delta is an integer with the parity of m; for split modules the
      second class sits symmetrically at (t - s + (r1 - r2))/(p - 1); a
      nonsplit module admits no line of the second class at all.
    """
    if nf.case == "simple":
        raise ValueError("ordinary components need a reducible shape")
    ctx = nf.ctx
    p = ctx.p
    label_of = _label_map(nf)
    out = {label: {"shape": "empty", "points": []}
           for label in set(label_of.values())}
    m_v = m_of_v(nf, v)
    if m_v.denominator != 1:
        return out
    m = int(m_v)

    if nf.case == "split_iso":
        rho = Fraction(v.r1 - v.r2, p - 1)
        if rho.denominator != 1 or (int(rho) - m) % 2:
            return out
        rho = int(rho)
        if rho == 0:
            out["X_Ma"] = {"shape": "point",
                           "points": [_vertex_lattice(ctx, 0, m)]}
        else:
            pts = [_branch_lattice(ctx, rho, m, z) for z in range(ctx.q)]
            pts.append(_vertex_lattice(ctx, -rho, m))
            pts.sort(key=Lattice.sort_key)
            out["X_Ma"] = {"shape": "line", "points": pts}
        return out

    cands = [("X_Ma", Fraction(nf.t - nf.s - (v.r1 - v.r2), p - 1))]
    if nf.case == "split_noniso":
        cands.append((label_of[nf.b],
                      Fraction(nf.t - nf.s + (v.r1 - v.r2), p - 1)))
    for label, delta in cands:
        if delta.denominator != 1 or (int(delta) - m) % 2:
            continue
        if nf.case == "nonsplit" and delta > Fraction(nf.k - nf.s, p):
            # past the pinned zone's edge the whole locus is empty; on
            # the edge itself (only reachable with s = t, v(gamma) = s)
            # the candidate is an honest ordinary lattice, so only the
            # strict overshoot dies
            continue
        L = _vertex_lattice(ctx, int(delta), m)
        entry = out[label]
        if L not in entry["points"]:
            entry["points"].append(L)
            entry["points"].sort(key=Lattice.sort_key)
            entry["shape"] = "point" if len(entry["points"]) == 1 else "points"
    return out


# -- the zero stratum -------------------------------------------------------------

def _max_parity_le(bound, parity: int) -> int:
    n = math.floor(bound)
    return n - 1 if (n - parity) % 2 else n


def _min_parity_ge(bound, parity: int) -> int:
    n = math.ceil(bound)
    return n + 1 if (n - parity) % 2 else n


def _component_points(ctx: FieldCtx, comp: dict, level: int,
                      budget: int = DEFAULT_BUDGET) -> set:
    """Rational lattices of one decomposition component (union of balls)."""
    pts = set()
    for x, digits in comp["centers"]:
        q0 = from_terms(ctx, dict(digits), None) if digits else None
        for vtx, _ in ball_vertices(ctx, x, q0, comp["radius"], budget):
            if (vtx[0] - level) % 2 == 0:
                pts.add(materialize(ctx, vtx, level))
    return pts


def _resolve_center_containment(ctx: FieldCtx, comps: List[dict],
                                level: int) -> None:
    """Drop the center ball when the side balls already swallow it."""
    center = next((c for c in comps if c["name"] == "Z"), None)
    if center is None:
        return
    others = set()
    for c in comps:
        if c is not center:
            others |= _component_points(ctx, c, level)
    center["kept"] = not _component_points(ctx, center, level) <= others


def predict_x0_decomposition(nf, v) -> dict:
    """Closed-form ball decomposition of the zero stratum.

    Returns {"level", "components", "dim"}; each component is a union of
    tree balls {"name", "centers", "radius", "dim", "kept"}.  Components
    with kept=False are genuine pieces that lie inside the others (the
    center ball at the extremal offset, which is also when the total
    dimension bumps by one).  The stratum's rational points are the
    union of all the balls minus the ordinary points of the component
    tables, closed balls touching the ordinary locus at their boundary.

    The shapes: around the fixed column sits a center ball Z whose
    radius n is the largest value of the level's parity the inequalities
    allow; side balls Z_j march away with period p + 1 in the column and
    radii shrinking by p - 1 per step.  For the isotypic split shape the
    side balls on the positive side carry a whole branch family (one
    ball per branch constant plus the opposite column), which is what
    raises their dimension by one; the other shapes have plain balls on
    each side, and a nonsplit offset kills the positive side entirely.
    """
    if nf.case == "simple":
        raise ValueError("the zero-stratum tables need a reducible shape")
    ctx = nf.ctx
    p = ctx.p
    m_v = m_of_v(nf, v)
    if m_v.denominator != 1:
        return {"level": None, "components": [], "dim": None}
    m = int(m_v)
    rho = v.r1 - v.r2
    comps: List[dict] = []

    if nf.case == "split_iso" or (nf.case == "split_noniso"
                                  and nf.s == nf.t):
        iso = nf.case == "split_iso"
        slack = 2 if iso else 0
        n = _max_parity_le(Fraction(rho + slack, p + 1), m)
        if n >= 0:
            l = ((p + 1) * (n + 2) - rho + 1) // 2
            low = 2 if iso else 1
            assert low <= l <= p + low, "offset outside its window"
            comps.append({"name": "Z", "centers": [(0, ())], "radius": n,
                          "dim": n, "kept": l != low})
            j = 0
            while True:
                r_j = n + 2 - l - (p - 1) * j
                if r_j < 0:
                    break
                x = l + (p + 1) * j
                if iso:
                    centers = [(x, ((0, z),)) for z in range(1, ctx.q)]
                    centers += [(x, ()), (-x, ())]
                    comps.append({"name": f"Z{j}", "centers": centers,
                                  "radius": r_j, "dim": r_j + 1,
                                  "kept": True})
                else:
                    comps.append({"name": f"Z+{j}", "centers": [(x, ())],
                                  "radius": r_j, "dim": r_j, "kept": True})
                    comps.append({"name": f"Z-{j}", "centers": [(-x, ())],
                                  "radius": r_j, "dim": r_j, "kept": True})
                j += 1
    else:
        tau = Fraction(nf.t - nf.s, p - 1)
        if nf.case == "split_noniso":
            x0 = math.floor(tau)
            np_ = _max_parity_le(
                tau + (Fraction(rho) + 2 * (x0 + 1 - tau)) / (p + 1), m)
        else:
            x0 = -((nf.s - nf.k) // p) - 1   # largest integer < (k - s)/p
            np_ = _max_parity_le(Fraction(rho - nf.s - nf.t + 2 * nf.k,
                                          p + 1), m)
        nm_ = _min_parity_ge(
            tau - (Fraction(rho) + 2 * (tau - x0)) / (p + 1), m)
        if np_ >= nm_:
            x1 = (np_ + nm_) // 2
            if nf.case == "nonsplit":
                assert x1 in (x0, x0 + 1), "center off the pinned columns"
            comps.append({"name": "Z", "centers": [(x1, ())],
                          "radius": (np_ - nm_) // 2,
                          "dim": (np_ - nm_) // 2, "kept": True})
        if nf.case == "split_noniso":
            lp = ((p + 1) * (np_ + 2) - rho - (nf.t - nf.s) + 1) // 2
            j = 0
            while True:
                r_j = np_ + 2 - lp - (p - 1) * j
                if r_j < 0:
                    break
                comps.append({"name": f"Z+{j}",
                              "centers": [(lp + (p + 1) * j, ())],
                              "radius": r_j, "dim": r_j, "kept": True})
                j += 1
        lm = (rho - (nf.t - nf.s) + (p + 1) * (nm_ - 2)) // 2
        j = 0
        while True:
            r_j = lm + 2 - nm_ - (p - 1) * j
            if r_j < 0:
                break
            comps.append({"name": f"Z-{j}",
                          "centers": [(lm - (p + 1) * j, ())],
                          "radius": r_j, "dim": r_j, "kept": True})
            j += 1
        _resolve_center_containment(ctx, comps, m)

    dim = max((c["dim"] for c in comps if c["kept"]), default=None)
    return {"level": m, "components": comps, "dim": dim}


def x0_point_set(nf, v, decomposition: Optional[dict] = None,
                 budget: int = DEFAULT_BUDGET) -> set:
    """Rational points of the predicted zero stratum: the union of the
    decomposition balls minus the ordinary points of the tables."""
    if decomposition is None:
        decomposition = predict_x0_decomposition(nf, v)
    if decomposition["level"] is None:
        return set()
    ctx = nf.ctx
    level = decomposition["level"]
    pts = set()
    for comp in decomposition["components"]:
        pts |= _component_points(ctx, comp, level, budget)
    for entry in predict_components(nf, v).values():
        pts -= set(entry["points"])
    return pts


def observed_x0(nf, v, budget: int = DEFAULT_BUDGET) -> set:
    """The zero stratum by direct test: admissible lattices carrying no
    ordinary direction."""
    return set(component_report(nf, v, budget)["zero_stratum"])


def x0_irredundancy(nf, v, decomposition: Optional[dict] = None,
                    budget: int = DEFAULT_BUDGET) -> dict:
    """Certify the shape of the decomposition at rational granularity.

    Kept components must be pairwise irredundant as raw ball point sets.
    Dropped components should lie inside the kept union; a center ball
    dropped by the closed-form offset rule can escape that rational
    check (its containment in a branch tube holds only through the
    tube's degenerations), so those escapees are listed by name rather
    than failed: the caller asserts the list contains nothing else.
    """
    if decomposition is None:
        decomposition = predict_x0_decomposition(nf, v)
    if decomposition["level"] is None:
        return {"kept_irredundant": True, "uncovered_dropped": []}
    ctx = nf.ctx
    level = decomposition["level"]
    pts = [(comp, _component_points(ctx, comp, level, budget))
           for comp in decomposition["components"]]
    kept = [(c, s) for c, s in pts if c["kept"]]
    dropped = [(c, s) for c, s in pts if not c["kept"]]
    kept_ok = all(
        not s <= set().union(*(t for j, (_, t) in enumerate(kept)
                               if j != i))
        for i, (_, s) in enumerate(kept)) if len(kept) > 1 else True
    kept_union = set().union(*(s for _, s in kept)) if kept else set()
    uncovered = [c["name"] for c, s in dropped if not s <= kept_union]
    return {"kept_irredundant": kept_ok, "uncovered_dropped": uncovered}


# -- line families and connectivity ------------------------------------------------

def p1_family(b1, b2, mode: str = "inner", n: int = 1) -> List[Lattice]:
    """Rational points of a line of lattices built on a frame (b1, b2).

    b1, b2 are ambient column vectors (pairs of exact series).  Modes:

      inner:  <b1, z u^-1 b1 + b2> for z in F, plus <u^-1 b1, u b2>
      outer1: <u^(n-1) b1, u^-(n-1)(z u^-1 b1 + b2)>, plus <u^-n b1, u^n b2>
      outer2: <u^n b1, u^-n (z b1 + b2)>,             plus <u^-n b1, u^n b2>

    inner is the sphere of directions around the frame's vertex; the
    outer modes sweep the spheres of radius 2n - 1 and 2n.
    """
    ctx = b1[0].ctx

    def shift(col, d):
        return (col[0].shift(d), col[1].shift(d))

    def comb(z, j, ca, cb):
        return (ca[0].shift(j).scale(z).add(cb[0]),
                ca[1].shift(j).scale(z).add(cb[1]))

    out = []
    if mode == "inner":
        for z in range(ctx.q):
            out.append(lattice_from_columns(ctx, b1, comb(z, -1, b1, b2)))
        out.append(lattice_from_columns(ctx, shift(b1, -1), shift(b2, 1)))
    elif mode == "outer1":
        for z in range(ctx.q):
            out.append(lattice_from_columns(
                ctx, shift(b1, n - 1), shift(comb(z, -1, b1, b2), 1 - n)))
        out.append(lattice_from_columns(ctx, shift(b1, -n), shift(b2, n)))
    elif mode == "outer2":
        for z in range(ctx.q):
            out.append(lattice_from_columns(
                ctx, shift(b1, n), shift(comb(z, 0, b1, b2), -n)))
        out.append(lattice_from_columns(ctx, shift(b1, -n), shift(b2, n)))
    else:
        raise ValueError(f"unknown family mode {mode!r}")
    return out


def ray_family(ctx: FieldCtx, vertex, d: int):
    """The q+1 straight-ray endpoints at distance d from a vertex.

    One endpoint goes d columns down; the others branch once immediately
    (all q choices, counting the straight continuation) and then run
    straight up.  These are exactly the rational points of a line of
    lattices, so a family wholly inside a point set certifies a
    connected curve inside that set.
    """
    x, digits = vertex
    fam = [(x - d, tuple((e, c) for e, c in digits if e < x - d))]
    for c in range(ctx.q):
        fam.append((x + d, digits if c == 0 else digits + ((x, c),)))
    return fam


def connectivity_certificate(ctx: FieldCtx,
                             lattices) -> List[List[Lattice]]:
    """Partition same-level lattices into classes joined by whole line
    families inside the set.

    For every downward truncation of a member and every distance, if all
    q+1 ray endpoints lie in the set they merge.  A single class proves
    the set is connected through rational line families; several classes
    only mean this certificate failed.
    """
    lattices = list(lattices)
    if not lattices:
        return []
    level = lattices[0].y
    verts = {}
    for L in lattices:
        if L.y != level:
            raise ValueError("connectivity needs lattices of one level")
        digits = tuple((e - L.n, c) for e, c in L.r.terms())
        verts[(L.x, digits)] = L

    pts = [lattice_to_point(L) for L in lattices]
    max_d = 2 * max(int(tree_d1(pts[0], P)) for P in pts) + 1

    parent = {vx: vx for vx in verts}

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    for vx in list(verts):
        x, digits = vx
        for d in range(1, max_d + 1):
            base = (x - d, tuple((e, c) for e, c in digits if e < x - d))
            fam = ray_family(ctx, base, d)
            if all(f in verts for f in fam):
                anchor = find(fam[0])
                for f in fam[1:]:
                    parent[find(f)] = anchor
    groups: Dict[tuple, List[Lattice]] = {}
    for vx, L in verts.items():
        groups.setdefault(find(vx), []).append(L)
    out = [sorted(g, key=Lattice.sort_key) for g in groups.values()]
    out.sort(key=lambda g: g[0].sort_key())
    return out
