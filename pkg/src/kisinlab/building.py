"""Points of the extended Bruhat-Tits tree in branch coordinates.

A point is [x, y]_q: x, y rationals (equal-parity integers exactly when the
point is a lattice class with its determinant height), q an exact Laurent
polynomial locating the branch.  Two labels [x, y]_q and [x, y]_q' agree
iff x <= v_u(q - q'), so the canonical representative keeps only exponents
strictly below x.

The correspondence with lattices: (m, n)_r maps to x = m - n, y = m + n,
q = r u^-n, i.e. the lattice <u^m e1, u^n (q e1 + e2)>.

Distances: d1 is the tree metric computed from the divergence valuation
w = v_u(q - q'); d2 is the signed height difference y' - y (second
argument minus first).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

from .field import FieldCtx
from .latmod import Lattice
from .series import (InsufficientPrecision, TruncatedSeries, format_series,
                     from_terms, monomial, zero)

Rat = Union[int, Fraction]

INF = math.inf


class NotALattice(Exception):
    """The building point is not a lattice class (x, y not equal-parity ints)."""


class BuildingPoint:
    """Point [x, y]_q with canonical q (exponents < x only)."""

    __slots__ = ("ctx", "x", "y", "q")

    def __init__(self, ctx: FieldCtx, x: Rat, y: Rat, q: TruncatedSeries):
        x = Fraction(x)
        y = Fraction(y)
        if q.prec is not None and q.prec < x:
            raise InsufficientPrecision(
                f"branch locator known only to O(u^{q.prec}), need < {x}")
        self.ctx = ctx
        self.x = x
        self.y = y
        self.q = from_terms(ctx, {e: c for e, c in q.terms() if e < x}, None)

    def is_lattice(self) -> bool:
        return (self.x.denominator == 1 and self.y.denominator == 1
                and (self.x - self.y) % 2 == 0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BuildingPoint):
            return NotImplemented
        return (self.ctx == other.ctx and self.x == other.x
                and self.y == other.y and self.q == other.q)

    def __hash__(self) -> int:
        return hash((self.ctx.p, self.ctx.k, self.x, self.y, self.q))

    def __repr__(self) -> str:
        return f"[{self.x},{self.y}]_({format_series(self.q)})"


def apartment_point(ctx: FieldCtx, x: Rat, y: Rat) -> BuildingPoint:
    """[x, y]_0, a point of the standard apartment."""
    return BuildingPoint(ctx, x, y, zero(ctx))


def lattice_to_point(L: Lattice) -> BuildingPoint:
    return BuildingPoint(L.ctx, L.m - L.n, L.m + L.n, L.r.shift(-L.n))


def point_to_lattice(P: BuildingPoint) -> Lattice:
    if not P.is_lattice():
        raise NotALattice(
            f"[{P.x},{P.y}] is not an equal-parity integer pair")
    x, y = int(P.x), int(P.y)
    m = (x + y) // 2
    n = (y - x) // 2
    return Lattice(P.ctx, m, n, P.q.shift(n))


# ---------------------------------------------------------------------------
# distances
# ---------------------------------------------------------------------------

def _divergence(P1: BuildingPoint, P2: BuildingPoint) -> Union[Fraction, float]:
    """v_u(q1 - q2), +inf when the canonical locators agree.

    When the difference is zero only to a finite window, the valuation is
    certified as long as the window covers both x coordinates (the formula
    then does not depend on the exact value); otherwise we raise.
    """
    d = P1.q.sub(P2.q)
    if d.coeffs:
        return Fraction(d.ord)
    if d.prec is None:
        return INF
    if d.prec >= P1.x and d.prec >= P2.x:
        return INF  # any w >= prec acts like +inf for min(x, w)
    raise InsufficientPrecision(
        f"branch divergence hidden beyond O(u^{d.prec})")


def tree_d1(P1: BuildingPoint, P2: BuildingPoint) -> Fraction:
    """Tree distance (ignores y)."""
    w = _divergence(P1, P2)
    m1 = P1.x if w == INF else min(P1.x, w)
    m2 = P2.x if w == INF else min(P2.x, w)
    return (P1.x - m1) + (P2.x - m2) + abs(m1 - m2)


def tree_d2(P1: BuildingPoint, P2: BuildingPoint) -> Fraction:
    """Signed height difference y(P2) - y(P1)."""
    return P2.y - P1.y


# ---------------------------------------------------------------------------
# Phi action on points
# ---------------------------------------------------------------------------

def phi_point(nf, P: BuildingPoint) -> BuildingPoint:
    """Image of a building point under Phi for a normal form ``nf``.

    ``nf`` is duck-typed: ``case`` is ``"simple"`` or one of the triangular
    cases (``split_iso``/``split_noniso``/``nonsplit``) with the matching
    attributes (packed coefficients a, b; twists s, t; offset gamma).
    """
    ctx = P.ctx
    p = ctx.p
    if nf.case == "simple":
        s = nf.s
        if P.q.is_zero():
            return BuildingPoint(ctx, -p * P.x + s, p * P.y + s, zero(ctx))
        kq = P.q.valuation()
        assert isinstance(kq, int)
        x2 = p * P.x - 2 * p * kq + s
        y2 = p * P.y + s
        target = math.floor(x2) + 1
        qinv = P.q.phi().inv(prec=target - s)
        q2 = qinv.scale(nf.a).shift(s)
        return BuildingPoint(ctx, x2, y2, q2)
    # triangular: [[a u^s, gamma], [0, b u^t]]
    s, t = nf.s, nf.t
    x2 = p * P.x + s - t
    y2 = p * P.y + s + t
    q2 = P.q.phi().scale(nf.a).shift(s)
    gamma = getattr(nf, "gamma", None)
    if gamma is not None and not gamma.is_zero():
        q2 = q2.add(gamma)
    q2 = q2.scale(ctx.inv(nf.b)).shift(-t)
    return BuildingPoint(ctx, x2, y2, q2)


# ---------------------------------------------------------------------------
# projections used by the split-case distance identities
# ---------------------------------------------------------------------------

def project_to_apartment(P: BuildingPoint) -> BuildingPoint:
    """Nearest point of the standard apartment at the same height."""
    if P.q.is_zero():
        return P
    vq = P.q.valuation()
    return apartment_point(P.ctx, min(P.x, Fraction(vq)), P.y)


def project_to_lines(P: BuildingPoint) -> BuildingPoint:
    """Nearest point of the union of lines L_z (z in P^1) at the same height.

    L_z is the path [x, y]_z for x >= 0 together with its x <= 0 tail in
    the apartment; the nearest point is [min(x, w), y]_c where c is the
    constant digit of q and w = v_u(q - c).
    """
    ctx = P.ctx
    c = 0
    if P.x > 0:
        # exponent 0 is stored iff 0 < x
        c = P.q.coeff(0)
    d = P.q.sub(monomial(ctx, c, 0)) if c else P.q
    if d.is_zero():
        return BuildingPoint(ctx, P.x, P.y, monomial(ctx, c, 0))
    w = Fraction(d.valuation())
    return BuildingPoint(ctx, min(P.x, w), P.y, monomial(ctx, c, 0))


# ---------------------------------------------------------------------------
# DOT rendering of finite vertex sets (graph structure of a ball)
# ---------------------------------------------------------------------------

def _vertex_id(x: int, q: TruncatedSeries) -> str:
    digits = "_".join(f"{e}c{c}" for e, c in q.terms())
    sign = "m" if x < 0 else ""
    return f"v{sign}{abs(x)}" + (f"_{digits}" if digits else "")


def render_dot(points: Sequence[BuildingPoint],
               highlight: Optional[Set[BuildingPoint]] = None,
               lattice_y: Optional[int] = None,
               labels: Optional[Dict[BuildingPoint, str]] = None,
               title: str = "ball") -> str:
    """Graphviz DOT for a finite set of integer-x tree vertices.

    Vertices whose x-parity matches ``lattice_y`` render as circles
    (lattice classes at that height), the intermediate ones as small
    diamonds.  Edges join vertices at tree distance 1 within the set.
    """
    highlight = highlight or set()
    labels = labels or {}
    nodes = {}
    for P in points:
        if P.x.denominator != 1:
            continue
        nodes[(int(P.x), P.q)] = P
    lines = [f'graph "{title}" {{', "  node [fontsize=10];"]
    for (x, q), P in sorted(nodes.items(),
                            key=lambda kv: (kv[0][0], tuple(kv[0][1].terms()))):
        vid = _vertex_id(x, q)
        is_lat = lattice_y is None or (x - lattice_y) % 2 == 0
        shape = "circle" if is_lat else "diamond"
        size = "" if is_lat else " width=0.12 height=0.12 fixedsize=true"
        fill = ' style=filled fillcolor="gold"' if P in highlight else ""
        label = labels.get(P, f"[{x}]_{format_series(P.q)}")
        lines.append(f'  {vid} [shape={shape} label="{label}"{size}{fill}];')
    # edges: parent = drop the digit at x-1 and step down
    for (x, q), P in sorted(nodes.items(),
                            key=lambda kv: (kv[0][0], tuple(kv[0][1].terms()))):
        parent_q = from_terms(P.ctx, {e: c for e, c in q.terms() if e < x - 1},
                              None)
        key = (x - 1, parent_q)
        if key in nodes:
            lines.append(f"  {_vertex_id(x - 1, parent_q)} -- {_vertex_id(x, q)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
