"""Lattices in a rank-2 module over F_{p^k}((u)) and their relative position.

A lattice is stored by its canonical Hermite basis matrix::

    [ u^m   r  ]          columns (u^m, 0) and (r, u^n),
    [ 0    u^n ]          r an exact Laurent polynomial reduced mod u^m

(r may have negative exponents).  The pair of column spans determines the
lattice and the triple (m, n, r) is unique, so equality and hashing are
structural.

Relative position: for lattices L1, L2 the matrix C = L1^-1 L2 has
elementary divisors (u^a, u^b) with a >= b; in the 2x2 case
b = min entry valuation of C and a = v(det C) - b.  The pair is exposed as
:class:`ElemDiv` with the signed distances d1 = a - b and d2 = a + b
(d2 = y(L2) - y(L1), orientation second-minus-first).
"""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

from .field import FieldCtx
from .series import (InsufficientPrecision, TruncatedSeries, format_series,
                     from_terms, monomial, parse_series, zero)

Matrix = Tuple[Tuple[TruncatedSeries, TruncatedSeries],
               Tuple[TruncatedSeries, TruncatedSeries]]


class ElemDiv:
    """Elementary divisor exponents (a, b), a >= b, of one lattice in another."""

    __slots__ = ("a", "b")

    def __init__(self, a: int, b: int):
        if a < b:
            raise ValueError(f"elementary divisors out of order: ({a}, {b})")
        self.a = a
        self.b = b

    @property
    def d1(self) -> int:
        return self.a - self.b

    @property
    def d2(self) -> int:
        return self.a + self.b

    def leq(self, other: "ElemDiv") -> bool:
        """Dominance order: (a1,b1) <= (a2,b2) iff a1 <= a2 with equal sums."""
        return self.d2 == other.d2 and self.a <= other.a

    def as_tuple(self) -> Tuple[int, int]:
        return (self.a, self.b)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, ElemDiv):
            return self.a == other.a and self.b == other.b
        if isinstance(other, tuple):
            return (self.a, self.b) == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.a, self.b))

    def __repr__(self) -> str:
        return f"ElemDiv(a={self.a}, b={self.b})"


class Lattice:
    """Lattice with canonical basis [[u^m, r], [0, u^n]]."""

    __slots__ = ("ctx", "m", "n", "r")

    def __init__(self, ctx: FieldCtx, m: int, n: int,
                 r: Optional[TruncatedSeries] = None):
        if r is None:
            r = zero(ctx)
        if r.prec is not None:
            raise ValueError("lattice offset r must be an exact polynomial")
        self.ctx = ctx
        self.m = m
        self.n = n
        self.r = r.reduce_mod(m)

    # -- coordinates ---------------------------------------------------------

    @property
    def x(self) -> int:
        return self.m - self.n

    @property
    def y(self) -> int:
        return self.m + self.n

    def basis_matrix(self) -> Matrix:
        ctx = self.ctx
        return ((monomial(ctx, 1, self.m), self.r),
                (zero(ctx), monomial(ctx, 1, self.n)))

    def inverse_matrix(self) -> Matrix:
        """Exact inverse of the canonical basis matrix."""
        ctx = self.ctx
        return ((monomial(ctx, 1, -self.m),
                 self.r.neg().shift(-self.m - self.n)),
                (zero(ctx), monomial(ctx, 1, -self.n)))

    def contains(self, other: "Lattice") -> bool:
        return rel_position(self, other).b >= 0

    def sort_key(self):
        """Deterministic order: x ascending, then branch digits lex."""
        qterms = tuple((e - self.n, c) for e, c in self.r.terms())
        return (self.x, qterms, self.y)

    # -- identity ------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Lattice):
            return NotImplemented
        return (self.ctx == other.ctx and self.m == other.m
                and self.n == other.n and self.r == other.r)

    def __hash__(self) -> int:
        return hash((self.ctx.p, self.ctx.k, self.m, self.n, self.r))

    def __repr__(self) -> str:
        return format_lattice(self)

    # -- serialization ---------------------------------------------------------

    def to_json(self) -> dict:
        return {"m": self.m, "n": self.n, "r": format_series(self.r)}

    @classmethod
    def from_json(cls, ctx: FieldCtx, obj: dict) -> "Lattice":
        return cls(ctx, int(obj["m"]), int(obj["n"]),
                   parse_series(ctx, obj["r"]))


def standard_lattice(ctx: FieldCtx) -> Lattice:
    return Lattice(ctx, 0, 0)


def format_lattice(L: Lattice) -> str:
    return f"lat({L.m},{L.n},{format_series(L.r)})"


def parse_lattice(ctx: FieldCtx, text: str) -> Lattice:
    s = text.strip()
    if not (s.startswith("lat(") and s.endswith(")")):
        raise ValueError(f"bad lattice literal: {text!r}")
    body = s[4:-1]
    parts: List[str] = []
    depth = 0
    cur: List[str] = []
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    if len(parts) != 3:
        raise ValueError(f"bad lattice literal: {text!r}")
    return Lattice(ctx, int(parts[0].strip()), int(parts[1].strip()),
                   parse_series(ctx, parts[2]))


# ---------------------------------------------------------------------------
# certified valuation bookkeeping
# ---------------------------------------------------------------------------

def _certified_min_valuation(entries: Sequence[TruncatedSeries]):
    """(min valuation, index attaining it) over nonzero entries, certified.

    Exact zeros are skipped.  Raises InsufficientPrecision when a
    zero-to-precision window could hide a smaller valuation, ValueError if
    every entry is exactly zero.
    """
    bounds = []  # (lower bound, certain?, index)
    for i, s in enumerate(entries):
        if s.coeffs:
            bounds.append((s.ord, True, i))
        elif s.prec is not None:
            bounds.append((s.prec, False, i))
    if not bounds:
        raise ValueError("all entries are exactly zero")
    best = min(v for v, _, _ in bounds)
    for v, certain, i in bounds:
        if certain and v == best:
            return best, i
    raise InsufficientPrecision(
        f"minimal valuation not certifiable below O(u^{best})")


def det2(mat: Matrix) -> TruncatedSeries:
    (a11, a12), (a21, a22) = mat
    return a11.mul(a22).sub(a12.mul(a21))


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    (a11, a12), (a21, a22) = A
    (b11, b12), (b21, b22) = B
    return ((a11.mul(b11).add(a12.mul(b21)), a11.mul(b12).add(a12.mul(b22))),
            (a21.mul(b11).add(a22.mul(b21)), a21.mul(b12).add(a22.mul(b22))))


def mat_phi(A: Matrix) -> Matrix:
    return ((A[0][0].phi(), A[0][1].phi()), (A[1][0].phi(), A[1][1].phi()))


# ---------------------------------------------------------------------------
# Hermite normal form
# ---------------------------------------------------------------------------

def hermite_form(ctx: FieldCtx, mat: Matrix) -> Lattice:
    """Lattice spanned by the columns of mat, as its canonical Hermite triple.

    The determinant valuation and the minimal row-2 valuation are computed
    first, fixing every precision target in advance; reduction of the
    offset r modulo u^m raises InsufficientPrecision when the inputs carry
    too small a window.
    """
    det = det2(mat)
    if det.is_zero():
        raise ValueError("matrix is singular: columns do not span a lattice")
    vdet = det.valuation()  # InsufficientPrecision if zero-to-prec
    (a11, a12), (a21, a22) = mat
    try:
        n, j = _certified_min_valuation((a22, a21))
    except ValueError:
        # row 2 exactly zero would force det = 0; unreachable given vdet
        raise ValueError("matrix is singular")  # pragma: no cover
    if j == 1:  # bring the pivot column to position 2
        a11, a12 = a12, a11
        a21, a22 = a22, a21
    assert isinstance(vdet, int)
    m = vdet - n
    vb12 = a12.vbound()
    if a12.is_zero():
        r = zero(ctx)
    else:
        # column 2 scaled by u^n / a22 becomes (r_raw, u^n)
        inv_target = m - n - (vb12 if vb12 != float("inf") else m)
        w = a22.inv(prec=inv_target)
        r_raw = a12.mul(w).shift(n)
        r = r_raw.reduce_mod(m)
    return Lattice(ctx, m, n, r)


def lattice_from_columns(ctx: FieldCtx, col1, col2) -> Lattice:
    """Lattice spanned by two column vectors (pairs of series)."""
    return hermite_form(ctx, ((col1[0], col2[0]), (col1[1], col2[1])))


# ---------------------------------------------------------------------------
# relative position
# ---------------------------------------------------------------------------

def rel_position(L1: Lattice, L2: Lattice) -> ElemDiv:
    """Elementary divisor exponents of L2 relative to L1 (a >= b)."""
    ctx = L1.ctx
    c11 = monomial(ctx, 1, L2.m - L1.m)
    c22 = monomial(ctx, 1, L2.n - L1.n)
    c12 = L2.r.sub(L1.r.shift(L2.n - L1.n)).shift(-L1.m)
    entries = [c11, c22]
    if not c12.is_zero():
        entries.append(c12)
    b, _ = _certified_min_valuation(entries)
    vdet = (L2.m + L2.n) - (L1.m + L1.n)
    return ElemDiv(vdet - b, b)


def d1d2(L1: Lattice, L2: Lattice) -> Tuple[int, int]:
    """(d1, d2) = (a - b, a + b); d2 is signed (y(L2) - y(L1))."""
    div = rel_position(L1, L2)
    return div.d1, div.d2


# ---------------------------------------------------------------------------
# Phi-image of a lattice
# ---------------------------------------------------------------------------

def phi_image(phi, L: Lattice) -> Lattice:
    """Lattice spanned by Phi(L) = A . phi(basis of L).

    ``phi`` is anything exposing the ambient matrix as ``.A`` (or a raw
    2x2 matrix of series).
    """
    A = getattr(phi, "A", phi)
    mat = mat_mul(A, mat_phi(L.basis_matrix()))
    return hermite_form(L.ctx, mat)


# ---------------------------------------------------------------------------
# Smith basis (needed by the merge constructions on lattice chains)
# ---------------------------------------------------------------------------

def smith_basis(L1: Lattice, L2: Lattice, prec: int):
    """Basis (f1, f2) of L1 with L2 = <u^alpha f1, u^beta f2>.

    Returns ((f1, f2), (alpha, beta)) with alpha >= beta.  The columns f1,
    f2 live in the ambient space as pairs of series, exact up to the
    working precision ``prec`` (unit divisions truncate there).
    """
    ctx = L1.ctx
    C = list(list(row) for row in
             mat_mul(L1.inverse_matrix(), L2.basis_matrix()))
    U = [[monomial(ctx, 1, 0), zero(ctx)], [zero(ctx), monomial(ctx, 1, 0)]]

    def col_swap(M):
        M[0][0], M[0][1] = M[0][1], M[0][0]
        M[1][0], M[1][1] = M[1][1], M[1][0]

    def row_swap_c():
        C[0], C[1] = C[1], C[0]
        col_swap(U)  # inverse of a row swap is the same swap on U's columns

    # pivot: minimal valuation entry to (1,1)
    flat = [C[0][0], C[0][1], C[1][0], C[1][1]]
    _, idx = _certified_min_valuation(flat)
    if idx >= 2:
        row_swap_c()
        idx -= 2
    if idx == 1:
        col_swap(C)
    pivot = C[0][0]
    vp = pivot.valuation()
    assert isinstance(vp, int)
    # clear (2,1): row2 -= f*row1 with f = C21/C11 in F[[u]]
    if not C[1][0].is_zero():
        f = C[1][0].mul(pivot.inv(prec=prec - vp))
        C[1][1] = C[1][1].sub(f.mul(C[0][1]))
        C[1][0] = zero(ctx)
        # U := U * E21(f)  (inverse op), i.e. col1 += f*col2
        U[0][0] = U[0][0].add(f.mul(U[0][1]))
        U[1][0] = U[1][0].add(f.mul(U[1][1]))
    # clear (1,2): col2 -= g*col1 is a column op (U untouched) and leaves
    # C[1][1] alone because C[1][0] is already zero
    C[0][1] = zero(ctx)
    beta = vp
    alpha_val = C[1][1].valuation()  # InsufficientPrecision if hidden
    assert isinstance(alpha_val, int)
    alpha = alpha_val
    f1 = _apply_cols(L1.basis_matrix(), U)
    (f1c, f2c) = f1
    if alpha >= beta:
        return (f2c, f1c), (alpha, beta)
    return (f1c, f2c), (beta, alpha)


def _apply_cols(M: Matrix, U) -> Tuple[Tuple[TruncatedSeries, TruncatedSeries],
                                       Tuple[TruncatedSeries, TruncatedSeries]]:
    """Columns of M*U as vectors."""
    prod = mat_mul(M, ((U[0][0], U[0][1]), (U[1][0], U[1][1])))
    col1 = (prod[0][0], prod[1][0])
    col2 = (prod[0][1], prod[1][1])
    return col1, col2
