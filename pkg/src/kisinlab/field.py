"""Arithmetic in small finite fields F_{p^k}.

Elements are packed into plain ints in ``[0, p^k)``: the int ``v`` encodes
the polynomial ``sum_i d_i g^i`` where ``d_i`` are the base-p digits of
``v`` and ``g`` is the residue of x modulo the field modulus.  All hot-path
arithmetic works on these ints via a :class:`FieldCtx`; :class:`FieldElem`
is a thin wrapper for user-facing code (parsing, printing, CLI literals).

The modulus for k > 1 is the smallest monic irreducible polynomial of
degree k, ordered by the integer key ``sum_i c_i p^i`` (constant
coefficient least significant).  For F_9 this gives g^2 + 1, so g^2 = -1.
"""

from __future__ import annotations

import math
from typing import Iterator, List, Optional, Sequence, Tuple

_TABLE_LIMIT = 1024  # build full add/mul tables when p^k is at most this


def _digits(v: int, p: int, k: int) -> List[int]:
    out = []
    for _ in range(k):
        v, d = divmod(v, p)
        out.append(d)
    return out


def _undigits(ds: Sequence[int], p: int) -> int:
    v = 0
    for d in reversed(ds):
        v = v * p + d
    return v


# ---------------------------------------------------------------------------
# polynomial helpers over F_p (coefficient lists, lowest degree first)
# ---------------------------------------------------------------------------

def _poly_trim(a: List[int]) -> List[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> List[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_trim(out)


def _poly_mod(a: Sequence[int], f: Sequence[int], p: int) -> List[int]:
    # f is monic
    a = list(a)
    df = len(f) - 1
    while len(a) - 1 >= df and a:
        lead = a[-1]
        if lead:
            shift = len(a) - 1 - df
            for i, fi in enumerate(f):
                a[shift + i] = (a[shift + i] - lead * fi) % p
        a.pop()
    return _poly_trim(a)


def _poly_powmod(a: Sequence[int], n: int, f: Sequence[int], p: int) -> List[int]:
    result = [1]
    base = _poly_mod(a, f, p)
    while n:
        if n & 1:
            result = _poly_mod(_poly_mul(result, base, p), f, p)
        base = _poly_mod(_poly_mul(base, base, p), f, p)
        n >>= 1
    return result


def _poly_gcd(a: Sequence[int], b: Sequence[int], p: int) -> List[int]:
    a, b = list(a), list(b)
    while b:
        inv_lead = pow(b[-1], p - 2, p)
        bb = [(c * inv_lead) % p for c in b]
        a, b = b, _poly_mod(a, bb, p)
    return a


def _is_irreducible(f: Sequence[int], p: int) -> bool:
    k = len(f) - 1
    if k == 1:
        return True
    x = [0, 1]
    # no factor of degree dividing a maximal proper divisor of k
    for ell in {d for d in (2, 3) if k % d == 0}:
        xp = _poly_powmod(x, p ** (k // ell), f, p)
        g = _poly_gcd(_poly_trim([(c1 - c2) % p for c1, c2 in
                                  _zip_pad(xp, x, p)]), f, p)
        if len(g) - 1 > 0:
            return False
    xpk = _poly_powmod(x, p ** k, f, p)
    return xpk == x


def _zip_pad(a: Sequence[int], b: Sequence[int], p: int):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return zip(a, b)


def _find_modulus(p: int, k: int) -> Tuple[int, ...]:
    if k == 1:
        return (0, 1)
    for key in range(p ** k):
        f = _digits(key, p, k) + [1]
        if _is_irreducible(f, p):
            return tuple(f)
    raise RuntimeError("no irreducible polynomial found")  # pragma: no cover


_PRIMES = {2, 3, 5, 7, 11, 13}


class FieldCtx:
    """Field F_{p^k} with int-packed elements and cached tables.

    p must be a prime <= 13 and 1 <= k <= 4.  Elements are ints in
    [0, p^k).  ``zero`` is 0 and ``one`` is 1 under the packing.
    """

    def __init__(self, p: int, k: int = 1):
        if p not in _PRIMES:
            raise ValueError(f"p must be a prime <= 13, got {p}")
        if not 1 <= k <= 4:
            raise ValueError(f"extension degree k must be in [1, 4], got {k}")
        self.p = p
        self.k = k
        self.q = p ** k
        self.modulus = _find_modulus(p, k)
        self._mul_table: Optional[List[int]] = None
        self._add_table: Optional[List[int]] = None
        self._inv_table: List[int] = []
        self._frob_table: List[int] = []
        self._build_tables()

    # -- construction of cached tables -------------------------------------

    def _mul_raw(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a * b) % self.p
        prod = _poly_mul(_digits(a, self.p, self.k), _digits(b, self.p, self.k),
                         self.p)
        return _undigits(_poly_mod(prod, self.modulus, self.p), self.p)

    def _add_raw(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        da = _digits(a, self.p, self.k)
        db = _digits(b, self.p, self.k)
        return _undigits([(x + y) % self.p for x, y in zip(da, db)], self.p)

    def _build_tables(self) -> None:
        q = self.q
        if q <= _TABLE_LIMIT:
            mul = [0] * (q * q)
            add = [0] * (q * q)
            for a in range(q):
                row = a * q
                for b in range(a, q):
                    m = self._mul_raw(a, b)
                    s = self._add_raw(a, b)
                    mul[row + b] = mul[b * q + a] = m
                    add[row + b] = add[b * q + a] = s
            self._mul_table = mul
            self._add_table = add
        inv = [0] * q
        for a in range(1, q):
            inv[a] = self._pow_raw(a, q - 2)
        self._inv_table = inv
        self._frob_table = [self._pow_raw(a, self.p) for a in range(q)]

    def _pow_raw(self, a: int, n: int) -> int:
        result = 1
        while n:
            if n & 1:
                result = self._mul_raw(result, a)
            a = self._mul_raw(a, a)
            n >>= 1
        return result

    # -- int-level arithmetic ----------------------------------------------

    def add(self, a: int, b: int) -> int:
        t = self._add_table
        if t is not None:
            return t[a * self.q + b]
        return self._add_raw(a, b)

    def neg(self, a: int) -> int:
        if self.k == 1:
            return (-a) % self.p
        return _undigits([(-d) % self.p for d in _digits(a, self.p, self.k)],
                         self.p)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        t = self._mul_table
        if t is not None:
            return t[a * self.q + b]
        return self._mul_raw(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in finite field")
        return self._inv_table[a]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def frobenius(self, a: int) -> int:
        """a -> a^p (generates Gal(F_{p^k} / F_p))."""
        return self._frob_table[a]

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            a, n = self.inv(a), -n
        return self._pow_raw(a, n)

    def sqrt(self, a: int) -> Optional[int]:
        """A square root of a, or None if a is not a square."""
        if a == 0:
            return 0
        if self.q % 2 == 0:  # pragma: no cover - q is odd for odd p
            return self._pow_raw(a, self.q // 2)
        if self._pow_raw(a, (self.q - 1) // 2) != 1:
            return None
        # q is tiny; scan
        for x in range(1, self.q):
            if self.mul(x, x) == a:
                return x
        return None  # pragma: no cover

    # -- element views ------------------------------------------------------

    def elements(self) -> Iterator[int]:
        """All elements, deterministic order (coefficient-lex), 0 first."""
        return iter(range(self.q))

    def units(self) -> Iterator[int]:
        return iter(range(1, self.q))

    def elem(self, v: int) -> "FieldElem":
        return FieldElem(self, v % self.q if self.k == 1 else v)

    def from_int(self, n: int) -> int:
        """Image of the rational integer n in the prime field."""
        return n % self.p

    def parse(self, text: str) -> "FieldElem":
        return FieldElem(self, parse_element(self, text))

    def format(self, a: int) -> str:
        return format_element(self, a)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, FieldCtx) and other.p == self.p
                and other.k == self.k)

    def __hash__(self) -> int:
        return hash((self.p, self.k))

    def __repr__(self) -> str:
        if self.k == 1:
            return f"FieldCtx(p={self.p})"
        mod = format_poly(self.modulus, "g")
        return f"FieldCtx(p={self.p}, k={self.k}, modulus={mod})"


def format_poly(coeffs: Sequence[int], var: str) -> str:
    terms = []
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        if i == 0:
            terms.append(str(c))
        elif i == 1:
            terms.append(var if c == 1 else f"{c}{var}")
        else:
            terms.append(f"{var}^{i}" if c == 1 else f"{c}{var}^{i}")
    return "+".join(terms) if terms else "0"


def format_element(ctx: FieldCtx, a: int) -> str:
    """Render like ``0``, ``2``, ``g``, ``1+2g``, ``2g^3``."""
    return format_poly(_digits(a, ctx.p, ctx.k), "g")


def parse_element(ctx: FieldCtx, text: str) -> int:
    """Parse the syntax produced by :func:`format_element`.

    Accepts optional whitespace and leading minus signs per term, e.g.
    ``1+2g``, ``-1``, ``2g^2 + 1``.
    """
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty field element literal")
    s = s.replace("-", "+-")
    if s.startswith("+"):
        s = s[1:]
    digits = [0] * ctx.k
    for term in s.split("+"):
        if not term:
            raise ValueError(f"bad field element literal: {text!r}")
        neg = term.startswith("-")
        if neg:
            term = term[1:]
        if "g" in term:
            head, _, tail = term.partition("g")
            coeff = int(head) if head else 1
            power = int(tail[1:]) if tail.startswith("^") else (1 if not tail else None)
            if power is None or not 0 <= power:
                raise ValueError(f"bad field element literal: {text!r}")
        else:
            coeff = int(term)
            power = 0
        if power >= ctx.k:
            raise ValueError(
                f"term g^{power} needs extension degree > {ctx.k}: {text!r}")
        coeff %= ctx.p
        if neg:
            coeff = (-coeff) % ctx.p
        digits[power] = (digits[power] + coeff) % ctx.p
    return _undigits(digits, ctx.p)


class FieldElem:
    """Element of F_{p^k}; wraps a packed int together with its context."""

    __slots__ = ("ctx", "val")

    def __init__(self, ctx: FieldCtx, val: int):
        if not 0 <= val < ctx.q:
            raise ValueError(f"packed value {val} out of range for {ctx!r}")
        self.ctx = ctx
        self.val = val

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElem):
            if other.ctx != self.ctx:
                raise ValueError("mixed field contexts")
            return other.val
        if isinstance(other, int):
            return self.ctx.from_int(other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElem(self.ctx, self.ctx.add(self.val, v))

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElem(self.ctx, self.ctx.sub(self.val, v))

    def __rsub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElem(self.ctx, self.ctx.sub(v, self.val))

    def __mul__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElem(self.ctx, self.ctx.mul(self.val, v))

    __rmul__ = __mul__

    def __truediv__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElem(self.ctx, self.ctx.div(self.val, v))

    def __rtruediv__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElem(self.ctx, self.ctx.div(v, self.val))

    def __neg__(self):
        return FieldElem(self.ctx, self.ctx.neg(self.val))

    def __pow__(self, n: int):
        return FieldElem(self.ctx, self.ctx.pow(self.val, n))

    def frobenius(self) -> "FieldElem":
        return FieldElem(self.ctx, self.ctx.frobenius(self.val))

    def inverse(self) -> "FieldElem":
        return FieldElem(self.ctx, self.ctx.inv(self.val))

    def __bool__(self) -> bool:
        return self.val != 0

    def __eq__(self, other: object) -> bool:
        if isinstance(other, FieldElem):
            return self.ctx == other.ctx and self.val == other.val
        if isinstance(other, int):
            return self.val == self.ctx.from_int(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ctx.p, self.ctx.k, self.val))

    def __repr__(self) -> str:
        return format_element(self.ctx, self.val)


# ---------------------------------------------------------------------------
# linear algebra over F_{p^k} (packed-int matrices)
# ---------------------------------------------------------------------------

def rref(ctx: FieldCtx, rows: List[List[int]]) -> Tuple[List[List[int]], List[int]]:
    """Reduced row echelon form; returns (matrix, pivot column indices)."""
    mat = [row[:] for row in rows]
    nrows = len(mat)
    ncols = len(mat[0]) if mat else 0
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, nrows) if mat[i][c]), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        inv = ctx.inv(mat[r][c])
        mat[r] = [ctx.mul(inv, x) for x in mat[r]]
        for i in range(nrows):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [ctx.sub(x, ctx.mul(f, y))
                          for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return mat, pivots


def kernel_basis(ctx: FieldCtx, rows: List[List[int]], ncols: int) -> List[List[int]]:
    """Basis of the right kernel of the matrix (rows over ctx)."""
    if not rows:
        basis = []
        for j in range(ncols):
            v = [0] * ncols
            v[j] = 1
            basis.append(v)
        return basis
    mat, pivots = rref(ctx, rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for r, pc in enumerate(pivots):
            v[pc] = ctx.neg(mat[r][fc])
        basis.append(v)
    return basis


def solve_linear(ctx: FieldCtx, rows: List[List[int]], rhs: List[int]) -> Optional[List[int]]:
    """One solution of rows * x = rhs, or None if inconsistent."""
    ncols = len(rows[0]) if rows else 0
    aug = [row + [b] for row, b in zip(rows, rhs)]
    mat, pivots = rref(ctx, aug)
    if ncols in pivots:
        return None
    x = [0] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = mat[r][ncols]
    return x


_CTX_CACHE: dict = {}


def get_ctx(p: int, k: int = 1) -> FieldCtx:
    """Shared FieldCtx instances (table construction is not free)."""
    key = (p, k)
    if key not in _CTX_CACHE:
        _CTX_CACHE[key] = FieldCtx(p, k)
    return _CTX_CACHE[key]


INF = math.inf
