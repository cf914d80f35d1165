"""Truncated Laurent series over F_{p^k} with honest precision windows.

A series carries its known coefficient window: ``coeffs[i]`` is the packed
field coefficient of ``u^(ord + i)``, and every exponent below ``prec`` is
known (coefficients outside the stored window are known to be zero).
``prec=None`` means the series is exact: all unstored coefficients are zero
out to infinity.  A series that is zero as far as we can see but has a
finite window is stored with empty coeffs and ``ord == prec``.

Precision propagates through arithmetic following the usual windows:

* ``add``: result precision is the minimum of the operand precisions.
* ``mul``: result precision is ``min(vb(a) + prec(b), vb(b) + prec(a))``
  where ``vb`` is the valuation lower bound.
* ``inv``: an exact monomial inverts exactly; otherwise the result is
  truncated (absolute precision ``prec(a) - 2 v(a)`` for a finite-window
  input, caller-supplied or module default target for an exact input).
* ``phi`` (u -> u^p, coefficients fixed): ord and prec scale by p.

Asking for the valuation of a series that is zero to its precision raises
:class:`InsufficientPrecision`; callers retry at higher working precision.
"""

from __future__ import annotations

import math
import re
from typing import Dict, Iterable, Optional, Tuple, Union

from .field import FieldCtx, FieldElem, format_element, parse_element

INF = math.inf


class InsufficientPrecision(Exception):
    """A certified answer needs more known coefficients than available."""


_default_rel_prec = 64


def set_default_prec(n: int) -> None:
    global _default_rel_prec
    if n < 4:
        raise ValueError("default precision must be at least 4")
    _default_rel_prec = n


def get_default_prec() -> int:
    return _default_rel_prec


def _min_prec(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class TruncatedSeries:
    """Laurent series with a known window [ord, prec) of coefficients."""

    __slots__ = ("ctx", "ord", "coeffs", "prec")

    def __init__(self, ctx: FieldCtx, ord: int, coeffs: Tuple[int, ...],
                 prec: Optional[int]):
        # normalized by the factory functions; this constructor trusts input
        self.ctx = ctx
        self.ord = ord
        self.coeffs = coeffs
        self.prec = prec

    # -- basic structure ----------------------------------------------------

    def is_exact(self) -> bool:
        return self.prec is None

    def is_zero(self) -> bool:
        """True when the series is exactly zero (not just to precision)."""
        return not self.coeffs and self.prec is None

    def is_zero_to_prec(self) -> bool:
        return not self.coeffs

    def vbound(self) -> Union[int, float]:
        """Lower bound for the valuation: v if visible, else prec or +inf."""
        if self.coeffs:
            return self.ord
        return INF if self.prec is None else self.prec

    def valuation(self, certified: bool = True) -> Union[int, float, None]:
        if self.coeffs:
            return self.ord
        if self.prec is None:
            return INF
        if certified:
            raise InsufficientPrecision(
                f"series is zero to precision O(u^{self.prec}); "
                "valuation not certifiable")
        return None

    def coeff(self, e: int) -> int:
        """Packed coefficient of u^e; raises if e is beyond the window."""
        if self.prec is not None and e >= self.prec:
            raise InsufficientPrecision(
                f"coefficient of u^{e} beyond known window O(u^{self.prec})")
        i = e - self.ord
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return 0

    def terms(self) -> Iterable[Tuple[int, int]]:
        for i, c in enumerate(self.coeffs):
            if c:
                yield (self.ord + i, c)

    # -- arithmetic ----------------------------------------------------------

    def _check_ctx(self, other: "TruncatedSeries") -> None:
        if self.ctx != other.ctx:
            raise ValueError("mixed field contexts in series arithmetic")

    def add(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check_ctx(other)
        prec = _min_prec(self.prec, other.prec)
        acc: Dict[int, int] = {}
        ctx = self.ctx
        for e, c in self.terms():
            acc[e] = c
        for e, c in other.terms():
            acc[e] = ctx.add(acc.get(e, 0), c)
        return from_terms(ctx, acc, prec)

    def neg(self) -> "TruncatedSeries":
        ctx = self.ctx
        return TruncatedSeries(ctx, self.ord,
                               tuple(ctx.neg(c) for c in self.coeffs),
                               self.prec)

    def sub(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self.add(other.neg())

    def mul(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check_ctx(other)
        ctx = self.ctx
        va, vb = self.vbound(), other.vbound()
        prec: Optional[int] = None
        if other.prec is not None and va != INF:
            prec = other.prec + va
        if self.prec is not None and vb != INF:
            prec = _min_prec(prec, self.prec + vb)
        if not self.coeffs or not other.coeffs:
            return zero(ctx, prec)
        acc: Dict[int, int] = {}
        for i, ca in enumerate(self.coeffs):
            if not ca:
                continue
            ea = self.ord + i
            for j, cb in enumerate(other.coeffs):
                if not cb:
                    continue
                e = ea + other.ord + j
                if prec is not None and e >= prec:
                    break
                acc[e] = ctx.add(acc.get(e, 0), ctx.mul(ca, cb))
        return from_terms(ctx, acc, prec)

    def scale(self, c: int) -> "TruncatedSeries":
        """Multiply by a packed field constant."""
        ctx = self.ctx
        if c == 0:
            return zero(ctx, self.prec)
        return TruncatedSeries(ctx, self.ord,
                               tuple(ctx.mul(c, x) for x in self.coeffs),
                               self.prec)

    def shift(self, n: int) -> "TruncatedSeries":
        """Multiply by u^n."""
        return TruncatedSeries(self.ctx, self.ord + n, self.coeffs,
                               None if self.prec is None else self.prec + n)

    def inv(self, prec: Optional[int] = None) -> "TruncatedSeries":
        ctx = self.ctx
        if self.is_zero():
            raise ZeroDivisionError("inverse of the zero series")
        v = self.valuation()  # raises InsufficientPrecision if uncertified
        assert isinstance(v, int)
        if self.prec is None and len(self.coeffs) == 1:
            return monomial(ctx, ctx.inv(self.coeffs[0]), -v,
                            None if prec is None else prec)
        if self.prec is not None:
            target = self.prec - 2 * v
            if prec is not None:
                target = min(target, prec)
        else:
            target = prec if prec is not None else -v + _default_rel_prec
        nterms = target - (-v)
        if nterms <= 0:
            return zero(ctx, target)
        c = self.coeffs
        c0inv = ctx.inv(c[0])
        out = [0] * nterms
        out[0] = c0inv
        for n in range(1, nterms):
            s = 0
            for i in range(1, min(n, len(c) - 1) + 1):
                if c[i] and out[n - i]:
                    s = ctx.add(s, ctx.mul(c[i], out[n - i]))
            out[n] = ctx.neg(ctx.mul(c0inv, s))
        return from_terms(ctx, {(-v + i): x for i, x in enumerate(out)},
                          target)

    def phi(self) -> "TruncatedSeries":
        """Substitute u -> u^p; coefficients are fixed."""
        p = self.ctx.p
        acc = {p * e: c for e, c in self.terms()}
        return from_terms(self.ctx, acc,
                          None if self.prec is None else p * self.prec)

    def truncate(self, prec: int) -> "TruncatedSeries":
        """Forget coefficients at exponents >= prec (weakening only)."""
        new_prec = prec if self.prec is None else min(self.prec, prec)
        return from_terms(self.ctx, dict(self.terms()), new_prec)

    def reduce_mod(self, m: int) -> "TruncatedSeries":
        """Exact polynomial representative modulo u^m.

        Requires the whole window below u^m to be known.
        """
        if self.prec is not None and self.prec < m:
            raise InsufficientPrecision(
                f"reduction mod u^{m} needs precision {m}, have {self.prec}")
        return from_terms(self.ctx, {e: c for e, c in self.terms() if e < m},
                          None)

    def eq_mod(self, other: "TruncatedSeries", m: int) -> bool:
        d = self.sub(other)
        if d.prec is not None and d.prec < m:
            raise InsufficientPrecision(
                f"equality mod u^{m} needs precision {m}, have {d.prec}")
        return all(e >= m for e, _ in d.terms())

    # -- comparison / hashing -------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (self.ctx == other.ctx and self.ord == other.ord
                and self.coeffs == other.coeffs and self.prec == other.prec)

    def __hash__(self) -> int:
        return hash((self.ctx.p, self.ctx.k, self.ord, self.coeffs, self.prec))

    def __repr__(self) -> str:
        body = format_series(self)
        if self.prec is not None:
            return f"{body} (mod u^{self.prec})"
        return body


# ---------------------------------------------------------------------------
# factories
# ---------------------------------------------------------------------------

def from_terms(ctx: FieldCtx, terms: Dict[int, int],
               prec: Optional[int] = None) -> TruncatedSeries:
    kept = {e: c for e, c in terms.items()
            if c and (prec is None or e < prec)}
    if not kept:
        if prec is None:
            return TruncatedSeries(ctx, 0, (), None)
        return TruncatedSeries(ctx, prec, (), prec)
    lo = min(kept)
    hi = max(kept)
    coeffs = tuple(kept.get(e, 0) for e in range(lo, hi + 1))
    return TruncatedSeries(ctx, lo, coeffs, prec)


def zero(ctx: FieldCtx, prec: Optional[int] = None) -> TruncatedSeries:
    if prec is None:
        return TruncatedSeries(ctx, 0, (), None)
    return TruncatedSeries(ctx, prec, (), prec)


def one(ctx: FieldCtx) -> TruncatedSeries:
    return TruncatedSeries(ctx, 0, (1,), None)


def monomial(ctx: FieldCtx, c: int, e: int,
             prec: Optional[int] = None) -> TruncatedSeries:
    return from_terms(ctx, {e: c}, prec)


def const(ctx: FieldCtx, c: int) -> TruncatedSeries:
    return monomial(ctx, c, 0)


# ---------------------------------------------------------------------------
# text syntax: "2*u^-1 + 1 + g*u^3", extension coefficients with more than
# one term must be parenthesized: "(1+2g)*u^2"
# ---------------------------------------------------------------------------

def format_series(s: TruncatedSeries) -> str:
    parts = []
    for e, c in s.terms():
        cf = format_element(s.ctx, c)
        if "+" in cf:
            cf = f"({cf})"
        if e == 0:
            parts.append(cf)
        else:
            ue = "u" if e == 1 else f"u^{e}"
            parts.append(ue if cf == "1" else f"{cf}*{ue}")
    return " + ".join(parts) if parts else "0"


def _split_terms(text: str) -> Iterable[str]:
    depth = 0
    cur = []
    prev = ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and ch == "+":
            yield "".join(cur)
            cur = []
        elif depth == 0 and ch == "-" and prev not in ("", "^", "*"):
            yield "".join(cur)
            cur = ["-"]
        else:
            cur.append(ch)
        if not ch.isspace():
            prev = ch
    yield "".join(cur)


_TERM_RE = re.compile(
    r"^(?P<neg>-)?\s*(?:(?P<coeff>\([^()]*\)|[0-9]+g(?:\^[0-9]+)?|g(?:\^[0-9]+)?|[0-9]+)\s*\*?\s*)?"
    r"(?P<u>u(?:\^(?P<exp>-?[0-9]+))?)?\s*$")


def parse_series(ctx: FieldCtx, text: str) -> TruncatedSeries:
    """Parse the series syntax; inverse of :func:`format_series`."""
    text = text.strip()
    if not text:
        raise ValueError("empty series literal")
    acc: Dict[int, int] = {}
    for raw in _split_terms(text):
        term = raw.strip()
        if not term:
            raise ValueError(f"bad series literal: {text!r}")
        m = _TERM_RE.match(term)
        if not m or (m.group("coeff") is None and m.group("u") is None):
            raise ValueError(f"bad series term: {term!r}")
        coeff_txt = m.group("coeff")
        if coeff_txt is None:
            c = 1
        else:
            if coeff_txt.startswith("("):
                coeff_txt = coeff_txt[1:-1]
            c = parse_element(ctx, coeff_txt)
        if m.group("neg"):
            c = ctx.neg(c)
        if m.group("u") is None:
            e = 0
        else:
            e = int(m.group("exp")) if m.group("exp") is not None else 1
        acc[e] = ctx.add(acc.get(e, 0), c)
    return from_terms(ctx, acc, None)


# ---------------------------------------------------------------------------
# spec-facing functional aliases
# ---------------------------------------------------------------------------

def s_add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a.add(b)


def s_sub(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a.sub(b)


def s_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a.mul(b)


def s_valuation(a: TruncatedSeries, certified: bool = True):
    return a.valuation(certified)


def s_inv(a: TruncatedSeries, prec: Optional[int] = None) -> TruncatedSeries:
    return a.inv(prec)


def s_phi(a: TruncatedSeries) -> TruncatedSeries:
    return a.phi()


def elem_series(ctx: FieldCtx, c: Union[int, FieldElem]) -> TruncatedSeries:
    if isinstance(c, FieldElem):
        c = c.val
    return const(ctx, c)
