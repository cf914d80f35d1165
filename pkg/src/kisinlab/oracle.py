"""Brute-force reference routes.

Everything in this module recomputes, by exhaustive enumeration or dense
linear algebra, quantities that the rest of the package obtains from
closed formulas.  The two routes are kept deliberately independent so
the test suite can pit them against each other; nothing here tries to
be fast.
"""

from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .field import FieldCtx, kernel_basis
from .series import (InsufficientPrecision, TruncatedSeries, from_terms,
                     get_default_prec)
from .latmod import (Lattice, format_lattice, hermite_form, mat_mul, mat_phi,
                     smith_basis)

DEFAULT_BUDGET = 10 ** 6

# a tree vertex: the homothety class at column x on the branch with the
# given digits, encoded as ((e, c), ...) with e < x and c nonzero
Vertex = Tuple[int, Tuple[Tuple[int, int], ...]]


class BudgetExceeded(RuntimeError):
    """An enumeration would visit more tree vertices than allowed."""


# -- walking the tree ---------------------------------------------------------

def neighbors(ctx: FieldCtx, v: Vertex) -> List[Vertex]:
    """The q+1 vertices adjacent to v.

    Moving down to column x-1 truncates the digit at exponent x-1 (which
    is how p^k branches merge); moving up to column x+1 either appends a
    nonzero digit at exponent x or continues straight (c = 0), giving
    p^k upward choices.
    """
    x, digits = v
    down = (x - 1, tuple((e, c) for e, c in digits if e < x - 1))
    out = [down]
    for c in range(ctx.q):
        out.append((x + 1, digits if c == 0 else digits + ((x, c),)))
    return out


def digits_of_series(q: Optional[TruncatedSeries], x: int):
    """Canonical digit tuple of a branch series, checked against column x."""
    if q is None:
        return ()
    if q.prec is not None:
        raise ValueError("branch series must be exact")
    digits = tuple(q.terms())
    if any(e >= x for e, _ in digits):
        raise ValueError(f"branch digits must sit below column {x}")
    return digits


def ball_vertices(ctx: FieldCtx, x0: int, q0: Optional[TruncatedSeries],
                  radius: int, budget: int = DEFAULT_BUDGET):
    """Breadth-first ball of tree vertices around (x0, digits of q0).

    Returns [(vertex, dist)] in BFS order; raises BudgetExceeded rather
    than visiting more than `budget` vertices.
    """
    start = (x0, digits_of_series(q0, x0))
    seen = {start}
    out = [(start, 0)]
    frontier = [start]
    for dist in range(1, radius + 1):
        nxt = []
        for v in frontier:
            for w in neighbors(ctx, v):
                if w not in seen:
                    seen.add(w)
                    if len(seen) > budget:
                        raise BudgetExceeded(
                            f"tree ball at radius {dist} exceeds "
                            f"{budget} vertices")
                    out.append((w, dist))
                    nxt.append(w)
        frontier = nxt
    return out


def materialize(ctx: FieldCtx, v: Vertex, y: int) -> Lattice:
    """The lattice of level y in the homothety class of a tree vertex."""
    x, digits = v
    if (x - y) % 2:
        raise ValueError(f"no lattice at level {y} on column {x}")
    m = (x + y) // 2
    n = (y - x) // 2
    r = from_terms(ctx, {e + n: c for e, c in digits}, None)
    return Lattice(ctx, m, n, r)


def ball_enumerate(ctx: FieldCtx, x0: int, q0: Optional[TruncatedSeries],
                   radius: int, y: int,
                   budget: int = DEFAULT_BUDGET) -> List[Lattice]:
    """All lattices of level y within tree distance `radius` of a vertex."""
    out = [materialize(ctx, v, y)
           for v, _ in ball_vertices(ctx, x0, q0, radius, budget)
           if (v[0] - y) % 2 == 0]
    out.sort(key=Lattice.sort_key)
    return out


def ball_vertex_count(q: int, radius: int) -> int:
    """Number of vertices in a ball of the (q+1)-regular tree."""
    n, shell = 1, q + 1
    for _ in range(radius):
        n += shell
        shell *= q
    return n


def ball_level_count(q: int, radius: int) -> int:
    """Number of ball vertices sharing the center's column parity."""
    n, d = 1, 2
    while d <= radius:
        n += (q + 1) * q ** (d - 1)
        d += 2
    return n


# -- divisor pairs by explicit reduction --------------------------------------

def brute_divisors(phi, L: Lattice, prec: Optional[int] = None):
    """Elementary divisors of the image lattice over L, the long way.

    Multiplies out the matrix against the twisted basis, Hermite-reduces
    the columns, then Smith-reduces the pair (L, image) by explicit
    column operations.  No valuation shortcuts: this is the reference
    route the closed-form distance computations are tested against.
    """
    if prec is None:
        prec = get_default_prec()
    img = hermite_form(L.ctx, mat_mul(phi.A, mat_phi(L.basis_matrix())))
    _, (alpha, beta) = smith_basis(L, img, prec)
    return (alpha, beta)


def brute_is_v_admissible(phi, L: Lattice, v, prec: Optional[int] = None):
    """Admissibility from raw divisor inequalities: b >= e - r1 and
    a + b = 2e - (r1 + r2)."""
    a, b = brute_divisors(phi, L, prec)
    return b >= v.e - v.r1 and a + b == 2 * v.e - v.r1 - v.r2


def brute_is_integral_admissible(phi, L: Lattice, e: int,
                                 prec: Optional[int] = None):
    """Integral admissibility from raw divisors: 0 <= b <= a <= e."""
    a, b = brute_divisors(phi, L, prec)
    return 0 <= b and a <= e


# -- dense stable-line solver --------------------------------------------------

def dense_line_solve(ctx: FieldCtx, B, c: int, j: int, N: int,
                     require: str = "primitive"):
    """Witness for B . phi(w) = c u^j w with w a pair of polynomials.

    Unknowns are the 2N coefficients of w = (w1, w2) with deg wi < N.
    One linear row is written for every (component, exponent) pair any
    term can touch below exponent N + j; comparing coefficients is
    F_q-linear because phi fixes constants.  A kernel basis is scanned
    for a witness:

      require="primitive":    (w1(0), w2(0)) != (0, 0)
      require="second-unit":  w2(0) != 0

    Both requirements are linear functionals, so they vanish on every
    kernel vector iff they vanish on a basis; scanning the basis is
    enough.  Returns coefficient lists (w1, w2), or None.

    Rows are only trustworthy when every exponent they touch is inside
    the window, so entries must be exact or known past N + j, and N + j
    must stay below p N + min valuation.
    """
    p = ctx.p
    if j < 0:
        raise ValueError("shift j must be nonnegative")
    vmin = 0
    for row in B:
        for entry in row:
            if entry.prec is not None and entry.prec < N + j:
                raise InsufficientPrecision(
                    f"entries known to O(u^{entry.prec}); the dense system "
                    f"needs coefficients up to u^{N + j - 1}")
            vb = entry.vbound()
            if vb < vmin:
                vmin = int(vb)
    d_hi = N + j
    if d_hi - 1 >= p * N + vmin:
        raise ValueError(
            f"window N={N} too small for shift {j}: rows would touch "
            "coefficients beyond the window")

    ncols = 2 * N
    rows = []
    for r in range(2):
        active = set(j + i for i in range(N))
        for col in range(2):
            for e, _ in B[r][col].terms():
                d = e
                while d < d_hi:
                    if d >= e:  # i = (d - e)/p >= 0
                        active.add(d)
                    d += p
        for d in sorted(active):
            if d >= d_hi:
                continue
            vec = [0] * ncols
            touched = False
            for col in range(2):
                for e, cc in B[r][col].terms():
                    i, rem = divmod(d - e, p)
                    if rem == 0 and 0 <= i < N:
                        idx = col * N + i
                        vec[idx] = ctx.add(vec[idx], cc)
                        touched = True
            if 0 <= d - j < N:
                idx = r * N + (d - j)
                vec[idx] = ctx.sub(vec[idx], c)
                touched = True
            if touched:
                rows.append(vec)

    for vec in kernel_basis(ctx, rows, ncols):
        w1, w2 = vec[:N], vec[N:]
        if require == "second-unit":
            if w2[0] != 0:
                return (w1, w2)
        elif require == "primitive":
            if (w1[0], w2[0]) != (0, 0):
                return (w1, w2)
        else:
            raise ValueError(f"unknown witness requirement {require!r}")
    return None


def brute_stable_line(phi, L: Lattice, j: int, c: int,
                      N: Optional[int] = None, require: str = "primitive"):
    """Stable-line witness in the coordinates of L, or None.

    Solves B phi(w) = c u^j w for B the matrix of the module in a basis
    of L, with w primitive in L, by the dense route.
    """
    if N is None:
        N = get_default_prec()
    B = phi.relative_matrix(L)
    return dense_line_solve(phi.ctx, B, c, j, N, require)


def brute_line_constants(phi, L: Lattice, j: int,
                         cs: Optional[Sequence[int]] = None,
                         N: Optional[int] = None) -> List[int]:
    """All constants c admitting a primitive stable line at shift j."""
    ctx = phi.ctx
    if cs is None:
        cs = list(ctx.units())
    return [c for c in cs if brute_stable_line(phi, L, j, c, N) is not None]


def brute_is_split(ctx: FieldCtx, mat, N: Optional[int] = None) -> bool:
    """Splitness of an upper-triangular module by one dense solve.

    For [[a u^s, gamma], [0, b u^t]] the module splits iff some
    w = (w1, w2) with w2(0) != 0 solves the stable-line equation at
    constant b and shift t: the second row forces phi(w2) = w2, whose
    only solutions are the constants, so a witness rebuilds an exact
    complement of the line spanned by e1; conversely a splitting basis
    vector truncates to a kernel witness.  The finitely many obstruction
    rows all sit below (pt - s)/(p - 1) + deg(gamma), so the default
    window deg(gamma) + 2p + 8 already decides the question.
    """
    a_entry, gamma = mat[0]
    z_entry, b_entry = mat[1]
    if not z_entry.is_zero():
        raise ValueError("matrix must be upper triangular")
    for entry in (a_entry, b_entry):
        if len(list(entry.terms())) != 1 or entry.prec is not None:
            raise ValueError("diagonal entries must be exact monomials")
    if gamma.is_zero():
        return True
    if gamma.is_zero_to_prec():
        raise InsufficientPrecision(
            f"gamma is zero to O(u^{gamma.prec}); splitness undecidable")
    t = b_entry.valuation()
    b = b_entry.coeff(t)
    s = a_entry.valuation()
    # a splitting series can carry a pole of order up to
    # max(t - v(gamma), (s - v(gamma))/p); twisting the first basis
    # vector by u^M moves the witness back into polynomials
    g0 = gamma.valuation()
    M = max(0, t - g0, -((g0 - s) // ctx.p))
    if M:
        a_entry = a_entry.shift(-(ctx.p - 1) * M)
        gamma = gamma.shift(M)
        mat = ((a_entry, gamma), (z_entry, b_entry))
    if N is None:
        deg = max(e for e, _ in gamma.terms())
        N = max(deg, 0) + 2 * ctx.p + 8 + (ctx.p - 1) * M
    return dense_line_solve(ctx, mat, b, t, N, "second-unit") is not None


# -- report diffing ------------------------------------------------------------

def _render(x) -> str:
    return format_lattice(x) if isinstance(x, Lattice) else str(x)


def diff_reports(predicted: Iterable, observed: Iterable,
                 limit: int = 20) -> Dict:
    """Set comparison of two collections, for verification reports."""
    pset, oset = set(predicted), set(observed)

    def render(xs):
        xs = sorted(_render(x) for x in xs)
        if len(xs) > limit:
            return xs[:limit] + [f"... {len(xs) - limit} more"]
        return xs

    only_p = pset - oset
    only_o = oset - pset
    divergence = render(only_p | only_o)
    return {
        "equal": not only_p and not only_o,
        "n_predicted": len(pset),
        "n_observed": len(oset),
        "only_predicted": render(only_p),
        "only_observed": render(only_o),
        "first_divergence": divergence[0] if divergence else None,
    }
