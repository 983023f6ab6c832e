"""Projective points, factorisation over the base field and root decomposition.

Factorisation over ``Q(params)`` is delegated to FLINT (multivariate
factorisation over ``Q`` after clearing denominators).  Above an algebraic
level no factorisation is attempted: squarefree factors are adjoined as they
are and dynamic evaluation splits them lazily.
"""

from __future__ import annotations

from dataclasses import dataclass

import flint
from flint import fmpq

from .field import (
    AlgebraicLevel,
    AlgElem,
    BaseField,
    RatFunc,
    base_field,
    inv,
    is_syntactic_zero,
    is_zero,
    join_levels,
    level_of,
    p_divmod,
    p_monic,
    p_text,
    p_trim,
    to_text,
)
from .jet import hom_coeffs
from .upoly import UniPoly, squarefree_decomposition, upoly_gcd

__all__ = [
    "ProjPoint",
    "RootInfo",
    "root_decompose",
    "factor_over_base",
    "rational_roots",
    "charpoly_over_base",
    "rational_value",
    "homog_gcd",
    "homog_eval",
    "dehomogenize",
]


# ---------------------------------------------------------------------------
# projective points
# ---------------------------------------------------------------------------


class ProjPoint:
    """A point ``[a:b]`` of the projective line, normalised to ``[a:1]`` or ``[1:0]``."""

    __slots__ = ("a", "b")

    def __init__(self, a, b=1):
        if is_zero(b):
            if is_zero(a):
                raise ValueError("[0:0] is not a projective point")
            self.a, self.b = 1, 0
        elif isinstance(b, int) and b == 1:
            self.a, self.b = a, 1
        else:
            self.a, self.b = a * inv(b), 1

    @property
    def is_infinity(self) -> bool:
        """True for ``[1:0]`` (the x-axis direction)."""
        return isinstance(self.b, int) and self.b == 0

    @property
    def level(self):
        return level_of(self.a)

    def __eq__(self, other):
        if not isinstance(other, ProjPoint):
            return NotImplemented
        if self.is_infinity or other.is_infinity:
            return self.is_infinity and other.is_infinity
        return is_zero(self.a - other.a)

    __hash__ = None

    def text(self) -> str:
        if self.is_infinity:
            return "[1:0]"
        return f"[{to_text(self.a)}:1]"

    __str__ = text

    def __repr__(self):
        return f"ProjPoint{self.text()}"


# ---------------------------------------------------------------------------
# homogeneous helpers (coefficient j multiplies x^(d-j) y^j)
# ---------------------------------------------------------------------------


def dehomogenize(hc):
    """``u(s) = h(s, 1)`` as a coefficient list in ``s``."""
    d = len(hc) - 1
    return p_trim([hc[d - k] for k in range(d + 1)])


def homog_eval(hc, a, b):
    d = len(hc) - 1
    total = 0
    for j, c in enumerate(hc):
        if is_syntactic_zero(c):
            continue
        total = total + c * (a ** (d - j) if d - j else 1) * (b**j if j else 1)
    return total


def homog_gcd(h1, h2):
    """Monic-in-``s`` gcd of two homogeneous polynomials, as a coefficient list."""
    d1, d2 = len(h1) - 1, len(h2) - 1
    u1, u2 = dehomogenize(h1), dehomogenize(h2)
    if not u1:
        return list(h2)
    if not u2:
        return list(h1)
    # powers of y dividing each: d - deg u
    ey = min(d1 - (len(u1) - 1), d2 - (len(u2) - 1))
    g = upoly_gcd(UniPoly(u1, "s"), UniPoly(u2, "s"))
    deg = g.degree + ey
    # homogenise g(s) * y^ey:  x^k y^(deg-k) for s^k
    out = [0] * (deg + 1)
    for k, c in enumerate(g.coeffs):
        out[deg - k] = c
    return out


# ---------------------------------------------------------------------------
# FLINT conversion and factorisation over Q(params)
# ---------------------------------------------------------------------------


def _clear(coeffs, field: BaseField):
    """Common denominator (a params polynomial, or an fmpq when no params)."""
    if field.ctx is None:
        den = 1
        for c in coeffs:
            c = fmpq(c)
            den = den * int(c.q) // _gcd(den, int(c.q))
        return den
    den = field._one_poly
    for c in coeffs:
        c = field(c)
        if c.den != 1:
            g = den.gcd(c.den)
            den = den * (c.den / g)
    return den


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _ctx_for(field: BaseField, nvars):
    names = tuple(f"_v{i}" for i in range(nvars)) + field.params
    return flint.fmpq_mpoly_ctx.get(names, "lex")


def _to_flint(poly_terms, field: BaseField, nvars):
    """``{exps: coeff}`` over the base field -> fmpq_mpoly with denominators cleared."""
    ctx = _ctx_for(field, nvars)
    den = _clear(list(poly_terms.values()), field)
    out = {}
    npar = len(field.params)
    for exps, c in poly_terms.items():
        if is_syntactic_zero(c):
            continue
        if field.ctx is None:
            out[tuple(exps) + ()] = fmpq(c) * den
            continue
        c = field(c)
        scaled = c.num * (den / c.den)
        for pexps, pc in scaled.to_dict().items():
            key = tuple(exps) + tuple(pexps)
            out[key] = out.get(key, 0) + pc
    return ctx.from_dict(out) if out else ctx.constant(0)


def _from_flint(poly, field: BaseField, nvars):
    """fmpq_mpoly in (vars, params) -> ``{exps: coeff}`` over the base field."""
    out = {}
    for exps, c in poly.to_dict().items():
        vexp, pexp = tuple(int(e) for e in exps[:nvars]), tuple(int(e) for e in exps[nvars:])
        if field.ctx is None:
            out[vexp] = out.get(vexp, 0) + fmpq(c)
        else:
            term = field.ctx.from_dict({pexp: c})
            out.setdefault(vexp, field._zero_poly)
            out[vexp] = out[vexp] + term
    if field.ctx is not None:
        out = {k: RatFunc(field, v, field._one_poly) for k, v in out.items()}
    return out


def factor_over_base(coeffs, field: BaseField):
    """Irreducible factorisation of a univariate polynomial over ``Q(params)``.

    Returns a list of ``(monic coefficient list, multiplicity)``; factors
    not involving the variable (contents) are dropped.
    """
    coeffs = p_trim(coeffs)
    if len(coeffs) < 2:
        return []
    poly = _to_flint({(k,): c for k, c in enumerate(coeffs)}, field, 1)
    _content, facs = poly.factor()
    out = []
    for fac, mult in facs:
        terms = _from_flint(fac, field, 1)
        deg = max(k[0] for k in terms)
        if deg < 1:
            continue
        lst = [terms.get((k,), 0) for k in range(deg + 1)]
        out.append((p_monic(lst), int(mult)))
    out.sort(key=lambda fm: (len(fm[0]), p_text(fm[0], "s")))
    return out


def rational_roots(coeffs, field: BaseField):
    """Roots in ``Q`` of a univariate polynomial over ``Q(params)``."""
    roots = []
    for fac, _m in factor_over_base(coeffs, field):
        if len(fac) != 2:
            continue
        r = -fac[0]
        if isinstance(r, RatFunc):
            r = r.constant_value()
            if r is None:
                continue
        roots.append(fmpq(r))
    return roots


# ---------------------------------------------------------------------------
# characteristic polynomials and rationality
# ---------------------------------------------------------------------------


def _base_matrix(e):
    """Regular representation of ``e`` as a matrix over the base field."""
    if not isinstance(e, AlgElem):
        return [[e]]
    lvl = e.level
    inner = lvl.mult_matrix(e)
    d = lvl.degree
    blocks = [[_base_matrix(lvl.parent(inner[i][j]) if not isinstance(lvl.parent, BaseField) else inner[i][j]) for j in range(d)] for i in range(d)]
    size = len(blocks[0][0])
    n = d * size
    out = [[0] * n for _ in range(n)]
    for i in range(d):
        for j in range(d):
            blk = blocks[i][j]
            for a in range(size):
                for b in range(size):
                    out[i * size + a][j * size + b] = blk[a][b]
    return out


def charpoly_over_base(e):
    """Characteristic polynomial (monic, lowest degree first) of ``e`` over the base.

    Uses the Faddeev--LeVerrier recursion, valid in characteristic zero.
    """
    m = _base_matrix(e)
    n = len(m)
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    mk = [[0] * n for _ in range(n)]
    ck = 1
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{n-k+1} I
        if k == 1:
            mk = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        else:
            prod = _matmul(m, mk)
            mk = [[prod[i][j] + (ck if i == j else 0) for j in range(n)] for i in range(n)]
        am = _matmul(m, mk)
        tr = 0
        for i in range(n):
            tr = tr + am[i][i]
        ck = -tr * fmpq(1, k)
        coeffs[n - k] = ck
    return coeffs


def _matmul(a, b):
    n = len(a)
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for k in range(n):
            aik = a[i][k]
            if is_syntactic_zero(aik):
                continue
            row = b[k]
            for j in range(n):
                if not is_syntactic_zero(row[j]):
                    out[i][j] = out[i][j] + aik * row[j]
    return out


def _base_of(e):
    lvl = level_of(e)
    return lvl.base if lvl is not None else base_field()


def rational_value(e):
    """The rational number equal to ``e``, or ``None`` if ``e`` is not rational.

    For algebraic elements the candidates are the rational roots of the
    characteristic polynomial over the base; each is confirmed with an exact
    zero test (which may split the level if the answer differs by branch).
    """
    if isinstance(e, (int, fmpq)):
        return fmpq(e)
    if isinstance(e, RatFunc):
        return e.constant_value()
    field = e.level.base
    for r in rational_roots(charpoly_over_base(e), field):
        if is_zero(e - r):
            return r
    return None


# ---------------------------------------------------------------------------
# root decomposition
# ---------------------------------------------------------------------------


@dataclass
class RootInfo:
    """One root of a homogeneous polynomial.

    ``factor`` is the monic defining polynomial (over ``factor_level``) of the
    Galois orbit that ``point`` represents when it is a generic root; for
    rational points it is linear.  ``orbit_degree`` counts the conjugate
    points this entry stands for (1 after a complete decomposition).
    """

    point: ProjPoint
    multiplicity: int
    factor: tuple
    factor_level: object
    orbit_degree: int

    @property
    def factor_degree(self) -> int:
        return len(self.factor) - 1

    def factor_text(self) -> str:
        if self.point.is_infinity:
            return "1"
        return p_text(self.factor, "s")


def _coeff_level(hc):
    lvl = None
    for c in hc:
        lvl = join_levels(lvl, level_of(c))
    return lvl


def _split_factor(phi, level):
    """Irreducible factors over the base; identity above it."""
    if level is None or isinstance(level, BaseField):
        field = level if level is not None else base_field()
        out = []
        for fac, _m in factor_over_base(phi, field):
            out.append(fac)
        return out
    return [p_monic(phi)]


def root_decompose(h, complete=True, level=None):
    """Linear-factor decomposition of a homogeneous polynomial.

    Parameters
    ----------
    h : sequence or Jet2
        Homogeneous polynomial, either a coefficient list (entry ``j`` is
        the coefficient of ``x^(d-j) y^j``) or a homogeneous exact jet.
    complete : bool
        If true every root is made explicit, adjoining algebraic levels
        recursively; otherwise each irreducible factor contributes one entry
        whose point is the generic root of that factor.
    level : tower level, optional
        Field over which ``h`` is regarded (defaults to the level of its
        coefficients).

    Returns
    -------
    list of RootInfo
        Sorted by (factor degree, canonical text).
    """
    if not isinstance(h, (list, tuple)):
        d = h.max_degree()
        hc = hom_coeffs(h.terms, d)
    else:
        hc = list(h)
    d = len(hc) - 1
    if all(is_zero(c) for c in hc):
        raise ValueError("root_decompose of the zero polynomial")
    level = join_levels(level, _coeff_level(hc))
    u = dehomogenize(hc)
    out = []
    inf_mult = d - (len(u) - 1)
    if inf_mult:
        out.append(RootInfo(ProjPoint(1, 0), inf_mult, (1,), level, 1))
    for g, mult in squarefree_decomposition(UniPoly(u, "s")):
        for phi in _split_factor(list(g.coeffs), level):
            out.extend(_roots_of_factor(phi, level, mult, complete))
    out.sort(key=lambda r: (r.factor_degree, r.point.text()))
    return out


def _roots_of_factor(phi, level, mult, complete):
    if len(phi) == 2:
        return [RootInfo(ProjPoint(-phi[0], 1), mult, tuple(phi), level, 1)]
    parent = level if level is not None else base_field()
    new = AlgebraicLevel(parent, phi)
    w = new.gen
    if not complete:
        return [RootInfo(ProjPoint(w, 1), mult, tuple(phi), parent, len(phi) - 1)]
    out = [RootInfo(ProjPoint(w, 1), mult, tuple(phi), parent, 1)]
    # cofactor phi(s) / (s - w) over the new level
    lifted = [new(c) for c in phi]
    cof, rem = p_divmod(lifted, [-w, 1])
    if rem:
        raise ArithmeticError("internal: generator is not a root of its factor")
    out.extend(_roots_of_factor(p_monic(cof), new, mult, complete))
    return out
