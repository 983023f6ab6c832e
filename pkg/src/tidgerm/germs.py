"""Germs of vector fields and tangent-to-the-identity maps of the plane.

The generator of a map ``F = id + F_{k+1} + ...`` is the unique formal field
``X`` of order ``>= 2`` with ``exp X = F``.  Both directions are computed
degree by degree: if ``T_n = X^n(g) / n!`` for a coordinate function ``g``,
then ``[T_n]_d`` only involves homogeneous parts of ``X`` of degree
``< d`` as soon as ``n >= 2``, so

``[exp X]_d = X_d(g) + sum_{n >= 2} [T_n]_d``

determines ``X_d`` from ``F_d`` and the already known lower parts.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from flint import fmpq

from .algebra.field import BaseField, base_field, is_syntactic_zero, is_zero, join_levels, level_of, to_text
from .algebra.jet import Jet2, _mul_terms, from_hom_coeffs, hom_coeffs
from .algebra.roots import ProjPoint, RootInfo, homog_eval, root_decompose
from .errors import (
    DicriticalMap,
    InsufficientPrecision,
    NotExact,
    NotTangentToIdentity,
)

__all__ = [
    "VectorField",
    "Diffeo",
    "ProjPoint",
    "CharDirection",
    "FixedCurves",
    "order",
    "exp",
    "log",
    "log_adaptive",
    "characteristic_directions",
    "fixed_curves",
]


class VectorField:
    """``A(x, y) d/dx + B(x, y) d/dy`` with components sharing one precision."""

    __slots__ = ("A", "B")

    def __init__(self, A: Jet2, B: Jet2):
        if A.prec != B.prec:
            p = min(q for q in (A.prec, B.prec) if q is not None)
            A, B = A.truncate(p), B.truncate(p)
        self.A = A
        self.B = B

    @property
    def prec(self):
        return self.A.prec

    @property
    def is_exact(self) -> bool:
        return self.A.prec is None

    def truncate(self, n) -> "VectorField":
        return VectorField(self.A.truncate(n), self.B.truncate(n))

    def order(self):
        """Least degree of a nonzero coefficient; ``None`` for the zero field."""
        degs = sorted({i + j for i, j in self.A.terms} | {i + j for i, j in self.B.terms})
        for d in degs:
            if any(not is_zero(c) for c in hom_coeffs(self.A.terms, d)):
                return d
            if any(not is_zero(c) for c in hom_coeffs(self.B.terms, d)):
                return d
        if self.is_exact:
            return None
        raise InsufficientPrecision("all certified coefficients vanish")

    def homogeneous(self, d):
        return self.A.homogeneous(d), self.B.homogeneous(d)

    def p_poly(self, m=None):
        """Coefficients of ``x B_m - y A_m`` (degree ``m + 1``), ``m`` = order by default."""
        if m is None:
            m = self.order()
        a, b = self.homogeneous(m)
        return _x_minus_y(b, a)

    def linear_part(self):
        """``[[a10, a01], [b10, b01]]``."""
        if self.prec is not None and self.prec < 1:
            raise InsufficientPrecision("linear part not certified")
        return [
            [self.A.terms.get((1, 0), 0), self.A.terms.get((0, 1), 0)],
            [self.B.terms.get((1, 0), 0), self.B.terms.get((0, 1), 0)],
        ]

    def value_at_origin(self):
        return self.A.coeff(0, 0), self.B.coeff(0, 0)

    def apply(self, f: Jet2) -> Jet2:
        """Lie derivative ``X(f)``."""
        return self.A * f.deriv_x() + self.B * f.deriv_y()

    def __add__(self, other):
        return VectorField(self.A + other.A, self.B + other.B)

    def __sub__(self, other):
        return VectorField(self.A - other.A, self.B - other.B)

    def scale(self, s) -> "VectorField":
        return VectorField(self.A.scale(s), self.B.scale(s))

    def multiply(self, f: Jet2) -> "VectorField":
        return VectorField(self.A * f, self.B * f)

    def divide(self, f: Jet2) -> "VectorField":
        return VectorField(self.A.divide(f), self.B.divide(f))

    def agrees_with(self, other: "VectorField", upto=None) -> bool:
        return self.A.agrees_with(other.A, upto) and self.B.agrees_with(other.B, upto)

    def level(self):
        lvl = None
        for c in list(self.A.terms.values()) + list(self.B.terms.values()):
            lvl = join_levels(lvl, level_of(c))
        return lvl

    def text(self, names=("x", "y")) -> str:
        return f"({self.A.text(names)})*d{names[0]} + ({self.B.text(names)})*d{names[1]}"

    def __str__(self):
        return self.text()

    def __repr__(self):
        return f"VectorField({self.text()})"


def _x_minus_y(b, a):
    """Homogeneous coefficients of ``x*b - y*a`` for same-degree parts ``a, b``."""
    m = len(a) - 1
    out = [0] * (m + 2)
    for j in range(m + 1):
        out[j] = out[j] + b[j]
        out[j + 1] = out[j + 1] - a[j]
    return out


class Diffeo:
    """A germ of map ``(x, y) -> (F1, F2)``.

    Components are either truncated jets, or exact: each exact component is
    a quotient ``N / D`` of polynomials with ``D(0) != 0`` (``D = 1`` for a
    polynomial map).  Exactness is required by :func:`fixed_curves` and is
    preserved by blow-ups.
    """

    __slots__ = ("fx", "fy", "rational", "_cache")

    def __init__(self, fx: Jet2 = None, fy: Jet2 = None, rational=None):
        self.rational = rational
        self._cache = {}
        if rational is not None:
            (nx, dx), (ny, dy) = rational
            for n, d in rational:
                if not (n.is_exact and d.is_exact):
                    raise ValueError("exact components need exact numerators and denominators")
                if is_zero(d.terms.get((0, 0), 0)):
                    raise ValueError("denominator must be a unit at the origin")
            if _is_one(dx) and _is_one(dy):
                fx, fy = nx, ny
        self.fx = fx
        self.fy = fy

    @classmethod
    def from_polynomials(cls, px: Jet2, py: Jet2) -> "Diffeo":
        one = Jet2.const(1)
        if px.is_exact and py.is_exact:
            return cls(px, py, rational=((px, one), (py, one)))
        return cls(px, py)

    @property
    def is_exact(self) -> bool:
        return self.rational is not None

    @property
    def is_polynomial(self) -> bool:
        return self.is_exact and self.fx is not None and self.fx.is_exact

    @property
    def prec(self):
        if self.is_exact:
            return None
        return min(self.fx.prec, self.fy.prec)

    def jet(self, n: int):
        """Components truncated at total degree ``n``."""
        if n in self._cache:
            return self._cache[n]
        if self.is_polynomial:
            out = (self.fx.truncate(n), self.fy.truncate(n))
        elif self.is_exact:
            comps = []
            for num, den in self.rational:
                if _is_one(den):
                    comps.append(num.truncate(n))
                else:
                    comps.append((num.truncate(n) * den.invert_unit(n)).truncate(n))
            out = tuple(comps)
        else:
            if n > self.prec:
                raise InsufficientPrecision(f"map known to degree {self.prec}, degree {n} requested")
            out = (self.fx.truncate(n), self.fy.truncate(n))
        self._cache[n] = out
        return out

    def minus_identity(self, n: int):
        fx, fy = self.jet(n)
        return fx - Jet2.x(), fy - Jet2.y()

    def linear_part(self):
        fx, fy = self.jet(1)
        return [[fx.coeff(1, 0), fx.coeff(0, 1)], [fy.coeff(1, 0), fy.coeff(0, 1)]]

    def fixes_origin(self) -> bool:
        fx, fy = self.jet(0)
        return is_zero(fx.coeff(0, 0)) and is_zero(fy.coeff(0, 0))

    def is_tangent_to_identity(self) -> bool:
        if not self.fixes_origin():
            return False
        lp = self.linear_part()
        return is_zero(lp[0][0] - 1) and is_zero(lp[1][1] - 1) and is_zero(lp[0][1]) and is_zero(lp[1][0])

    def order(self, max_degree: int = 64):
        """``k + 1``: order of ``F - id``; ``None`` for the identity."""
        if not self.is_tangent_to_identity():
            raise NotTangentToIdentity("linear part is not the identity")
        if self.is_polynomial:
            return VectorField(self.fx - Jet2.x(), self.fy - Jet2.y()).order()
        if self.is_exact:
            # exact identity test on numerators: N - g*D
            (nx, dx), (ny, dy) = self.rational
            gx = nx - Jet2.x() * dx
            gy = ny - Jet2.y() * dy
            if gx.is_zero() and gy.is_zero():
                return None
            # the order of N - gD equals the order of F - g since D is a unit
            return VectorField(gx, gy).order()
        gx, gy = self.minus_identity(self.prec)
        return VectorField(gx, gy).order()

    def level(self):
        lvl = None
        for comp in self._components():
            for c in comp.terms.values():
                lvl = join_levels(lvl, level_of(c))
        return lvl

    def _components(self):
        if self.is_exact:
            return [j for pair in self.rational for j in pair]
        return [self.fx, self.fy]

    def text(self, names=("x", "y")) -> str:
        if self.is_polynomial:
            return f"({self.fx.text(names)}, {self.fy.text(names)})"
        if self.is_exact:
            parts = []
            for num, den in self.rational:
                if _is_one(den):
                    parts.append(num.text(names))
                else:
                    parts.append(f"({num.text(names)})/({den.text(names)})")
            return "(" + ", ".join(parts) + ")"
        return f"({self.fx.text(names)}, {self.fy.text(names)})"

    def __repr__(self):
        return f"Diffeo{self.text()}"


def _is_one(j: Jet2) -> bool:
    return j.is_exact and set(j.terms) <= {(0, 0)} and is_zero(j.terms.get((0, 0), 0) - 1)


def order(obj):
    """Order of a vector field, or ``k + 1`` for a tangent-to-identity map."""
    if isinstance(obj, Diffeo):
        return obj.order()
    return obj.order()


# ---------------------------------------------------------------------------
# exp / log
# ---------------------------------------------------------------------------


class _Graded:
    """Homogeneous parts of ``T_n = X^n(g)/n!`` built degree by degree."""

    def __init__(self, g):
        # T[n][e] -> terms dict; T_0 = g is homogeneous of degree 1
        self.T = {0: {1: {g: 1}}}
        self._d = {}

    def deriv(self, n, e):
        key = (n, e)
        if key not in self._d:
            t = self.T.get(n, {}).get(e)
            if not t:
                self._d[key] = ({}, {})
            else:
                dx = {(i - 1, j): i * c for (i, j), c in t.items() if i > 0}
                dy = {(i, j - 1): j * c for (i, j), c in t.items() if j > 0}
                self._d[key] = (dx, dy)
        return self._d[key]

    def higher_part(self, d, A, B):
        """``sum_{n >= 2} [T_n]_d`` given parts ``A[j], B[j]`` for ``j < d``; stores them."""
        total = {}
        for n in range(2, d):
            acc = {}
            for j in range(2, d - n + 2):
                e = d - j + 1
                hx, hy = self.deriv(n - 1, e)
                for part, h in ((A.get(j), hx), (B.get(j), hy)):
                    if part and h:
                        for k, v in _mul_terms(part, h, None).items():
                            acc[k] = acc[k] + v if k in acc else v
            scale = fmpq(1, n)
            acc = {k: v * scale for k, v in acc.items() if not is_syntactic_zero(v)}
            if acc:
                self.T.setdefault(n, {})[d] = acc
                for k, v in acc.items():
                    total[k] = total[k] + v if k in total else v
        return total

    def set_first(self, d, part):
        if part:
            self.T.setdefault(1, {})[d] = dict(part)


def _hom_parts(j: Jet2, lo, hi):
    parts = {d: {} for d in range(lo, hi + 1)}
    for (i, k), c in j.terms.items():
        d = i + k
        if d < lo:
            if not is_zero(c):
                raise ValueError("unexpected low-degree term")
            continue
        if d <= hi:
            parts[d][(i, k)] = c
    return parts


def exp(X: VectorField, N: int) -> Diffeo:
    """Degree-``N`` jet of the time-one map of a field of order ``>= 2``.

    Examples
    --------
    >>> from tidgerm.algebra.jet import Jet2
    >>> x, y = Jet2.x(), Jet2.y()
    >>> exp(VectorField(x * x, Jet2.zero()), 3).text()
    '(x + x^2 + x^3 + O(4), y + O(4))'
    """
    if X.prec is not None and X.prec < N:
        raise InsufficientPrecision(f"field known to degree {X.prec}, degree {N} requested")
    A = _hom_parts(X.A, 2, N)
    B = _hom_parts(X.B, 2, N)
    for dct, comp in ((A, X.A), (B, X.B)):
        for (i, k), c in comp.terms.items():
            if i + k < 2 and not is_zero(c):
                raise ValueError("exp requires a field of order >= 2")
    gx, gy = _Graded((1, 0)), _Graded((0, 1))
    out_x, out_y = {(1, 0): 1}, {(0, 1): 1}
    for d in range(2, N + 1):
        hx = gx.higher_part(d, A, B)
        hy = gy.higher_part(d, A, B)
        gx.set_first(d, A[d])
        gy.set_first(d, B[d])
        for out, first, higher in ((out_x, A[d], hx), (out_y, B[d], hy)):
            for k, v in first.items():
                out[k] = out[k] + v if k in out else v
            for k, v in higher.items():
                out[k] = out[k] + v if k in out else v
    return Diffeo(Jet2(out_x, N), Jet2(out_y, N))


def log(F: Diffeo, N: int) -> VectorField:
    """Degree-``N`` jet of the infinitesimal generator of ``F``.

    Examples
    --------
    >>> from tidgerm.algebra.jet import Jet2
    >>> x, y = Jet2.x(), Jet2.y()
    >>> log(Diffeo.from_polynomials(x + x * x, y), 4).A.text()
    'x^2 - x^3 + 3/2*x^4 + O(5)'
    """
    if not F.is_tangent_to_identity():
        raise NotTangentToIdentity("log needs a map tangent to the identity")
    fx, fy = F.jet(N)
    G = (fx - Jet2.x(), fy - Jet2.y())
    GX = _hom_parts(G[0], 2, N)
    GY = _hom_parts(G[1], 2, N)
    A, B = {}, {}
    gx, gy = _Graded((1, 0)), _Graded((0, 1))
    for d in range(2, N + 1):
        hx = gx.higher_part(d, A, B)
        hy = gy.higher_part(d, A, B)
        ad = dict(GX[d])
        for k, v in hx.items():
            ad[k] = ad[k] - v if k in ad else -v
        bd = dict(GY[d])
        for k, v in hy.items():
            bd[k] = bd[k] - v if k in bd else -v
        A[d] = {k: v for k, v in ad.items() if not is_syntactic_zero(v)}
        B[d] = {k: v for k, v in bd.items() if not is_syntactic_zero(v)}
        gx.set_first(d, A[d])
        gy.set_first(d, B[d])
    ta, tb = {}, {}
    for d in range(2, N + 1):
        ta.update(A[d])
        tb.update(B[d])
    return VectorField(Jet2(ta, N), Jet2(tb, N))


def log_adaptive(F: Diffeo, action, start=None, max_order=64):
    """Run ``action(log(F, N), N)`` for ``N = start, 2 start, ...`` until it
    stops raising :class:`InsufficientPrecision`.

    ``start`` defaults to ``4 (k + 1)``.  Returns ``(result, N)``.
    """
    if start is None:
        start = 4 * (F.order() or 1)
    n = start
    while True:
        try:
            return action(log(F, n), n), n
        except InsufficientPrecision:
            if 2 * n > max_order:
                raise
            n *= 2


# ---------------------------------------------------------------------------
# characteristic directions and fixed curves
# ---------------------------------------------------------------------------


@dataclass
class CharDirection:
    """A characteristic direction with its multiplicity and degeneracy flag."""

    point: ProjPoint
    multiplicity: int
    degenerate: bool
    root: RootInfo = dc_field(repr=False)

    def text(self) -> str:
        flag = "degenerate" if self.degenerate else "non-degenerate"
        return f"{self.point.text()} multiplicity {self.multiplicity} {flag}"


def leading_part(F: Diffeo):
    """``(k + 1, p_{k+1}, q_{k+1})`` with homogeneous coefficient lists."""
    k1 = F.order()
    if k1 is None:
        raise NotTangentToIdentity("the identity has no characteristic directions")
    gx, gy = F.minus_identity(k1)
    return k1, gx.homogeneous(k1), gy.homogeneous(k1)


def characteristic_polynomial(F: Diffeo):
    """Coefficients of ``x q_{k+1} - y p_{k+1}``."""
    _k1, p, q = leading_part(F)
    return _x_minus_y(q, p)


def characteristic_directions(F: Diffeo, complete: bool = True):
    """Zeros of ``x q_{k+1} - y p_{k+1}`` with degeneracy flags.

    Raises
    ------
    DicriticalMap
        If the polynomial vanishes identically.
    """
    _k1, p, q = leading_part(F)
    h = _x_minus_y(q, p)
    if all(is_zero(c) for c in h):
        raise DicriticalMap("x q_{k+1} - y p_{k+1} vanishes identically")
    out = []
    for r in root_decompose(h, complete=complete):
        a, b = r.point.a, r.point.b
        degenerate = is_zero(homog_eval(p, a, b)) and is_zero(homog_eval(q, a, b))
        out.append(CharDirection(r.point, r.multiplicity, degenerate, r))
    return out


@dataclass
class FixedCurves:
    """Local fixed locus of an exact map.

    ``g`` is the local part (factors through the origin) of
    ``gcd(F1 - x, F2 - y)``, with multiplicities, so that it is the
    singular-locus factor of the generator; ``factors`` lists its irreducible
    factors with multiplicities and :attr:`curve` is the reduced equation;
    ``tangents`` are the zeros of the lowest homogeneous part.
    """

    g: Jet2
    factors: list
    tangents: list

    @property
    def is_unit(self) -> bool:
        return not self.factors

    @property
    def curve(self) -> Jet2:
        """Reduced equation of the fixed locus (product of distinct factors)."""
        out = Jet2.const(1)
        for fac, _mult in self.factors:
            out = out * fac
        return out

    def tangent_to(self, v: ProjPoint) -> bool:
        if self.is_unit:
            return False
        e = self.g.order()
        hc = self.g.homogeneous(e)
        return is_zero(homog_eval(hc, v.a, v.b))

    def factors_tangent_to(self, v: ProjPoint):
        out = []
        for fac, mult in self.factors:
            e = fac.order()
            if is_zero(homog_eval(fac.homogeneous(e), v.a, v.b)):
                out.append((fac, mult))
        return out

    def text(self, names=("x", "y")) -> str:
        return self.g.text(names)


def _poly_gcd_local(p1: Jet2, p2: Jet2, field: BaseField):
    """Local part of ``gcd(p1, p2)`` over ``Q(params)`` with its factorisation."""
    from .algebra.roots import _from_flint, _to_flint

    f1 = _to_flint(p1.terms, field, 2)
    f2 = _to_flint(p2.terms, field, 2)
    if f1.is_zero() and f2.is_zero():
        raise ValueError("the identity map fixes every point")
    g = f1.gcd(f2)
    _content, facs = g.factor()
    factors = []
    for fac, mult in facs:
        terms = _from_flint(fac, field, 2)
        if all(k == (0, 0) for k in terms):
            continue  # content in the parameters
        if is_zero(terms.get((0, 0), 0)):
            jet = Jet2(terms)
            # normalise: lowest-degree part has leading coefficient 1
            e = jet.order()
            lead = next(c for c in jet.homogeneous(e) if not is_zero(c))
            jet = jet.scale(1 / lead if not isinstance(lead, int) else fmpq(1, lead))
            factors.append((jet, int(mult)))
    factors.sort(key=lambda fm: fm[0].text())
    g_loc = Jet2.const(1)
    for fac, mult in factors:
        for _ in range(mult):
            g_loc = g_loc * fac
    return g_loc, factors


def fixed_curves(F: Diffeo) -> FixedCurves:
    """Fixed curves through the origin of an exact map.

    Examples
    --------
    >>> from tidgerm.algebra.jet import Jet2
    >>> x, y = Jet2.x(), Jet2.y()
    >>> fc = fixed_curves(Diffeo.from_polynomials(x + y * y, y + y * y))
    >>> fc.g.text(), fc.curve.text()
    ('y^2', 'y')
    """
    if not F.is_exact:
        raise NotExact("fixed curves need an exact map, not a truncation")
    lvl = F.level()
    if lvl is not None and not isinstance(lvl, BaseField):
        raise NotExact("fixed curves are computed over the base field only")
    field = lvl if lvl is not None else base_field()
    (nx, dx), (ny, dy) = F.rational
    g1 = nx - Jet2.x() * dx
    g2 = ny - Jet2.y() * dy
    g, factors = _poly_gcd_local(g1, g2, field)
    tangents = []
    if factors:
        e = g.order()
        tangents = [r.point for r in root_decompose(g.homogeneous(e), complete=True)]
    return FixedCurves(g, factors, tangents)
