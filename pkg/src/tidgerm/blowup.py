"""Blow-ups of plane germs and resolution of vector fields.

Charts
------
A point of the exceptional divisor ``E`` of the blow-up of the origin is
described by a :class:`DivisorPoint`:

* ``chart_t`` with coordinate ``tau``: ``(x, u) -> (x, x (tau + u))``,
  ``E = {x = 0}``; the direction ``[1:tau]``.
* ``chart_s`` with coordinate ``sigma``: ``(u, y) -> (y (sigma + u), y)``,
  ``E = {y = 0}``; the direction ``[sigma:1]``.

Directions ``[1:0]`` use ``chart_t`` at ``tau = 0`` and every other
direction ``[a:1]`` uses ``chart_s`` at ``sigma = a``, so each divisor point
has exactly one chart representation.

Precision
---------
If a component is certified to total degree ``P``, its pull-back is certified
on the whole slices ``x^a`` (resp. ``y^a``) with ``a <= P``; after dividing by
``x^e`` the result is certified to total degree ``P - e``.  The transform of a
field therefore loses ``1 + l`` degrees, where ``x^l`` is the saturating
factor.

Resolution trees
----------------
:func:`resolve` blows up strictly singular points of saturated transforms
until every point is non-singular or reduced.  A node stands for a Galois
orbit of conjugate points when its centre is the generic root of an
irreducible factor; :attr:`TreeNode.conjugates` counts the points it
represents.  The full transform at a node is
``x^a y^b f X`` where ``X`` is the stored saturated field, ``a, b`` the
multiplicities of the divisor axes and ``f`` the strict transform of the
non-divisor part of the singular locus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Optional

from flint import fmpq

from .algebra.field import (
    AlgebraicLevel,
    BaseField,
    base_field,
    inv,
    is_syntactic_zero,
    is_zero,
    level_of,
    p_monic,
    p_text,
    to_text,
)
from .algebra.jet import Jet2, hom_coeffs
from .algebra.roots import ProjPoint, dehomogenize, homog_eval, homog_gcd, rational_value, root_decompose
from .algebra.upoly import UniPoly
from .errors import DepthExceeded, InsufficientPrecision, NotExact, NotInvariantDirection, ZeroDivisorSplit
from .germs import Diffeo, VectorField, _poly_gcd_local

__all__ = [
    "DivisorPoint",
    "SingularityClass",
    "Saturation",
    "AxisInfo",
    "TreeNode",
    "ResolutionTree",
    "SeparatrixDescriptor",
    "pullback",
    "blow_up_vf",
    "saturated_transform",
    "strict_transform",
    "blow_up_diffeo",
    "saturate",
    "is_dicritical",
    "classify_singularity",
    "resolve",
    "invariant_branch",
    "enumerate_separatrices",
    "strict_separatrices",
    "contains_saddle_node",
    "second_type",
]

NON_SINGULAR = "NonSingular"
NON_DEGENERATE = "ReducedNonDegenerate"
SADDLE_NODE = "ReducedSaddleNode"
NOT_REDUCED = "NotReduced"


# ---------------------------------------------------------------------------
# divisor points and chart substitutions
# ---------------------------------------------------------------------------


@dataclass
class DivisorPoint:
    """A point of the exceptional divisor in its chart."""

    chart: str
    coordinate: object
    corner: bool = False

    def __post_init__(self):
        if self.chart not in ("chart_t", "chart_s"):
            raise ValueError(f"unknown chart {self.chart!r}")

    @classmethod
    def from_direction(cls, v: ProjPoint, corner: bool = False) -> "DivisorPoint":
        if v.is_infinity:
            return cls("chart_t", 0, corner)
        return cls("chart_s", v.a, corner)

    @property
    def direction(self) -> ProjPoint:
        if self.chart == "chart_t":
            return ProjPoint(1, 0) if is_zero(self.coordinate) else ProjPoint(inv(self.coordinate), 1)
        return ProjPoint(self.coordinate, 1)

    @property
    def names(self):
        """Coordinate names in the chart."""
        return ("x", "u") if self.chart == "chart_t" else ("u", "y")

    def text(self) -> str:
        var = "t" if self.chart == "chart_t" else "s"
        return f"{var}={to_text(self.coordinate)}"


def _binomial_rows(c, n):
    """Coefficient lists of ``(c + u)^j`` for ``j <= n``."""
    rows = [[1]]
    for _ in range(n):
        prev = rows[-1]
        nxt = [0] * (len(prev) + 1)
        for k, a in enumerate(prev):
            if not is_syntactic_zero(c):
                nxt[k] = nxt[k] + c * a
            nxt[k + 1] = nxt[k + 1] + a
        rows.append(nxt)
    return rows


def pullback(f: Jet2, p: DivisorPoint, shift: int = 0) -> Jet2:
    """``(f o pi) / E^shift`` in the chart coordinates of ``p``.

    ``E`` is the chart's divisor coordinate (``x`` for ``chart_t``, ``y``
    for ``chart_s``).  The division must be exact.
    """
    out_prec = None if f.prec is None else f.prec - shift
    if out_prec is not None and out_prec < 0:
        raise InsufficientPrecision("not enough precision for the chart substitution")
    t_chart = p.chart == "chart_t"
    nmax = max((j if t_chart else i for i, j in f.terms), default=0)
    rows = _binomial_rows(p.coordinate, nmax)
    slices = {}
    for (i, j), coef in f.terms.items():
        a = i + j
        power = j if t_chart else i
        kmax = len(rows[power]) - 1
        if out_prec is not None:
            kmax = min(kmax, out_prec - (a - shift))
        for k in range(kmax + 1):
            b = rows[power][k]
            if is_syntactic_zero(b):
                continue
            key = (a, k)
            val = coef * b if not (isinstance(b, int) and b == 1) else coef
            slices[key] = slices[key] + val if key in slices else val
    terms = {}
    for (a, k), v in slices.items():
        if a < shift:
            if not is_zero(v):
                raise ArithmeticError("pull-back is not divisible by the divisor equation")
            continue
        if is_syntactic_zero(v):
            continue
        terms[(a - shift, k) if t_chart else (k, a - shift)] = v
    return Jet2(terms, out_prec)


def _chart_unit(p: DivisorPoint) -> Jet2:
    """``c + u`` in the chart coordinates."""
    key = (0, 1) if p.chart == "chart_t" else (1, 0)
    return Jet2({(0, 0): p.coordinate, key: 1})


def blow_up_vf(X: VectorField, p: DivisorPoint, ell: int = 0) -> VectorField:
    """Transform of ``X`` at ``p`` divided by ``E^ell``.

    With ``ell = 0`` this is the full transform ``X_q`` (``d pi X_q = X``);
    its precision is ``prec(X) - 1 - ell``.

    Examples
    --------
    >>> from tidgerm.algebra.jet import Jet2
    >>> x, y = Jet2.x(), Jet2.y()
    >>> X = VectorField(x, y.scale(2))
    >>> blow_up_vf(X, DivisorPoint("chart_t", 0)).text(("x", "u"))
    '(x)*dx + (u)*du'
    """
    w = _chart_unit(p)
    if p.chart == "chart_t":
        a0 = pullback(X.A, p)
        b0 = pullback(X.B, p)
        trans = _shift_down(b0 - w * a0, 1 + ell, p)
        first = _shift_down(a0, ell, p)
        return VectorField(first, trans)
    a0 = pullback(X.A, p)
    b0 = pullback(X.B, p)
    trans = _shift_down(a0 - w * b0, 1 + ell, p)
    second = _shift_down(b0, ell, p)
    return VectorField(trans, second)


def _shift_down(j: Jet2, e: int, p: DivisorPoint) -> Jet2:
    """Divide a chart jet by ``E^e`` (exactly)."""
    if e == 0:
        return j
    idx = 0 if p.chart == "chart_t" else 1
    terms = {}
    for key, v in j.terms.items():
        if key[idx] < e:
            if not is_zero(v):
                raise ArithmeticError("transform is not divisible by the divisor equation")
            continue
        nk = (key[0] - e, key[1]) if idx == 0 else (key[0], key[1] - e)
        terms[nk] = v
    return Jet2(terms, None if j.prec is None else j.prec - e)


def saturated_transform(X: VectorField, p: DivisorPoint, ell: Optional[int] = None) -> VectorField:
    """Transform divided by ``E^l`` with ``l = m - 1`` (``m`` if dicritical).

    ``m`` is the order of ``X``; for a saturated ``X`` the result is the
    saturation of the transform.

    Examples
    --------
    >>> from tidgerm.algebra.jet import Jet2
    >>> x, y = Jet2.x(), Jet2.y()
    >>> X = VectorField(x * x, y * y)
    >>> saturated_transform(X, DivisorPoint("chart_t", 0)).text(("x", "u"))
    '(x)*dx + (-u + u^2)*du'
    """
    if ell is None:
        m = X.order()
        ell = m if is_dicritical(X) else m - 1
    return blow_up_vf(X, p, ell)


def strict_transform(f: Jet2, p: DivisorPoint) -> Jet2:
    """``(f o pi) / E^{ord f}`` for an exact polynomial ``f``."""
    e = f.order()
    if e is None:
        raise ValueError("strict transform of the zero polynomial")
    return pullback(f, p, e)


# ---------------------------------------------------------------------------
# maps
# ---------------------------------------------------------------------------


def _clearing_constant(j: Jet2, flint_poly, fld):
    """The constant ``s`` with ``flint_poly = s * j``."""
    from .algebra.roots import _from_flint

    back = _from_flint(flint_poly, fld, 2)
    key = next(k for k, c in j.terms.items() if not is_zero(c))
    return back[key] / j.terms[key]


def _reduce_fraction(num: Jet2, den: Jet2):
    """Cancel common polynomial factors (base level only) and make ``den(0) = 1``."""
    lvl = None
    for c in list(num.terms.values()) + list(den.terms.values()):
        l2 = level_of(c)
        if l2 is not None:
            lvl = l2
            if not isinstance(l2, BaseField):
                break
    if lvl is None or isinstance(lvl, BaseField):
        from .algebra.roots import _from_flint, _to_flint

        fld = lvl if lvl is not None else base_field()
        fn = _to_flint(num.terms, fld, 2)
        fd = _to_flint(den.terms, fld, 2)
        g = fn.gcd(fd)
        if not g.is_zero():
            qn, rn = divmod(fn, g)
            qd, rd = divmod(fd, g)
            if rn.is_zero() and rd.is_zero():
                # numerator and denominator were cleared by different constants
                scale = _clearing_constant(num, fn, fld) / _clearing_constant(den, fd, fld)
                num = Jet2(_from_flint(qn, fld, 2)).scale(inv(scale))
                den = Jet2(_from_flint(qd, fld, 2))
    d0 = den.terms.get((0, 0), 0)
    if is_zero(d0):
        raise NotInvariantDirection("transformed map has a pole at the centre")
    s = inv(d0)
    return num.scale(s), den.scale(s)


def blow_up_diffeo(F: Diffeo, p: DivisorPoint) -> Diffeo:
    """Transform ``F_q`` with ``pi o F_q = F o pi`` near the divisor point ``p``.

    Exact maps (polynomial or rational with unit denominators) stay exact;
    truncated maps lose one degree of precision.

    Raises
    ------
    NotInvariantDirection
        If the linear part of ``F`` does not fix the direction of ``p``.

    Examples
    --------
    >>> from tidgerm.algebra.jet import Jet2
    >>> x, y = Jet2.x(), Jet2.y()
    >>> G = blow_up_diffeo(Diffeo.from_polynomials(x + x * x, y), DivisorPoint("chart_t", 0))
    >>> G.text(("x", "t"))
    '(x + x^2, (t)/(1 + x))'
    """
    if not F.fixes_origin():
        raise NotInvariantDirection("the map does not fix the origin")
    c = p.coordinate
    t_chart = p.chart == "chart_t"
    if F.is_exact:
        (n1, d1), (n2, d2) = F.rational
        if not t_chart:
            (n1, d1), (n2, d2) = (n2, d2), (n1, d1)
        # now n1/d1 is the component along the chart's divisor coordinate
        n1p, d1p = pullback(n1, p), pullback(d1, p)
        n2s, d2p = pullback(n2, p, 1), pullback(d2, p)
        n1s = pullback(n1, p, 1)
        num = n2s * d1p - (d2p * n1s).scale(c) if not is_syntactic_zero(c) else n2s * d1p
        den = d2p * n1s
        if is_zero(den.terms.get((0, 0), 0)):
            raise NotInvariantDirection("the linear part maps the direction off the chart")
        if not is_zero(num.terms.get((0, 0), 0)):
            raise NotInvariantDirection("the direction is not invariant by the linear part")
        num, den = _reduce_fraction(num, den)
        d_comp = (n1p, d1p)
        u_comp = (num, den)
        rational = (d_comp, u_comp) if t_chart else (u_comp, d_comp)
        return Diffeo(rational=rational)
    fx, fy = F.fx, F.fy
    if not t_chart:
        fx, fy = fy, fx
    xp = pullback(fx, p)
    xs = pullback(fx, p, 1)
    ys = pullback(fy, p, 1)
    if is_zero(xs.coeff(0, 0)):
        raise NotInvariantDirection("the linear part maps the direction off the chart")
    t1 = ys * xs.invert_unit()
    u1 = t1 - Jet2.const(c) if not is_syntactic_zero(c) else t1
    if not is_zero(u1.coeff(0, 0)):
        raise NotInvariantDirection("the direction is not invariant by the linear part")
    u1 = Jet2({k: v for k, v in u1.terms.items() if k != (0, 0)}, u1.prec)
    prec = min(xp.prec, u1.prec)
    xp, u1 = xp.truncate(prec), u1.truncate(prec)
    return Diffeo(xp, u1) if t_chart else Diffeo(u1, xp)


# ---------------------------------------------------------------------------
# saturation and local classification
# ---------------------------------------------------------------------------


@dataclass
class Saturation:
    """``X = f * field`` with ``field`` saturated."""

    f: Jet2
    field: VectorField
    strictly_singular: bool
    local_factors: list = dc_field(default_factory=list)

    @property
    def local_part(self) -> Jet2:
        out = Jet2.const(1)
        for fac, mult in self.local_factors:
            for _ in range(mult):
                out = out * fac
        return out


def _lowest_part(j: Jet2):
    e = j.order()
    if e is None:
        return None
    return j.homogeneous(e)


def _is_base_level(X: VectorField) -> bool:
    lvl = X.level()
    return lvl is None or isinstance(lvl, BaseField)


def saturate(X: VectorField, locus: Optional[Jet2] = None) -> Saturation:
    """Split ``X = f * Xbar`` with ``Xbar`` saturated.

    Parameters
    ----------
    X : VectorField
        Exact field, or a jet.
    locus : Jet2, optional
        Exact equation of the singular locus when it is known (e.g. from the
        fixed curves of the map generated by ``X``); ``X`` is divided by it.

    Raises
    ------
    InsufficientPrecision
        For a jet without a known locus whose lowest-order parts share a
        factor: saturation cannot be certified from finitely many terms.

    Examples
    --------
    >>> from tidgerm.algebra.jet import Jet2
    >>> x, y = Jet2.x(), Jet2.y()
    >>> s = saturate(VectorField(x * x, x * y))
    >>> s.f.text(), s.field.text()
    ('x', '(x)*dx + (y)*dy')
    """
    if X.A.is_zero() and X.B.is_zero() and X.is_exact:
        raise ValueError("the zero field has no saturation")
    if locus is not None:
        bar = X.divide(locus)
        factors = []
        if _is_base_level(VectorField(locus, locus)) and locus.order():
            _g, factors = _poly_gcd_local(locus, locus, _field_of(locus))
        return Saturation(locus, bar, _strictly_singular(bar), factors)
    if X.is_exact and _is_base_level(X):
        fld = _field_of_field(X)
        if X.A.is_zero() or X.B.is_zero():
            g = X.B if X.A.is_zero() else X.A
        else:
            from .algebra.roots import _from_flint, _to_flint

            fa = _to_flint(X.A.terms, fld, 2)
            fb = _to_flint(X.B.terms, fld, 2)
            g = Jet2(_from_flint(fa.gcd(fb), fld, 2))
        g = _normalize_poly(g)
        bar = X.divide(g)
        _gl, factors = _poly_gcd_local(g, g, fld) if g.order() else (None, [])
        return Saturation(g, bar, _strictly_singular(bar), factors)
    la, lb = _lowest_part(X.A), _lowest_part(X.B)
    if la is None or lb is None:
        raise InsufficientPrecision("saturation of a field with a vanishing component cannot be certified")
    h = homog_gcd(la, lb)
    if len(h) > 1:
        raise InsufficientPrecision("lowest-order parts share a factor; saturation cannot be certified")
    return Saturation(Jet2.const(1), X, _strictly_singular(X), [])


def _field_of(j: Jet2) -> BaseField:
    for c in j.terms.values():
        lvl = level_of(c)
        if lvl is not None:
            return lvl
    return base_field()


def _field_of_field(X: VectorField) -> BaseField:
    lvl = X.level()
    return lvl if lvl is not None else base_field()


def _normalize_poly(g: Jet2) -> Jet2:
    """Scale so that the first nonzero coefficient of the lowest part is 1."""
    e = g.order()
    lead = next(c for c in g.homogeneous(e) if not is_zero(c))
    return g.scale(inv(lead))


def _strictly_singular(X: VectorField) -> bool:
    a, b = X.value_at_origin()
    return is_zero(a) and is_zero(b)


def is_dicritical(X: VectorField) -> bool:
    """True iff ``x B_m - y A_m`` vanishes, ``m`` the order of ``X``.

    Examples
    --------
    >>> from tidgerm.algebra.jet import Jet2
    >>> x, y = Jet2.x(), Jet2.y()
    >>> is_dicritical(VectorField(x, y)), is_dicritical(VectorField(x * x, y * y))
    (True, False)
    """
    return all(is_zero(c) for c in X.p_poly())


@dataclass
class SingularityClass:
    """Local type of a saturated field at the origin."""

    tag: str
    eigenvalues: Optional[tuple] = None
    trace: object = None
    det: object = None

    @property
    def reduced(self) -> bool:
        return self.tag in (NON_DEGENERATE, SADDLE_NODE)

    def text(self) -> str:
        if self.eigenvalues is None:
            return self.tag
        ev = ", ".join(to_text(e) for e in self.eigenvalues)
        return f"{self.tag} ({ev})"


def _is_rational_square(q) -> bool:
    q = fmpq(q)
    if q < 0:
        return False
    p, d = int(q.p), int(q.q)
    return math.isqrt(p) ** 2 == p and math.isqrt(d) ** 2 == d


def classify_singularity(X: VectorField) -> SingularityClass:
    """Classify a saturated field at the origin.

    Reduced means ``lambda_1 != 0`` and ``lambda_2 / lambda_1`` not a positive
    rational; a saddle-node has exactly one zero eigenvalue.  The ratio test
    uses ``kappa = tr^2 / det = rho + 2 + 1/rho``: ``rho`` is a positive
    rational iff ``kappa`` is rational, ``kappa >= 4`` and
    ``kappa (kappa - 4)`` is a rational square.

    Examples
    --------
    >>> from tidgerm.algebra.jet import Jet2
    >>> x, y = Jet2.x(), Jet2.y()
    >>> classify_singularity(VectorField(x, -y)).tag
    'ReducedNonDegenerate'
    >>> classify_singularity(VectorField(x * x, y)).tag
    'ReducedSaddleNode'
    >>> classify_singularity(VectorField(x, y.scale(2))).tag
    'NotReduced'
    """
    a, b = X.value_at_origin()
    if not (is_zero(a) and is_zero(b)):
        return SingularityClass(NON_SINGULAR)
    (a10, a01), (b10, b01) = X.linear_part()
    tr = a10 + b01
    det = a10 * b01 - a01 * b10
    triangular = is_zero(a01) or is_zero(b10)
    if is_zero(det):
        if is_zero(tr):
            return SingularityClass(NOT_REDUCED, (0, 0), tr, det)
        return SingularityClass(SADDLE_NODE, (tr, 0), tr, det)
    eig = (a10, b01) if triangular else None
    kappa = tr * tr * inv(det)
    r = rational_value(kappa)
    if r is not None and r >= 4 and _is_rational_square(r * (r - 4)):
        return SingularityClass(NOT_REDUCED, eig, tr, det)
    return SingularityClass(NON_DEGENERATE, eig, tr, det)


# ---------------------------------------------------------------------------
# resolution tree
# ---------------------------------------------------------------------------


@dataclass
class AxisInfo:
    """A divisor component along a coordinate axis of a node.

    ``component`` is ``"D"``-style for components given with the input and
    ``"E<n>"`` for the component created by blowing up node ``n``.
    """

    component: str
    invariant: bool
    multiplicity: int
    created: bool

    def to_dict(self):
        return {
            "component": self.component,
            "invariant": self.invariant,
            "multiplicity": self.multiplicity,
            "created": self.created,
        }


@dataclass
class TreeNode:
    """One (orbit of) point(s) studied during the resolution."""

    id: int
    parent: Optional[int]
    depth: int
    point: Optional[DivisorPoint]
    factor: tuple
    factor_level: object
    orbit_degree: int
    conjugates: int
    field: VectorField
    locus: Jet2
    axes: tuple
    singularity: SingularityClass = None
    order: Optional[int] = None
    dicritical: bool = False
    ell: Optional[int] = None
    children: list = dc_field(default_factory=list)
    restriction_check: Optional[bool] = None

    @property
    def names(self):
        return self.point.names if self.point is not None else ("x", "y")

    @property
    def corner(self) -> bool:
        """On two divisor components."""
        return self.axes[0] is not None and self.axes[1] is not None

    @property
    def tree_corner(self) -> bool:
        """On two components created by the resolution."""
        return all(ax is not None and ax.created for ax in self.axes)

    @property
    def is_leaf(self) -> bool:
        return not self.children and not self.dicritical

    def chart_text(self) -> str:
        return "root" if self.point is None else self.point.chart

    def center_text(self) -> str:
        return "" if self.point is None else self.point.text()

    def factor_text(self) -> str:
        if self.point is None or len(self.factor) <= 2:
            return ""
        var = "t" if self.point.chart == "chart_t" else "s"
        return p_text(self.factor, var)

    def to_dict(self) -> dict:
        sing = self.singularity
        return {
            "id": self.id,
            "parent": self.parent,
            "depth": self.depth,
            "chart": self.chart_text(),
            "center": self.center_text(),
            "orbit_factor": self.factor_text(),
            "orbit_degree": self.orbit_degree,
            "conjugates": self.conjugates,
            "class": sing.tag if sing else None,
            "eigenvalues": [to_text(e) for e in sing.eigenvalues] if sing and sing.eigenvalues else None,
            "order": self.order,
            "dicritical": self.dicritical,
            "axes": [ax.to_dict() if ax else None for ax in self.axes],
            "field": self.field.text(self.names),
            "locus": self.locus.text(self.names),
            "corner": self.corner,
            "children": list(self.children),
            "restriction_check": self.restriction_check,
        }


@dataclass
class ResolutionTree:
    """Nodes in discovery order; node 0 is the root."""

    nodes: list
    max_depth: int

    @property
    def root(self) -> TreeNode:
        return self.nodes[0]

    def __getitem__(self, i) -> TreeNode:
        return self.nodes[i]

    def leaves(self, under: Optional[int] = None):
        ids = self.subtree(under) if under is not None else range(len(self.nodes))
        return [self.nodes[i] for i in ids if self.nodes[i].is_leaf]

    def subtree(self, nid: int):
        out = [nid]
        stack = list(reversed(self.nodes[nid].children))
        while stack:
            c = stack.pop()
            out.append(c)
            stack.extend(reversed(self.nodes[c].children))
        return sorted(out)

    def path(self, nid: int):
        """Node ids from the root down to ``nid``."""
        out = []
        cur = nid
        while cur is not None:
            out.append(cur)
            cur = self.nodes[cur].parent
        return out[::-1]

    @property
    def depth(self) -> int:
        return max(n.depth for n in self.nodes)

    def to_dict(self) -> dict:
        return {"max_depth": self.max_depth, "depth": self.depth, "nodes": [n.to_dict() for n in self.nodes]}

    def to_dot(self, name: str = "resolution") -> str:
        """Graphviz rendering; labels show chart, centre, class and eigenvalues."""
        lines = [f"digraph {name} {{", "  node [shape=box, fontname=monospace];"]
        for n in self.nodes:
            parts = [f"#{n.id} {n.chart_text()}"]
            if n.point is not None:
                parts.append(n.center_text())
            if n.factor_text():
                parts.append(f"orbit of {n.factor_text()} ({n.conjugates} points)")
            sing = n.singularity
            tag = "Dicritical" if n.dicritical else sing.tag
            parts.append(tag)
            if sing.eigenvalues is not None and not n.dicritical:
                parts.append("eigenvalues " + ", ".join(to_text(e) for e in sing.eigenvalues))
            label = "\\n".join(_dot_escape(p) for p in parts)
            lines.append(f'  n{n.id} [label="{label}"];')
        for n in self.nodes:
            for c in n.children:
                lines.append(f"  n{n.id} -> n{c};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def _locus_at(f: Jet2) -> Jet2:
    """Drop a locus that does not pass through the origin."""
    if f.order() == 0:
        return Jet2.const(1)
    return f


def _local_factors(f: Jet2):
    if f.order() == 0:
        return []
    if not _is_base_level(VectorField(f, f)):
        return [(f, 1)]
    _g, facs = _poly_gcd_local(f, f, _field_of(f))
    return facs


class _Builder:
    def __init__(self, max_depth):
        self.nodes = []
        self.max_depth = max_depth

    def add(self, **kw) -> TreeNode:
        node = TreeNode(id=len(self.nodes), **kw)
        self.nodes.append(node)
        return node

    def classify(self, node: TreeNode):
        node.singularity = classify_singularity(node.field)
        if node.singularity.tag == NOT_REDUCED:
            self.expand(node)

    def expand(self, node: TreeNode, only: Optional[ProjPoint] = None):
        if node.depth >= self.max_depth:
            raise DepthExceeded(f"resolution deeper than {self.max_depth} blow-ups at node {node.id}")
        X = node.field
        m = X.order()
        node.order = m
        P = X.p_poly(m)
        dic = all(is_zero(c) for c in P)
        node.dicritical = dic
        node.ell = m if dic else m - 1
        if dic:
            am, _bm = X.homogeneous(m)
            g = am[: m]  # A_m = x * g, g of degree m - 1
            P1 = X.p_poly(m + 1)
            h = homog_gcd(g, P1) if any(not is_zero(c) for c in g) else list(P1)
        else:
            h = P
        if only is not None:
            items = [(only, (1,), level_of(only.a), 1)]
        elif len(h) <= 1:
            items = []
        else:
            items = [(r.point, r.factor, r.factor_level, r.orbit_degree) for r in root_decompose(h, complete=False)]
        self.run_orbits(node, items, P, dic)

    def run_orbits(self, node, items, P, dic):
        pending = list(items)
        while pending:
            point, factor, flevel, odeg = pending.pop(0)
            mark = len(self.nodes)
            nchild = len(node.children)
            lvl = point.level if odeg > 1 else None
            try:
                self.make_child(node, point, factor, flevel, odeg, P, dic)
            except ZeroDivisorSplit as exc:
                if lvl is None or exc.level is not lvl:
                    raise
                del self.nodes[mark:]
                del node.children[nchild:]
                parent_level = lvl.parent
                new = []
                for phi in exc.factors:
                    phi = list(phi)
                    if len(phi) == 2:
                        new.append((ProjPoint(-phi[0], 1), tuple(phi), parent_level, 1))
                    else:
                        sub = AlgebraicLevel(parent_level, phi)
                        new.append((ProjPoint(sub.gen, 1), tuple(phi), parent_level, len(phi) - 1))
                pending[0:0] = new

    def make_child(self, node, point, factor, flevel, odeg, P, dic):
        dp = DivisorPoint.from_direction(point)
        Xq = blow_up_vf(node.field, dp, node.ell)
        e_f = node.locus.order() or 0
        mult_a = node.axes[0].multiplicity if node.axes[0] else 0
        mult_b = node.axes[1].multiplicity if node.axes[1] else 0
        emult = mult_a + mult_b + e_f + node.ell
        new_e = AxisInfo(f"E{node.id}", not dic, emult, True)
        at_zero = is_zero(dp.coordinate)
        if dp.chart == "chart_t":
            axes = (new_e, node.axes[1] if at_zero else None)
        else:
            axes = (node.axes[0] if at_zero else None, new_e)
        dp.corner = axes[0] is not None and axes[1] is not None
        locus = _locus_at(strict_transform(node.locus, dp)) if e_f else Jet2.const(1)
        check = None
        if not dic:
            check = _restriction_check(Xq, dp, P)
        child = self.add(
            parent=node.id,
            depth=node.depth + 1,
            point=dp,
            factor=tuple(factor),
            factor_level=flevel,
            orbit_degree=odeg,
            conjugates=node.conjugates * odeg,
            field=Xq,
            locus=locus,
            axes=axes,
            restriction_check=check,
        )
        node.children.append(child.id)
        self.classify(child)


def _restriction_check(Xq: VectorField, dp: DivisorPoint, P) -> bool:
    """Compare the divisor-transverse component on ``E`` with ``P_X``."""
    c = dp.coordinate
    if dp.chart == "chart_t":
        # P_X(1, t), t = c + u
        coeffs = [P[j] for j in range(len(P))]  # P_X(1, t) = sum_j P[j] t^j
        expected = UniPoly(coeffs, "u").taylor_shift(c)
        got, prec = Xq.B.along_y_axis()
    else:
        # -P_X(s, 1), s = c + u
        coeffs = [-x for x in dehomogenize(P)]
        expected = UniPoly(coeffs, "u").taylor_shift(c)
        got, prec = Xq.A.along_x_axis()
    top = max(len(got), len(expected.coeffs))
    if prec is not None:
        top = min(top, prec + 1)
    for k in range(top):
        a = got[k] if k < len(got) else 0
        if not is_zero(a - expected[k]):
            return False
    return True


def resolve(
    X: VectorField,
    max_depth: int = 16,
    locus: Optional[Jet2] = None,
    axes=(None, None),
    only: Optional[ProjPoint] = None,
) -> ResolutionTree:
    """Seidenberg resolution of a singular field.

    Parameters
    ----------
    X : VectorField
        Exact polynomial field or a jet (a truncated generator).
    max_depth : int
        Maximal number of successive blow-ups.
    locus : Jet2, optional
        Exact equation of the singular locus of ``X`` (needed to saturate a
        jet whose components share a factor).
    axes : pair of AxisInfo or None
        Divisor components along ``{x = 0}`` and ``{y = 0}`` given with the
        input (their equations must not be part of ``locus``).
    only : ProjPoint, optional
        Blow up the root and study only the point in this direction (no
        blow-up happens when the saturated root is regular).

    Raises
    ------
    DepthExceeded
        If some branch needs more than ``max_depth`` blow-ups.
    InsufficientPrecision
        If a jet input is too short; callers retry with a longer jet.

    Examples
    --------
    >>> from tidgerm.algebra.jet import Jet2
    >>> x, y = Jet2.x(), Jet2.y()
    >>> tree = resolve(VectorField(x * x, y * y))
    >>> [n.singularity.tag for n in tree.leaves()]
    ['ReducedNonDegenerate', 'ReducedNonDegenerate']
    >>> [n.center_text() for n in tree.nodes if n.dicritical]
    ['s=1']
    """
    sat = saturate(X, locus)
    b = _Builder(max_depth)
    root = b.add(
        parent=None,
        depth=0,
        point=None,
        factor=(1,),
        factor_level=None,
        orbit_degree=1,
        conjugates=1,
        field=sat.field,
        locus=_locus_at(sat.local_part) if sat.local_factors else Jet2.const(1),
        axes=tuple(axes),
    )
    root.singularity = classify_singularity(root.field)
    if only is not None:
        if root.singularity.tag != NON_SINGULAR:
            b.expand(root, only=only)
    elif root.singularity.tag == NOT_REDUCED:
        b.expand(root)
    tree = ResolutionTree(b.nodes, max_depth)
    tree.root_factors = sat.local_factors
    tree.root_input = X
    return tree


# ---------------------------------------------------------------------------
# separatrices
# ---------------------------------------------------------------------------


@dataclass
class SeparatrixDescriptor:
    """A (Galois orbit of) separatrix branch(es) read off a resolution tree.

    ``node`` is the leaf carrying the branch (the dicritical node for a
    dicritical family, the root for non-strict separatrices), ``branch`` the
    local index (``-1`` for a dicritical family).  ``count`` is the number
    of conjugate branches represented, ``None`` meaning infinitely many.
    ``direction`` is the tangent at the leaf in leaf coordinates.
    """

    node: int
    branch: int
    kind: str
    strength: Optional[str]
    fixed: bool
    in_divisor: bool
    component: Optional[str] = None
    direction: Optional[ProjPoint] = None
    eigenvalue: object = None
    transverse_eigenvalue: object = None
    count: Optional[int] = 1
    smooth: bool = True
    first_point: Optional[int] = None
    first_conjugates: int = 1
    curve: Optional[Jet2] = None

    @property
    def free(self) -> bool:
        return not self.in_divisor

    def to_dict(self) -> dict:
        return {
            "node": self.node,
            "branch": self.branch,
            "kind": self.kind,
            "strength": self.strength,
            "fixed": self.fixed,
            "in_divisor": self.in_divisor,
            "component": self.component,
            "direction": self.direction.text() if self.direction is not None else None,
            "eigenvalue": to_text(self.eigenvalue) if self.eigenvalue is not None else None,
            "count": self.count,
            "smooth": self.smooth,
        }


def invariant_branch(X: VectorField, v: ProjPoint, n: int):
    """Invariant smooth curve of ``X`` tangent to the eigen-direction ``v``.

    Returns ``(gx, gy, prec)``: coefficient lists (in ``s``) of a
    parametrisation ``s -> (gx(s), gy(s))`` with one coordinate equal to
    ``s``, certified through degree ``prec <= n``.  Requires the linear part
    to have ``v`` as eigen-direction with eigenvalue ``kappa`` and the other
    eigenvalue ``mu`` with ``mu - j kappa != 0`` for ``j >= 2`` (true at
    reduced points).
    """
    (a10, a01), (b10, b01) = X.linear_part()
    swap = v.is_infinity
    if swap:
        # work with (y, x) so that the direction becomes [0:1]
        A, B = X.B, X.A
        A = Jet2({(j, i): c for (i, j), c in A.terms.items()}, A.prec)
        B = Jet2({(j, i): c for (i, j), c in B.terms.items()}, B.prec)
        a10, a01, b10, b01 = b01, b10, a01, a10
        a = 0
    else:
        A, B = X.A, X.B
        a = v.a
    kappa = b10 * a + b01
    mu = a10 - a * b10
    if not is_zero(a10 * a + a01 - a * kappa):
        raise ValueError("direction is not an eigen-direction of the linear part")
    top = n if X.prec is None else min(n, X.prec)
    phi = [0, a]
    for k in range(2, top + 1):
        phi.append(0)
        r = _series_residual(A, B, phi, k)
        den = mu - k * kappa
        if is_zero(den):
            raise ArithmeticError("resonant eigenvalues: no smooth invariant graph")
        phi[k] = r * inv(k * kappa - mu) if not is_syntactic_zero(r) else 0
    s = [0, 1]
    if swap:
        return s, phi, top
    return phi, s, top


def _compose(j: Jet2, gx, gy, top):
    """Coefficients of ``j(gx(s), gy(s))`` through degree ``top``."""
    out = [0] * (top + 1)
    pow_x = _powers(gx, top, max((i for i, _ in j.terms), default=0))
    pow_y = _powers(gy, top, max((k for _, k in j.terms), default=0))
    for (i, k), c in j.terms.items():
        if i + k > top:
            continue
        prod = _mul_trunc(pow_x[i], pow_y[k], top)
        for d, v in enumerate(prod):
            if not is_syntactic_zero(v):
                out[d] = out[d] + c * v
    return out


def _powers(g, top, n):
    out = [[1]]
    for _ in range(n):
        out.append(_mul_trunc(out[-1], g, top))
    return out


def _mul_trunc(a, b, top):
    out = [0] * min(len(a) + len(b) - 1, top + 1)
    for i, ai in enumerate(a):
        if i > top or is_syntactic_zero(ai):
            continue
        for k, bk in enumerate(b):
            if i + k > top:
                break
            if not is_syntactic_zero(bk):
                out[i + k] = out[i + k] + ai * bk
    return out


def _series_residual(A, B, phi, k):
    """Coefficient of ``s^k`` in ``A(phi, s) - phi' B(phi, s)``."""
    s = [0, 1]
    ca = _compose(A, phi, s, k)
    cb = _compose(B, phi, s, k)
    dphi = [i * phi[i] for i in range(1, len(phi))]
    val = ca[k]
    for i, d in enumerate(dphi):
        if i > k:
            break
        if not is_syntactic_zero(d) and k - i < len(cb):
            val = val - d * cb[k - i]
    return val


def _linear_branches(X: VectorField):
    """Eigen-directions of the linear part with their eigenvalues."""
    (a10, a01), (b10, b01) = X.linear_part()
    plin = [b10, b01 - a10, -a01]
    out = []
    for r in root_decompose(plin, complete=True):
        v = r.point
        if v.is_infinity:
            lam = a10
        else:
            lam = b10 * v.a + b01
        out.append((v, lam))
    return out


def _axis_direction(idx: int) -> ProjPoint:
    return ProjPoint(0, 1) if idx == 0 else ProjPoint(1, 0)


def _first_point(tree: ResolutionTree, nid: int):
    path = tree.path(nid)
    if len(path) < 2:
        return None, 1
    n1 = tree[path[1]]
    return n1.id, n1.conjugates


def _smooth_path(tree: ResolutionTree, nid: int) -> bool:
    return not any(tree[i].tree_corner for i in tree.path(nid))


def _branch_fixed(node: TreeNode, v: ProjPoint, X: VectorField) -> bool:
    """Whether the free branch at ``node`` tangent to ``v`` lies in the locus."""
    f = node.locus
    if f.order() == 0:
        return False
    for h, _m in _local_factors(f):
        e = h.order()
        if not is_zero(homog_eval(h.homogeneous(e), v.a, v.b)):
            continue
        n = max(2 * h.max_degree() + 2, 8)
        try:
            gx, gy, top = invariant_branch(X, v, n)
        except (ArithmeticError, InsufficientPrecision):
            continue
        vals = _compose(h, gx, gy, top)
        if all(is_zero(c) for c in vals):
            return True
    return False


def enumerate_separatrices(tree: ResolutionTree):
    """Separatrix branches of the resolved field.

    Every reduced leaf contributes its two branches (strong when the
    eigenvalue along the branch is nonzero), a non-singular leaf its
    integral curve (strong), a dicritical node one infinite family, and the
    root one non-strict descriptor per non-invariant factor of the singular
    locus.
    """
    out = []
    for node in tree.nodes:
        if node.dicritical:
            fp, fc = _first_point(tree, node.id)
            if node.id == 0:
                fp = None
            out.append(
                SeparatrixDescriptor(
                    node=node.id,
                    branch=-1,
                    kind="strict",
                    strength="strong",
                    fixed=False,
                    in_divisor=False,
                    count=None,
                    smooth=_smooth_path(tree, node.id),
                    first_point=fp,
                    first_conjugates=fc,
                )
            )
            continue
        if not node.is_leaf:
            continue
        fp, fc = _first_point(tree, node.id)
        smooth_path = _smooth_path(tree, node.id)
        if node.singularity.tag == NON_SINGULAR:
            a, b = node.field.value_at_origin()
            v = ProjPoint(a, b)
            out.append(_descriptor(tree, node, 0, v, None, None, fp, fc, smooth_path))
            continue
        branches = _linear_branches(node.field)
        tr = node.singularity.trace
        for idx, (v, lam) in enumerate(branches):
            d = _descriptor(tree, node, idx, v, lam, tr - lam, fp, fc, smooth_path)
            out.append(d)
    out.extend(_non_strict(tree))
    return out


def _descriptor(tree, node, idx, v, lam, mu, fp, fc, smooth_path):
    comp = None
    in_div = False
    mult = 0
    for ai, ax in enumerate(node.axes):
        if ax is not None and ax.invariant and v == _axis_direction(ai):
            comp, in_div, mult = ax.component, True, ax.multiplicity
    strength = "strong" if lam is None or not is_zero(lam) else "weak"
    if in_div:
        fixed = mult > 0
        smooth = True
    else:
        fixed = _branch_fixed(node, v, node.field) if lam is not None else _regular_fixed(node)
        tangent_to_tree = any(
            ax is not None and ax.created and v == _axis_direction(ai) for ai, ax in enumerate(node.axes)
        )
        smooth = smooth_path and not tangent_to_tree
    return SeparatrixDescriptor(
        node=node.id,
        branch=idx,
        kind="strict",
        strength=strength,
        fixed=fixed,
        in_divisor=in_div,
        component=comp,
        direction=v,
        eigenvalue=lam,
        transverse_eigenvalue=mu,
        count=node.conjugates,
        smooth=smooth,
        first_point=fp if node.id != 0 else None,
        first_conjugates=fc,
    )


def _regular_fixed(node: TreeNode) -> bool:
    """Integral curve at a regular point: fixed iff the locus contains it."""
    f = node.locus
    if f.order() == 0:
        return False
    X = node.field
    for h, _m in _local_factors(f):
        try:
            X.apply(h).divide(h)
        except ArithmeticError:
            continue
        return True
    return False


def _non_strict(tree: ResolutionTree):
    out = []
    root = tree.root
    X = root.field
    for h, _m in getattr(tree, "root_factors", []) or []:
        try:
            X.apply(h).divide(h)
            continue  # invariant: a strict separatrix, found at the leaves
        except ArithmeticError:
            pass
        e = h.order()
        out.append(
            SeparatrixDescriptor(
                node=root.id,
                branch=-2,
                kind="non-strict",
                strength=None,
                fixed=True,
                in_divisor=False,
                smooth=(e == 1),
                curve=h,
            )
        )
    return out


def strict_separatrices(tree: ResolutionTree, seps=None):
    """Strict separatrices of the root field.

    Free branches at leaves plus, once each, the invariant divisor
    components given with the input (whose strength is read where their
    strict transform ends).  Returns a list of descriptors.
    """
    if seps is None:
        seps = enumerate_separatrices(tree)
    out = [s for s in seps if s.kind == "strict" and not s.in_divisor]
    for ai, ax in enumerate(tree.root.axes):
        if ax is None or ax.created or not ax.invariant:
            continue
        hits = [s for s in seps if s.in_divisor and s.component == ax.component]
        strength = "strong"
        node = tree.root.id
        for s in hits:
            node = s.node
            if s.strength == "weak":
                strength = "weak"
        out.append(
            SeparatrixDescriptor(
                node=node,
                branch=-3,
                kind="strict",
                strength=strength,
                fixed=ax.multiplicity > 0,
                in_divisor=True,
                component=ax.component,
                direction=_axis_direction(ai),
                count=1,
                smooth=True,
            )
        )
    return out


def separatrix_count(strict) -> Optional[int]:
    """Total number of strict separatrices (``None`` for infinitely many)."""
    total = 0
    for s in strict:
        if s.count is None:
            return None
        total += s.count
    return total


def contains_saddle_node(tree: ResolutionTree, under: Optional[int] = None):
    """``(found, leaf ids)`` of saddle-node leaves (below ``under`` if given)."""
    ids = [n.id for n in tree.leaves(under) if n.singularity.tag == SADDLE_NODE]
    return bool(ids), ids


def weak_in_divisor(tree: ResolutionTree, leaf: TreeNode, created_only: bool = True):
    """Descriptor of the weak branch of a saddle-node leaf if it lies in the divisor."""
    for v, lam in _linear_branches(leaf.field):
        if not is_zero(lam):
            continue
        for ai, ax in enumerate(leaf.axes):
            if ax is None or not ax.invariant or (created_only and not ax.created):
                continue
            if v == _axis_direction(ai):
                return ai, ax
    return None


def second_type(tree: ResolutionTree, under: Optional[int] = None, created_only: bool = True) -> bool:
    """No saddle-node leaf has its weak branch inside the (exceptional) divisor."""
    _found, ids = contains_saddle_node(tree, under)
    return not any(weak_in_divisor(tree, tree[i], created_only) for i in ids)
