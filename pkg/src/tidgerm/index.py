"""Camacho--Sad indices along smooth separatrices and their identities.

For a field ``A d/dx + B d/dy`` whose saturation along ``S = {y = 0}`` has
``B`` divisible by ``y``, the index is ``Res_0 B_y(x, 0) / A(x, 0)``; along
``{x = 0}`` the roles of the coordinates are exchanged.

For a smooth separatrix given by a formal parametrisation ``gamma`` the
index is computed without straightening coordinates: writing
``X(gamma) = h * gamma'``,

``CS(X, S) = Res_0 (tr DX)(gamma) / h  -  ord h``,

which does not change when ``X`` is multiplied by a function not vanishing
identically on ``S``.  Branches found at reduced leaves of a resolution are
parametrised there and pushed down through the chart maps.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional

from .algebra.field import AlgElem, AlgebraicLevel, inv, is_syntactic_zero, is_zero, p_text, to_text
from .algebra.jet import Jet2
from .algebra.roots import ProjPoint, root_decompose
from .algebra.upoly import laurent_residue
from .blowup import (
    NON_DEGENERATE,
    NON_SINGULAR,
    SADDLE_NODE,
    DivisorPoint,
    ResolutionTree,
    SeparatrixDescriptor,
    _compose,
    _linear_branches,
    _mul_trunc,
    blow_up_vf,
    classify_singularity,
    invariant_branch,
    is_dicritical,
    saturate,
    saturated_transform,
)
from .errors import Dicritical, InsufficientPrecision, PropertyViolation, SeparatrixNotStrict, ZeroDivisorSplit
from .germs import Diffeo, VectorField, fixed_curves, log_adaptive

__all__ = [
    "IndexValue",
    "cs_index",
    "cs_along_parametrization",
    "branch_cs_at_leaf",
    "separatrix_cs",
    "divisor_indices",
    "divisor_index_sum",
    "residual_index",
    "validate_index_properties",
    "trace_down",
]


@dataclass
class IndexValue:
    """An index value with what it refers to."""

    value: object
    separatrix: object
    field: str
    node: Optional[int] = None

    def text(self) -> str:
        return to_text(self.value)


# ---------------------------------------------------------------------------
# axes
# ---------------------------------------------------------------------------


def _axis_restrictions(X: VectorField, axis: str):
    """Along ``S``: (tangential component on S, d(normal component)/d(normal) on S, normal comp on S)."""
    A, B = X.A, X.B
    top = None if X.prec is None else X.prec
    if axis == "y":
        tang = {i: c for (i, j), c in A.terms.items() if j == 0}
        dnorm = {i: c for (i, j), c in B.terms.items() if j == 1}
        norm = {i: c for (i, j), c in B.terms.items() if j == 0}
    elif axis == "x":
        tang = {j: c for (i, j), c in B.terms.items() if i == 0}
        dnorm = {j: c for (i, j), c in A.terms.items() if i == 1}
        norm = {j: c for (i, j), c in A.terms.items() if i == 0}
    else:
        raise ValueError("axis must be 'x' or 'y'")
    return tang, dnorm, norm, top


def _as_list(d, n=None):
    if not d:
        return []
    m = max(d) if n is None else n
    return [d.get(k, 0) for k in range(m + 1)]


def _divide_axis(X: VectorField, axis: str) -> VectorField:
    """Divide both components by the axis equation as often as possible."""
    idx = 1 if axis == "y" else 0
    while True:
        comps = []
        for comp in (X.A, X.B):
            on_axis = [c for k, c in comp.terms.items() if k[idx] == 0]
            comps.append(all(is_zero(c) for c in on_axis))
        if not all(comps):
            return X
        if not X.is_exact:
            raise InsufficientPrecision("cannot certify the multiplicity of the axis in the singular locus")
        if X.A.is_zero() and X.B.is_zero():
            raise ValueError("zero field")

        def shift(j):
            return Jet2({(k[0] - (1 - idx), k[1] - idx): c for k, c in j.terms.items() if k[idx] > 0}, j.prec)

        X = VectorField(shift(X.A), shift(X.B))


def cs_index(X: VectorField, axis: str = "y", node: Optional[int] = None) -> IndexValue:
    """Camacho--Sad index of ``X`` along the coordinate axis ``{axis = 0}``.

    Parameters
    ----------
    X : VectorField
        Exact field or jet.  Powers of the axis equation dividing both
        components are removed first (exact fields only).
    axis : {'y', 'x'}
        ``'y'`` for ``S = {y = 0}``, ``'x'`` for ``S = {x = 0}``.

    Raises
    ------
    SeparatrixNotStrict
        If the axis is not invariant.
    InsufficientPrecision
        If the jet is too short for the residue.

    Examples
    --------
    >>> from tidgerm.algebra.jet import Jet2
    >>> x, y = Jet2.x(), Jet2.y()
    >>> cs_index(VectorField(x, y.scale(3))).text()
    '3'
    >>> cs_index(VectorField(x * x, y), axis="x").text()
    '0'
    """
    X = _divide_axis(X, axis)
    tang, dnorm, norm, top = _axis_restrictions(X, axis)
    if any(not is_zero(c) for c in norm.values()):
        raise SeparatrixNotStrict(f"the axis {{{axis} = 0}} is not invariant")
    if not any(not is_zero(c) for c in tang.values()):
        if top is None:
            raise SeparatrixNotStrict(f"the field vanishes on {{{axis} = 0}}")
        raise InsufficientPrecision("tangential component vanishes to the certified precision")
    numer = _as_list(dnorm, None if top is None else max(top - 1, 0))
    denom = _as_list(tang, top)
    value = laurent_residue(numer, denom, None if top is None else top - 1, top)
    return IndexValue(value, f"{{{axis}=0}}", X.text(), node)


# ---------------------------------------------------------------------------
# parametrised separatrices
# ---------------------------------------------------------------------------


def _series_div(a, b, top):
    """``a / b`` for series with ``b(0) != 0`` through degree ``top``."""
    b0i = inv(b[0])
    q = []
    for k in range(top + 1):
        acc = a[k] if k < len(a) else 0
        for j in range(1, k + 1):
            if j < len(b) and not is_syntactic_zero(b[j]):
                acc = acc - b[j] * q[k - j]
        q.append(acc * b0i)
    return q


def cs_along_parametrization(X: VectorField, gx, gy, top: int):
    """``Res (tr DX)(gamma)/h - ord h`` for ``X(gamma) = h gamma'``.

    ``gx, gy`` are coefficient lists certified through degree ``top`` with
    ``gamma(0) = 0`` and ``gamma'(0) != 0``.
    """
    dgx = [i * gx[i] for i in range(1, len(gx))]
    dgy = [i * gy[i] for i in range(1, len(gy))]
    use_x = bool(dgx) and not is_zero(dgx[0])
    if not use_x and not (dgy and not is_zero(dgy[0])):
        raise ValueError("parametrisation is not regular")
    P = X.prec
    ct = top if P is None else min(top, P)
    comp = X.A if use_x else X.B
    d = dgx if use_x else dgy
    xi = _compose(comp, gx, gy, ct)
    htop = min(ct, top - 1)
    h = _series_div(xi, d, htop)
    tr = X.A.deriv_x() + X.B.deriv_y()
    ntop = top if tr.prec is None else min(top, tr.prec)
    num = _compose(tr, gx, gy, ntop)
    m = None
    for k, c in enumerate(h):
        if not is_zero(c):
            m = k
            break
    if m is None:
        raise InsufficientPrecision("the field vanishes on the branch to the certified precision")
    res = laurent_residue(num, h, ntop, htop)
    return res - m


def branch_cs_at_leaf(X: VectorField, v: ProjPoint, n: int = 16):
    """Index of the branch of a reduced ``X`` tangent to the eigen-direction ``v``."""
    gx, gy, top = invariant_branch(X, v, n)
    return cs_along_parametrization(X, gx, gy, top)


def _leaf_gamma(tree: ResolutionTree, desc: SeparatrixDescriptor, n: int):
    leaf = tree[desc.node]
    if desc.direction is None:
        raise SeparatrixNotStrict("a dicritical family has no single index")
    if desc.branch == 0 and leaf.singularity.tag == NON_SINGULAR:
        raise SeparatrixNotStrict("integral curves at regular points are not parametrised here")
    return invariant_branch(leaf.field, desc.direction, n)


def _push_down(tree: ResolutionTree, nid: int, gx, gy, top):
    """Map a parametrised curve at node ``nid`` to the root coordinates."""
    cur = tree[nid]
    while cur.parent is not None:
        dp = cur.point
        c = dp.coordinate
        if dp.chart == "chart_t":
            w = list(gy) or [0]
            w[0] = w[0] + c
            gy = _mul_trunc(gx, w, top)
        else:
            w = list(gx) or [0]
            w[0] = w[0] + c
            gx = _mul_trunc(gy, w, top)
        cur = tree[cur.parent]
    return gx, gy


def separatrix_cs(tree: ResolutionTree, desc: SeparatrixDescriptor, n: int = 24) -> IndexValue:
    """Index of a smooth free branch, computed at the root field.

    The branch is parametrised at its leaf, pushed down to the root, and the
    parametrised residue formula is applied to the root field.
    """
    if not desc.smooth:
        raise SeparatrixNotStrict("indices are only computed along smooth separatrices")
    gx, gy, top = _leaf_gamma(tree, desc, n)
    gx, gy = _push_down(tree, desc.node, gx, gy, top)
    value = cs_along_parametrization(tree.root.field, gx, gy, top)
    return IndexValue(value, desc, tree.root.field.text(), desc.node)


def separatrix_cs_by_decrement(tree: ResolutionTree, desc: SeparatrixDescriptor, n: int = 24):
    """Leaf index plus one per blow-up along the branch (cross-check)."""
    leaf = tree[desc.node]
    if desc.direction is None:
        raise SeparatrixNotStrict("a dicritical family has no single index")
    local = branch_cs_at_leaf(leaf.field, desc.direction, n)
    return local + leaf.depth


# ---------------------------------------------------------------------------
# divisor indices and the sum rule
# ---------------------------------------------------------------------------


def trace_down(value, level, target):
    """Trace of ``value`` (in ``level``) down to ``target``."""
    lvl = level
    v = value
    while lvl is not None and lvl is not target and isinstance(lvl, AlgebraicLevel):
        v = lvl.trace(v)
        lvl = lvl.parent
    return v


def _e_axis(dp: DivisorPoint) -> str:
    return "x" if dp.chart == "chart_t" else "y"


def _with_splits(items, fn):
    """Run ``fn(point, factor, flevel, odeg)`` per orbit, re-running on splits."""
    pending = list(items)
    out = []
    while pending:
        point, factor, flevel, odeg = pending.pop(0)
        lvl = point.level if odeg > 1 else None
        try:
            out.append(fn(point, factor, flevel, odeg))
        except ZeroDivisorSplit as exc:
            if lvl is None or exc.level is not lvl:
                raise
            new = []
            for phi in exc.factors:
                phi = list(phi)
                if len(phi) == 2:
                    new.append((ProjPoint(-phi[0], 1), tuple(phi), lvl.parent, 1))
                else:
                    sub = AlgebraicLevel(lvl.parent, phi)
                    new.append((ProjPoint(sub.gen, 1), tuple(phi), lvl.parent, len(phi) - 1))
            pending[0:0] = new
    return out


@dataclass
class DivisorIndexRow:
    """Index of the divisor at one (orbit of) singular point(s)."""

    center: str
    factor: str
    conjugates: int
    value: object
    orbit_sum: object
    node: Optional[int] = None

    def to_dict(self):
        return {
            "center": self.center,
            "factor": self.factor,
            "conjugates": self.conjugates,
            "index": to_text(self.value),
            "orbit_sum": to_text(self.orbit_sum),
            "node": self.node,
        }


def divisor_indices(X: VectorField, locus=None):
    """Index of the exceptional divisor at each singular point after one blow-up.

    ``X`` must be non-dicritical.  Conjugate points are grouped by the
    irreducible factor of ``P_X`` defining them; ``orbit_sum`` is the trace
    of the index over the orbit.

    Raises
    ------
    Dicritical
        If ``X`` is dicritical.
    """
    sat = saturate(X, locus)
    Xb = sat.field
    if is_dicritical(Xb):
        raise Dicritical("the divisor is not invariant for a dicritical field")
    P = Xb.p_poly()
    items = [(r.point, r.factor, r.factor_level, r.orbit_degree) for r in root_decompose(P, complete=False)]

    def one(point, factor, flevel, odeg):
        dp = DivisorPoint.from_direction(point)
        Xq = saturated_transform(Xb, dp)
        val = cs_index(Xq, _e_axis(dp)).value
        total = val if odeg == 1 else point.level.trace(val)
        var = "t" if dp.chart == "chart_t" else "s"
        ftxt = p_text(factor, var) if len(factor) > 2 else ""
        return DivisorIndexRow(dp.text(), ftxt, odeg, val, total)

    return _with_splits(items, one)


def divisor_index_sum(X: VectorField, locus=None):
    """Sum of the divisor indices over all singular points (expected ``-1``)."""
    total = 0
    for row in divisor_indices(X, locus):
        total = total + row.orbit_sum
    return total


def tree_divisor_indices(tree: ResolutionTree, nid: int = 0):
    """Divisor indices at the children of a non-dicritical node of a tree."""
    node = tree[nid]
    rows = []
    for cid in node.children:
        ch = tree[cid]
        val = cs_index(ch.field, _e_axis(ch.point), node=cid).value
        total = _orbit_trace(ch, val)
        rows.append(DivisorIndexRow(ch.center_text(), ch.factor_text(), ch.orbit_degree, val, total, cid))
    return rows


def _orbit_trace(ch, val):
    if ch.orbit_degree == 1:
        return val
    lvl = ch.point.coordinate.level
    if not isinstance(val, AlgElem) or val.level is not lvl:
        val = lvl(val)
    return lvl.trace(val)


# ---------------------------------------------------------------------------
# residual index
# ---------------------------------------------------------------------------


def residual_index(F: Diffeo, axis: str = "y") -> IndexValue:
    """``iota(F, S) = CS(log F, S)`` along a coordinate axis.

    The generator is computed with adaptive precision; for an exact map its
    fixed curves are divided out first so the residue is taken on the
    saturation.

    Examples
    --------
    >>> from tidgerm.algebra.jet import Jet2
    >>> from tidgerm.blowup import blow_up_diffeo, DivisorPoint
    >>> x, y = Jet2.x(), Jet2.y()
    >>> G = blow_up_diffeo(Diffeo.from_polynomials(x + x * x, y), DivisorPoint("chart_t", 0))
    >>> residual_index(G, axis="x").text()
    '-1'
    """
    locus = None
    if F.is_exact:
        try:
            fc = fixed_curves(F)
            if not fc.is_unit:
                locus = fc.g
        except Exception:  # noqa: BLE001 - algebraic levels: fall back to jets
            locus = None

    def action(X, _n):
        Xb = X.divide(locus) if locus is not None else X
        return cs_index(Xb, axis)

    val, _n = log_adaptive(F, action)
    return val


# ---------------------------------------------------------------------------
# validation of the index identities
# ---------------------------------------------------------------------------


@dataclass
class IndexReport:
    """Outcome of :func:`validate_index_properties`."""

    checks: list = dc_field(default_factory=list)

    def add(self, name, ok, detail="", node=None):
        self.checks.append({"check": name, "ok": bool(ok), "detail": detail, "node": node})

    @property
    def ok(self) -> bool:
        return all(c["ok"] for c in self.checks)

    def to_dict(self):
        return {"ok": self.ok, "checks": self.checks}


def _regular_points(P, count=2):
    """A few rational points of the divisor (in chart_t) where ``P_X(1, t) != 0``."""
    out = []
    t = 2
    while len(out) < count and t < 50:
        val = 0
        for j, c in enumerate(P):
            val = val + c * t**j
        if not is_zero(val):
            out.append(t)
        t += 1
    return out


def validate_index_properties(tree: ResolutionTree, strict: bool = True, n: int = 24) -> IndexReport:
    """Check the index identities on a resolved field.

    1. the divisor index vanishes at regular points of the divisor;
    2. blowing up decreases the index of a smooth separatrix by one (along
       each invariant coordinate axis of the root);
    3. the divisor indices at the first blow-up sum to ``-1``;
    4. at reduced leaves, the branch indices multiply to 1 (non-degenerate)
       and the strong branch of a saddle-node has index 0.

    With ``strict`` the first failure raises :class:`PropertyViolation`.
    """
    rep = IndexReport()

    def record(name, ok, detail="", node=None):
        rep.add(name, ok, detail, node)
        if strict and not ok:
            raise PropertyViolation(f"{name} failed: {detail}", node)

    root = tree.root
    X = root.field
    exact = X.is_exact
    if root.singularity.tag != NON_SINGULAR and not root.dicritical and root.children is not None:
        P = X.p_poly(root.order) if root.order else None
        # (1) regular points of the divisor
        if P is not None and root.order is not None:
            for t in _regular_points(P):
                dp = DivisorPoint("chart_t", t)
                Xq = saturated_transform(X, dp)
                val = cs_index(Xq, "x").value
                record("regular-point index", is_zero(val), f"t={t}: {to_text(val)}", root.id)
        # (3) sum rule
        if root.order is not None:
            total = 0
            for row in tree_divisor_indices(tree, root.id):
                total = total + row.orbit_sum
            record("divisor sum", is_zero(total + 1), f"sum = {to_text(total)}", root.id)
    # (2) decrement along invariant axes of the root
    for axis, dp in (("y", DivisorPoint("chart_t", 0)), ("x", DivisorPoint("chart_s", 0))):
        if root.singularity.tag == NON_SINGULAR:
            break
        try:
            before = cs_index(X, axis).value
        except (SeparatrixNotStrict, InsufficientPrecision):
            continue
        Xp = saturated_transform(X, dp)
        after = cs_index(Xp, axis).value
        record("blow-up decrement", is_zero(after - before + 1), f"{{{axis}=0}}: {to_text(before)} -> {to_text(after)}", root.id)
    # (4) reduced leaves
    for leaf in tree.leaves():
        tag = leaf.singularity.tag
        if tag not in (NON_DEGENERATE, SADDLE_NODE):
            continue
        vals = []
        for v, lam in _linear_branches(leaf.field):
            try:
                vals.append((lam, branch_cs_at_leaf(leaf.field, v, n)))
            except InsufficientPrecision:
                vals = None
                break
        if vals is None or len(vals) != 2:
            continue
        if tag == NON_DEGENERATE:
            prod = vals[0][1] * vals[1][1]
            record("reduced product", is_zero(prod - 1), f"product = {to_text(prod)}", leaf.id)
        else:
            strong = [cs for lam, cs in vals if not is_zero(lam)]
            record("saddle-node strong index", all(is_zero(c) for c in strong), "", leaf.id)
    return rep
