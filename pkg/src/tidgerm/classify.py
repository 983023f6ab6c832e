"""Decision procedures for parabolic curves and domains along a direction.

Three entry points share one pipeline (blow up once at the direction, resolve
the transform of the infinitesimal generator there, read separatrices and
saddle-nodes off the tree):

* :func:`classify_direction` -- fixed curve / invariant sets containing a
  parabolic curve / parabolic domains foliated by parabolic curves;
* :func:`classify_abate` -- the same trichotomy when the residual index of
  the transform along the exceptional divisor does not vanish, with the
  separatrix case sharpened to parabolic curves asymptotic to a strong
  separatrix;
* :func:`classify_along_divisor` -- a map fixing a smooth curve pointwise,
  studied at a non-corner singular point of the curve.

The classifier reports guaranteed counts and the certificate that justifies
them; it never constructs the curves or domains.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional

from .algebra.field import is_zero, to_text
from .algebra.jet import Jet2
from .algebra.roots import ProjPoint, homog_eval
from .blowup import (
    NON_SINGULAR,
    SADDLE_NODE,
    AxisInfo,
    DivisorPoint,
    ResolutionTree,
    SeparatrixDescriptor,
    classify_singularity,
    enumerate_separatrices,
    resolve,
    second_type,
    weak_in_divisor,
)
from .errors import (
    CertificateIncomplete,
    CornerPoint,
    Dicritical,
    DicriticalMap,
    IndexZero,
    InapplicableError,
    InsufficientPrecision,
    NotCharacteristic,
    NotTangential,
    PropertyViolation,
)
from .germs import Diffeo, characteristic_directions, characteristic_polynomial, fixed_curves, log_adaptive
from .index import cs_index

__all__ = [
    "VERDICTS",
    "STATEMENTS",
    "VivasShape",
    "ClassificationReport",
    "classify_direction",
    "classify_abate",
    "classify_along_divisor",
    "classify_all_directions",
    "revalidate",
]

VERDICTS = ("FixedCurve", "SeparatrixCase", "PureDomainCase", "AbateCurves", "AbateDomains")

# What each verdict guarantees.  Domains found in the separatrix case are not
# claimed to be foliated by parabolic curves.
_CLAIMS = {
    "FixedCurve": {"fixed_curve": True, "parabolic_curve": False, "parabolic_domains": False, "foliated": False, "asymptotic_to_separatrix": False},
    "SeparatrixCase": {"fixed_curve": False, "parabolic_curve": True, "parabolic_domains": False, "foliated": False, "asymptotic_to_separatrix": True},
    "PureDomainCase": {"fixed_curve": False, "parabolic_curve": True, "parabolic_domains": True, "foliated": True, "asymptotic_to_separatrix": False},
    "AbateCurves": {"fixed_curve": False, "parabolic_curve": True, "parabolic_domains": False, "foliated": False, "asymptotic_to_separatrix": True},
    "AbateDomains": {"fixed_curve": False, "parabolic_curve": True, "parabolic_domains": True, "foliated": True, "asymptotic_to_separatrix": False},
}

# One-line statement of what each verdict guarantees.
STATEMENTS = {
    "FixedCurve": "curve of fixed points tangent to the direction",
    "SeparatrixCase": "parabolic curve guaranteed",
    "PureDomainCase": "parabolic domains foliated by parabolic curves guaranteed",
    "AbateCurves": "parabolic curve guaranteed, asymptotic to a strong separatrix",
    "AbateDomains": "parabolic domains foliated by parabolic curves guaranteed",
}


@dataclass
class VivasShape:
    """Normal-form data of the transform at a saddle-node leaf.

    In coordinates ``(z, u)`` at the leaf, with the weak separatrix
    ``{z = 0}`` inside the divisor,

    ``X_q = z^r u^m [ z (a + G) d/dz + (b z + H) d/du ]``,
    ``H(0, u) = c u^(p+1) + ...``.

    ``swapped`` records that ``z`` is the second leaf coordinate.
    """

    r: int
    m: int
    a: object
    b: object
    c: object
    p: int
    leaf: int
    swapped: bool = False

    @property
    def domains(self) -> int:
        """Number of connected components of the model domain (``r p``)."""
        return self.r * self.p

    def to_dict(self):
        return {
            "r": self.r,
            "m": self.m,
            "a": to_text(self.a),
            "b": to_text(self.b),
            "c": to_text(self.c),
            "p": self.p,
            "leaf": self.leaf,
            "swapped": self.swapped,
            "domains": self.domains,
        }


@dataclass
class ClassificationReport:
    """Verdict with the evidence supporting it."""

    mode: str
    direction: Optional[ProjPoint]
    k: int
    verdict: str
    evidence: dict = dc_field(default_factory=dict)
    shape: Optional[VivasShape] = None
    indices: list = dc_field(default_factory=list)
    certificate: list = dc_field(default_factory=list)
    notes: list = dc_field(default_factory=list)
    tree: Optional[ResolutionTree] = None
    node: Optional[int] = None
    generator_order: Optional[int] = None
    map_text: str = ""

    @property
    def claims(self) -> dict:
        return dict(_CLAIMS[self.verdict])

    @property
    def guaranteed(self) -> int:
        """Number of invariant sets (or curves, or domains) guaranteed."""
        return 1 if self.verdict == "FixedCurve" else self.k

    def to_dict(self, include_tree: bool = False) -> dict:
        out = {
            "schema": 1,
            "mode": self.mode,
            "input": {
                "map": self.map_text,
                "direction": self.direction.text() if self.direction is not None else None,
                "k": self.k,
                "generator_order": self.generator_order,
            },
            "verdict": self.verdict,
            "statement": STATEMENTS[self.verdict],
            "claims": self.claims,
            "counts": {
                "guaranteed": self.guaranteed,
                "model_domains": self.shape.domains if self.shape else None,
            },
            "evidence": self.evidence,
            "shape": self.shape.to_dict() if self.shape else None,
            "indices": self.indices,
            "certificate": self.certificate,
            "notes": self.notes,
        }
        if include_tree and self.tree is not None:
            out["tree"] = self.tree.to_dict()
        return out


# ---------------------------------------------------------------------------
# shared steps
# ---------------------------------------------------------------------------


def _k(F: Diffeo) -> int:
    return F.order() - 1


def _check_characteristic(F: Diffeo, v: ProjPoint):
    """Evaluate ``x q_{k+1} - y p_{k+1}`` at ``v`` (works for ``v`` over any level)."""
    h = characteristic_polynomial(F)
    if all(is_zero(c) for c in h):
        raise DicriticalMap("x q_{k+1} - y p_{k+1} vanishes identically")
    if not is_zero(homog_eval(h, v.a, v.b)):
        raise NotCharacteristic(f"{v.text()} is not a characteristic direction")


def _resolve_at(F: Diffeo, v: ProjPoint, locus: Jet2, max_depth: int, extra=None):
    """Resolve ``log F`` above ``v`` with adaptive generator precision.

    ``extra(tree)`` is run inside the retry loop so that later steps needing
    more terms also trigger a longer generator.
    """

    def action(X, _n):
        tree = resolve(X, max_depth=max_depth, locus=locus, only=v)
        return tree, (extra(tree) if extra is not None else None)

    (tree, more), n = log_adaptive(F, action)
    return tree, more, n


def _disposition(tree: ResolutionTree, under: int, seps):
    """Per-leaf list of branches below ``under`` and where they lie."""
    below = set(tree.subtree(under))
    out = []
    for s in seps:
        if s.node not in below:
            continue
        if s.direction is None:
            where = "dicritical family"
        elif s.in_divisor:
            where = f"in divisor {s.component}"
        else:
            where = "free"
        out.append(
            {
                "node": s.node,
                "center": tree[s.node].center_text(),
                "class": tree[s.node].singularity.tag if tree[s.node].singularity else None,
                "branch": s.branch,
                "direction": s.direction.text() if s.direction is not None else None,
                "strength": s.strength,
                "disposition": where,
            }
        )
    return out


def _free_branches(tree: ResolutionTree, under: int, seps, strong_only=False):
    below = set(tree.subtree(under))
    out = []
    for s in seps:
        if s.node not in below or s.kind != "strict" or s.in_divisor:
            continue
        if strong_only and s.strength != "strong":
            continue
        out.append(s)
    return out


def _sep_evidence(tree: ResolutionTree, s: SeparatrixDescriptor) -> dict:
    d = s.to_dict()
    d["center"] = tree[s.node].center_text()
    d["path"] = tree.path(s.node)
    return d


def _swap(j: Jet2) -> Jet2:
    return Jet2({(b, a): c for (a, b), c in j.terms.items()}, j.prec)


def extract_shape(tree: ResolutionTree, leaf_id: int, created_only: bool = True) -> VivasShape:
    """Read the normal-form constants at a saddle-node leaf.

    Raises
    ------
    CertificateIncomplete
        If the weak branch is not in the divisor, or the singular locus at
        the leaf has components other than the divisor (further blow-ups
        would be needed, and none are attempted).
    InsufficientPrecision
        If ``H(0, u)`` has no certified nonzero coefficient.
    """
    leaf = tree[leaf_id]
    hit = weak_in_divisor(tree, leaf, created_only)
    if hit is None:
        raise CertificateIncomplete(f"weak separatrix at node {leaf_id} is not in the divisor")
    ai, ax = hit
    if leaf.locus.order():
        raise CertificateIncomplete(
            f"fixed curves other than the divisor pass through node {leaf_id}; additional blow-ups are not attempted"
        )
    other = leaf.axes[1 - ai]
    r = ax.multiplicity
    m = other.multiplicity if other is not None else 0
    X = leaf.field
    if ai == 0:
        Z, U = X.A, X.B
    else:
        Z, U = _swap(X.B), _swap(X.A)
    if any(not is_zero(c) for (i, _j), c in Z.terms.items() if i == 0):
        raise CertificateIncomplete("the weak axis is not invariant in the computed coordinates")
    a = Z.coeff(1, 0)
    b = U.coeff(1, 0)
    if is_zero(a):
        raise CertificateIncomplete("the leaf is not a saddle-node in the expected coordinates")
    top = U.prec
    c = None
    p1 = None
    for j in range(2, (top if top is not None else U.max_degree()) + 1):
        cj = U.coeff(0, j)
        if not is_zero(cj):
            p1, c = j, cj
            break
    if p1 is None:
        if top is None:
            raise CertificateIncomplete("H(0, u) vanishes: the weak axis consists of zeros")
        raise InsufficientPrecision("H(0, u) has no certified nonzero coefficient")
    return VivasShape(r=r, m=m, a=a, b=b, c=c, p=p1 - 1, leaf=leaf_id, swapped=(ai == 1))


def _domain_certificate(tree: ResolutionTree, under: int, created_only: bool = True):
    """Saddle-node leaf below ``under`` with weak branch in the divisor."""
    for leaf in tree.leaves(under):
        if leaf.singularity.tag == SADDLE_NODE and weak_in_divisor(tree, leaf, created_only):
            return leaf
    return None


def _fixed_evidence(fc, v):
    facs = fc.factors_tangent_to(v)
    return {
        "fixed_curve": fc.curve.text(),
        "tangent_factors": [f.text() for f, _m in facs],
        "multiplicities": [m for _f, m in facs],
    }


def _index_row(node, axis, value):
    return {"node": node.id, "center": node.center_text(), "separatrix": axis, "index": to_text(value)}


# ---------------------------------------------------------------------------
# main trichotomy
# ---------------------------------------------------------------------------


def classify_direction(F: Diffeo, v: ProjPoint, max_depth: int = 16) -> ClassificationReport:
    """Decide which guarantee holds along a characteristic direction.

    Parameters
    ----------
    F : Diffeo
        Exact map tangent to the identity.
    v : ProjPoint
        A characteristic direction of ``F``.

    Returns
    -------
    ClassificationReport
        ``FixedCurve`` if a curve of fixed points is tangent to ``v``;
        ``SeparatrixCase`` if the transform of the generator at ``v`` has a
        separatrix other than the divisor; ``PureDomainCase`` otherwise, with
        a saddle-node certificate and its normal-form shape.

    Raises
    ------
    NotCharacteristic
        If ``v`` is not characteristic.
    CertificateIncomplete
        If the pure-domain certificate needs blow-ups beyond the tree.

    Examples
    --------
    >>> from tidgerm.algebra.jet import Jet2
    >>> x, y = Jet2.x(), Jet2.y()
    >>> F = Diffeo.from_polynomials(x, y + x * x)
    >>> classify_direction(F, ProjPoint(0, 1)).verdict
    'FixedCurve'
    """
    k = _k(F)
    _check_characteristic(F, v)
    fc = fixed_curves(F)
    base = dict(mode="direction", direction=v, k=k, map_text=F.text())
    if fc.tangent_to(v):
        return ClassificationReport(verdict="FixedCurve", evidence=_fixed_evidence(fc, v), **base)
    tree, _none, n = _resolve_at(F, v, fc.g, max_depth)
    return _trichotomy(tree, n, base, strong_only=False)


def _root_regular(tree: ResolutionTree, base, n):
    root = tree.root
    a, b = root.field.value_at_origin()
    w = ProjPoint(a, b)
    ev = {"regular_direction": w.text(), "node": root.id}
    return ClassificationReport(
        verdict="SeparatrixCase",
        evidence=ev,
        tree=tree,
        node=root.id,
        generator_order=n,
        notes=["the saturated generator is regular; its integral curve is a separatrix tangent to the direction"],
        **base,
    )


def _trichotomy(tree: ResolutionTree, n: int, base: dict, strong_only: bool, abate=False):
    root = tree.root
    if root.singularity.tag == NON_SINGULAR:
        return _root_regular(tree, base, n)
    if not root.children:
        raise CertificateIncomplete("the direction does not give a singular point of the transform")
    q = tree[root.children[0]]
    seps = enumerate_separatrices(tree)
    cert = _disposition(tree, q.id, seps)
    free = _free_branches(tree, q.id, seps, strong_only=strong_only)
    if free:
        s = free[0]
        verdict = "AbateCurves" if abate else "SeparatrixCase"
        ev = {"separatrix": _sep_evidence(tree, s), "node": q.id, "others": len(free) - 1}
        return ClassificationReport(
            verdict=verdict, evidence=ev, tree=tree, node=q.id, generator_order=n, certificate=cert, **base
        )
    if q.singularity.tag == NON_SINGULAR and not q.children:
        raise CertificateIncomplete("the transform is not strictly singular at the point")
    leaf = _domain_certificate(tree, q.id)
    if leaf is None:
        raise PropertyViolation("no separatrix besides the divisor but no saddle-node with weak branch in it", q.id)
    shape = extract_shape(tree, leaf.id)
    verdict = "AbateDomains" if abate else "PureDomainCase"
    ev = {
        "node": q.id,
        "saddle_node": leaf.id,
        "saddle_node_center": leaf.center_text(),
        "weak_in_divisor": True,
        "only_separatrix_is_divisor": True,
        "strictly_singular": True,
        "second_type": second_type(tree, q.id),
    }
    return ClassificationReport(
        verdict=verdict,
        evidence=ev,
        shape=shape,
        tree=tree,
        node=q.id,
        generator_order=n,
        certificate=cert,
        **base,
    )


# ---------------------------------------------------------------------------
# non-vanishing residual index
# ---------------------------------------------------------------------------


def _e_axis(dp: DivisorPoint) -> str:
    return "x" if dp.chart == "chart_t" else "y"


def classify_abate(F: Diffeo, v: ProjPoint, fallback: bool = False, max_depth: int = 16) -> ClassificationReport:
    """Trichotomy for a direction whose transform has nonzero residual index.

    ``iota(F_p, D)`` is computed as the index of the transform of the
    generator along the exceptional divisor (the saturation does not change
    it).

    Parameters
    ----------
    fallback : bool
        When the index vanishes, return :func:`classify_direction`'s report
        (with a note) instead of raising :class:`IndexZero`.

    Raises
    ------
    Dicritical
        If the generator is dicritical.
    IndexZero
        If the index vanishes and ``fallback`` is false.
    """
    k = _k(F)
    _check_characteristic(F, v)
    fc = fixed_curves(F)
    base = dict(mode="abate", direction=v, k=k, map_text=F.text())

    def index_of(tree):
        root = tree.root
        if root.dicritical:
            return None
        q = tree[root.children[0]]
        return cs_index(q.field, _e_axis(q.point)).value

    tree, iota, n = _resolve_at(F, v, fc.g, max_depth, extra=index_of)
    if tree.root.dicritical:
        raise Dicritical("the infinitesimal generator is dicritical")
    q = tree[tree.root.children[0]]
    row = _index_row(q, "D", iota)
    if is_zero(iota):
        if not fallback:
            raise IndexZero(f"iota(F_p, D) = 0 at {v.text()}")
        rep = classify_direction(F, v, max_depth)
        rep.indices.append(row)
        rep.notes.append("residual index vanishes; fell back to the general trichotomy")
        return rep
    if fc.tangent_to(v):
        rep = ClassificationReport(verdict="FixedCurve", evidence=_fixed_evidence(fc, v), **base)
        rep.indices.append(row)
        return rep
    rep = _trichotomy(tree, n, base, strong_only=True, abate=True)
    rep.indices.append(row)
    if rep.verdict == "AbateDomains" and rep.evidence.get("second_type"):
        raise PropertyViolation("nonzero index but the transform is of second type", q.id)
    return rep


# ---------------------------------------------------------------------------
# maps fixing a curve pointwise
# ---------------------------------------------------------------------------


def classify_along_divisor(
    F: Diffeo, axis: str = "x", corner: bool = False, max_depth: int = 16
) -> ClassificationReport:
    """Classify at a point of a curve of fixed points.

    ``F`` fixes the smooth curve ``{axis = 0}`` pointwise (the divisor ``E``)
    and the origin is a singular point of ``E`` for the generator.

    Parameters
    ----------
    axis : {'x', 'y'}
        Equation of the fixed curve.
    corner : bool
        The origin lies on a second divisor component.

    Raises
    ------
    CornerPoint
        At a corner, or if another curve of fixed points passes through
        the origin.
    NotTangential
        If ``E`` is not fixed pointwise or is not a strict separatrix of the
        generator.
    """
    if corner:
        raise CornerPoint("the point is a corner of the divisor")
    k = _k(F)
    fc = fixed_curves(F)
    idx = 0 if axis == "x" else 1
    eq = Jet2.x() if axis == "x" else Jet2.y()
    e = 0
    others = []
    for fac, mult in fc.factors:
        if fac.order() == 1 and set(fac.terms) == {(1 - idx, idx)}:
            e = mult
        else:
            others.append(fac)
    if e == 0:
        raise NotTangential(f"the curve {{{axis} = 0}} is not fixed pointwise")
    if others:
        raise CornerPoint("another curve of fixed points passes through the point")
    # V = (F - id) / g restricted to E must be tangent to E
    (nx, dx), (ny, dy) = F.rational
    num = (nx - Jet2.x() * dx) if idx == 0 else (ny - Jet2.y() * dy)
    vnum = num.divide(fc.g)
    on_e = [c for key, c in vnum.terms.items() if key[idx] == 0]
    if any(not is_zero(c) for c in on_e):
        raise NotTangential("the fixed curve is not a strict separatrix of the generator")
    other_num = (ny - Jet2.y() * dy) if idx == 0 else (nx - Jet2.x() * dx)
    v0 = vnum.coeff(0, 0), other_num.divide(fc.g).coeff(0, 0)
    if not (is_zero(v0[0]) and is_zero(v0[1])):
        raise InapplicableError("the point is not singular for the generator")
    base = dict(mode="divisor", direction=None, k=k, map_text=F.text())
    axes = [None, None]
    axes[idx] = AxisInfo("E", True, e, False)

    def action(X, _n):
        Xs = X.divide(fc.g)
        return resolve(Xs, max_depth=max_depth, locus=Jet2.const(1), axes=tuple(axes))

    tree, n = log_adaptive(F, action)
    seps = enumerate_separatrices(tree)
    cert = _disposition(tree, 0, seps)
    free = _free_branches(tree, 0, seps)
    if free:
        s = free[0]
        ev = {"separatrix": _sep_evidence(tree, s), "node": 0, "others": len(free) - 1}
        return ClassificationReport(
            verdict="SeparatrixCase", evidence=ev, tree=tree, node=0, generator_order=n, certificate=cert, **base
        )
    leaf = _domain_certificate(tree, 0, created_only=False)
    if leaf is None:
        raise PropertyViolation("only the divisor is a separatrix but no saddle-node certificate was found", 0)
    shape = extract_shape(tree, leaf.id, created_only=False)
    ev = {
        "node": 0,
        "saddle_node": leaf.id,
        "saddle_node_center": leaf.center_text(),
        "weak_in_divisor": True,
        "only_separatrix_is_divisor": True,
        "strictly_singular": True,
        "second_type": second_type(tree, None, created_only=False),
    }
    return ClassificationReport(
        verdict="PureDomainCase",
        evidence=ev,
        shape=shape,
        tree=tree,
        node=0,
        generator_order=n,
        certificate=cert,
        **base,
    )


# ---------------------------------------------------------------------------
# batch helpers
# ---------------------------------------------------------------------------


def classify_all_directions(F: Diffeo, max_depth: int = 16):
    """``(direction, report or error)`` for every characteristic direction."""
    out = []
    for cd in characteristic_directions(F, complete=True):
        try:
            out.append((cd.point, classify_direction(F, cd.point, max_depth)))
        except InapplicableError as exc:
            out.append((cd.point, exc))
    return out


def revalidate(report: ClassificationReport) -> bool:
    """Re-check the evidence of a report against its tree.

    For a separatrix verdict the cited leaf is re-classified and the branch
    must be free; for a domain verdict the saddle-node leaf is re-classified
    and its weak branch must lie in the divisor.
    """
    tree = report.tree
    if report.verdict == "FixedCurve":
        return bool(report.evidence.get("tangent_factors"))
    if tree is None:
        return False
    if report.verdict in ("SeparatrixCase", "AbateCurves"):
        if "regular_direction" in report.evidence:
            return tree.root.singularity.tag == NON_SINGULAR
        sd = report.evidence["separatrix"]
        node = tree[sd["node"]]
        if node.dicritical:
            return True
        again = classify_singularity(node.field)
        if again.tag != node.singularity.tag:
            return False
        return not sd["in_divisor"] and sd["kind"] == "strict"
    leaf = tree[report.evidence["saddle_node"]]
    again = classify_singularity(leaf.field)
    created_only = report.mode != "divisor"
    return again.tag == SADDLE_NODE and weak_in_divisor(tree, leaf, created_only) is not None
