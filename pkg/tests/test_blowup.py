"""Blow-ups, saturation, resolution trees and separatrices."""

import random

import pytest
from flint import fmpq
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import (
    CURATED_FIELDS,
    curated_maps,
    example_pq,
    lemma_checks,
    poincare_dulac,
    pure_domain_fields,
    random_field,
    random_fields,
)
from tidgerm.algebra.field import is_zero
from tidgerm.algebra.jet import Jet2
from tidgerm.algebra.roots import ProjPoint
from tidgerm.blowup import (
    DivisorPoint,
    blow_up_diffeo,
    blow_up_vf,
    classify_singularity,
    contains_saddle_node,
    enumerate_separatrices,
    is_dicritical,
    pullback,
    resolve,
    saturate,
    saturated_transform,
    second_type,
    strict_separatrices,
    strict_transform,
)
from tidgerm.errors import DepthExceeded, DicriticalMap, NotTangentToIdentity
from tidgerm.germs import Diffeo, VectorField, characteristic_directions, log
from tidgerm.parse import parse_germ

x, y = Jet2.x(), Jet2.y()
ONE = Jet2.const(1)
T0 = DivisorPoint("chart_t", 0)
S0 = DivisorPoint("chart_s", 0)


# ---------------------------------------------------------------------------
# charts and transforms
# ---------------------------------------------------------------------------


def test_divisor_point_from_direction():
    assert DivisorPoint.from_direction(ProjPoint(1, 0)) == T0
    assert DivisorPoint.from_direction(ProjPoint(3, 1)).text() == "s=3"
    assert DivisorPoint("chart_t", 2).direction == ProjPoint(1, 2)


def test_unknown_chart():
    with pytest.raises(ValueError):
        DivisorPoint("chart_z", 0)


def test_pullback_chart_t():
    # (x, y) -> (x, x u)
    assert pullback(x * x + y, T0).text() == "x^2 + x*y"


def test_strict_transform_cusp():
    # y^2 - x^3 -> x^2 (u^2 - x)
    assert strict_transform(y * y - x**3, T0).text() == "-x + y^2"


@pytest.mark.parametrize(
    "X, p, expected",
    [
        (VectorField(x, y.scale(2)), T0, "(x)*dx + (u)*du"),
        (VectorField(x * x, y * y), T0, "(x)*dx + (-u + u^2)*du"),
        (VectorField(x * x, y * y), S0, "(-u + u^2)*du + (y)*dy"),
    ],
)
def test_saturated_transform(X, p, expected):
    assert saturated_transform(X, p).text(p.names) == expected


def test_unsaturated_transform_keeps_factor():
    X = VectorField(x * x, y * y)
    assert blow_up_vf(X, T0).text(T0.names) == "(x^2)*dx + (-x*u + x*u^2)*du"


@pytest.mark.parametrize(
    "X, expected",
    [
        (VectorField(x, y), True),
        (VectorField(x * x, y * y), False),
        (VectorField(x * x + x * y, x * y + y * y), True),
    ],
)
def test_is_dicritical(X, expected):
    assert is_dicritical(X) is expected


@pytest.mark.parametrize(
    "X, f, field",
    [
        (VectorField(x * x, x * y), "x", "(x)*dx + (y)*dy"),
        (VectorField(x * x * y, x * y * y), "x*y", "(x)*dx + (y)*dy"),
        (VectorField(x, y), "1", "(x)*dx + (y)*dy"),
    ],
)
def test_saturate(X, f, field):
    sat = saturate(X)
    assert sat.f.text() == f
    assert sat.field.text() == field


@pytest.mark.parametrize(
    "X, tag",
    [
        (VectorField(x, y.scale(-1)), "ReducedNonDegenerate"),
        (VectorField(x * x, y), "ReducedSaddleNode"),
        (VectorField(x, y.scale(2)), "NotReduced"),
        (VectorField(ONE, y), "NonSingular"),
        (VectorField(y, x.scale(-1)), "ReducedNonDegenerate"),
    ],
)
def test_classify_singularity(X, tag):
    assert classify_singularity(X).tag == tag


def test_blow_up_diffeo_simple():
    # (x + x^2, y) in chart (x, u = y/x): u -> u / (1 + x)
    Fq = blow_up_diffeo(Diffeo.from_polynomials(x + x * x, y), T0)
    fx, fy = Fq.jet(3)
    assert fx.agrees_with(x + x * x, 3)
    assert fy.agrees_with(y - x * y + x * x * y, 3)


def test_example_transform_jet():
    c = parse_germ("param c\nF.x = x\nF.y = y\n").field.param("c")
    fx, fy = example_pq().jet(2)
    assert fx.agrees_with(x + x * x + (x * y).scale(c), 2)
    assert fy.agrees_with(y - x * y - (y * y).scale(c), 2)
    assert example_pq().order() == 2


def test_blow_up_of_identity():
    Fq = blow_up_diffeo(Diffeo.from_polynomials(x, y), DivisorPoint("chart_s", 2))
    fx, fy = Fq.jet(4)
    assert fx.agrees_with(x, 4) and fy.agrees_with(y, 4)


def _commutes(F, p, N=5):
    Fq = blow_up_diffeo(F, p)
    try:
        up = log(Fq, N)
    except NotTangentToIdentity:
        return True
    down = blow_up_vf(log(F, N + 1), p)
    n = min(N, down.A.prec, down.B.prec)
    return up.A.agrees_with(down.A, n) and up.B.agrees_with(down.B, n)


@pytest.mark.parametrize("F", curated_maps(), ids=lambda F: F.text()[:30])
def test_exact_and_truncated_transforms_agree(F):
    try:
        dirs = characteristic_directions(F)
    except DicriticalMap:
        dirs = []
    for d in dirs:
        p = DivisorPoint.from_direction(d.point)
        exact = blow_up_diffeo(F, p).jet(4)
        truncated = blow_up_diffeo(Diffeo(*F.jet(5)), p).jet(4)
        assert all(a.agrees_with(b, 4) for a, b in zip(exact, truncated))


def test_fractional_coefficients_survive_blow_up():
    F = Diffeo.from_polynomials(x + x * x, y + x * x * x.scale(fmpq(5, 2)) + (x * y).scale(fmpq(1, 3)))
    _, fy = blow_up_diffeo(F, T0).jet(2)
    assert fy.agrees_with(y + (x * x).scale(fmpq(5, 2)) - (x * y).scale(fmpq(2, 3)), 2)


@pytest.mark.parametrize("F", curated_maps(), ids=lambda F: F.text()[:30])
def test_log_commutes_with_blow_up(F):
    try:
        dirs = characteristic_directions(F)
    except DicriticalMap:
        pytest.skip("dicritical map")
    for d in dirs:
        assert _commutes(F, DivisorPoint.from_direction(d.point))


# ---------------------------------------------------------------------------
# resolution
# ---------------------------------------------------------------------------


def test_reduced_root_is_not_blown_up():
    tree = resolve(VectorField(x, y.scale(-1)))
    assert len(tree.nodes) == 1 and tree.depth == 0


def test_resolution_of_x2_y2():
    tree = resolve(VectorField(x * x, y * y))
    got = [(n.center_text(), n.singularity.tag, n.dicritical) for n in tree.nodes]
    assert got == [
        ("", "NotReduced", False),
        ("t=0", "ReducedNonDegenerate", False),
        ("s=0", "ReducedNonDegenerate", False),
        ("s=1", "NotReduced", True),
    ]
    # the dicritical point above t=1 becomes regular after one more blow-up
    node = tree[3]
    assert not node.children
    assert node.field.text(node.names) == "(u + u^2)*du + (y)*dy"
    upstairs = saturated_transform(node.field, T0)
    assert classify_singularity(upstairs).tag == "NonSingular"


def test_resolution_adjoins_roots():
    tree = resolve(VectorField(y * y - x**3, x * x))
    centres = sorted(n.center_text() for n in tree.nodes[1:])
    assert centres == ["s=1", "s=w1"]


@pytest.mark.parametrize("X", list(CURATED_FIELDS) + pure_domain_fields(), ids=lambda X: X.text()[:40])
def test_curated_resolutions_are_reduced(X):
    tree = resolve(X, max_depth=16)
    assert tree.depth <= 16
    for leaf in tree.leaves():
        assert leaf.singularity.tag in ("NonSingular", "ReducedNonDegenerate", "ReducedSaddleNode")


@pytest.mark.parametrize("X", random_fields(15, seed=7, non_dicritical=True), ids=lambda X: X.text()[:40])
def test_divisor_restriction_check(X):
    tree = resolve(X, max_depth=64)
    first = [n for n in tree.nodes if n.depth == 1]
    assert first
    assert all(n.restriction_check is True for n in first)


@pytest.mark.parametrize("n", [2, 3, 5, 16])
def test_resonant_node_needs_n_blow_ups(n):
    assert resolve(poincare_dulac(n)).depth == n


def test_depth_guard():
    with pytest.raises(DepthExceeded):
        resolve(poincare_dulac(17), max_depth=16)
    assert resolve(poincare_dulac(17), max_depth=17).depth == 17


def test_dot_output():
    dot = resolve(VectorField(x * x, y * y)).to_dot()
    assert dot.startswith("digraph resolution {")
    assert "n0 -> n1;" in dot and "Dicritical" in dot


def test_tree_serialization():
    d = resolve(VectorField(x * x, y * y)).to_dict()
    assert d["depth"] == 1
    assert [n["id"] for n in d["nodes"]] == [0, 1, 2, 3]
    assert d["nodes"][0]["children"] == [1, 2, 3]


# ---------------------------------------------------------------------------
# separatrices
# ---------------------------------------------------------------------------


def _kinds(tree):
    return sorted((s.strength, s.direction.text() if s.direction else None) for s in strict_separatrices(tree))


def test_separatrices_of_saddle():
    assert _kinds(resolve(VectorField(x, y.scale(-1)))) == [("strong", "[0:1]"), ("strong", "[1:0]")]


def test_separatrices_of_saddle_node():
    # strong branch {x = 0}, weak branch {y = 0}
    assert _kinds(resolve(VectorField(x * x, y))) == [("strong", "[0:1]"), ("weak", "[1:0]")]


def test_separatrices_of_x2_y2():
    tree = resolve(VectorField(x * x, y * y))
    free = [s for s in enumerate_separatrices(tree) if s.kind == "strict" and not s.in_divisor and s.count is not None]
    # one transverse branch at each simple point of the divisor, through [1:0] and [0:1]
    assert sorted(s.node for s in free) == [1, 2]
    dicritical = [s for s in enumerate_separatrices(tree) if s.count is None]
    assert [s.node for s in dicritical] == [3]


@pytest.mark.parametrize(
    "X, found, second",
    [
        (VectorField(x, y.scale(-1)), False, True),
        (VectorField(x * x, y), True, True),
        (pure_domain_fields()[0], True, False),
        (pure_domain_fields()[1], True, False),
    ],
)
def test_saddle_nodes_and_second_type(X, found, second):
    tree = resolve(X)
    assert contains_saddle_node(tree)[0] is found
    assert second_type(tree) is second


def test_poincare_dulac_has_one_separatrix():
    tree = resolve(poincare_dulac(2))
    seps = strict_separatrices(tree)
    assert sum(s.count for s in seps) == 1
    assert contains_saddle_node(tree)[0]


# ---------------------------------------------------------------------------
# separatrix lemmas
# ---------------------------------------------------------------------------


LEMMA_CORPUS = (
    random_fields(20, seed=11, order=2, non_dicritical=True)
    + random_fields(10, seed=12, order=3, non_dicritical=True)
    + list(CURATED_FIELDS)
    + pure_domain_fields()
)


@pytest.mark.parametrize("X", LEMMA_CORPUS, ids=lambda X: X.text()[:40])
def test_separatrix_lemmas(X):
    assert all(holds for _, holds in lemma_checks(X))


def test_lemma_hypotheses_are_exercised():
    seen = {name for X in LEMMA_CORPUS for name, _ in lemma_checks(X)}
    assert {"one-separatrix", "two-separatrices", "index-zero", "index-product"} <= seen


@given(st.integers(0, 10_000))
@settings(max_examples=15, deadline=None)
def test_lemmas_on_random_fields(seed):
    X = random_field(random.Random(seed), order=2, degree=3)
    if is_dicritical(X):
        return
    assert all(holds for _, holds in lemma_checks(X))


@given(st.integers(-4, 4).filter(lambda v: v != 0), st.integers(-4, 4))
@settings(max_examples=20, deadline=None)
def test_transform_of_linear_field_is_linear(a, b):
    # X = x d/dx + lambda y d/dy blows up at t=0 into x d/dx + (lambda - 1) u d/du
    lam = fmpq(a, 3) + b
    X = VectorField(x, y.scale(lam))
    Xt = saturated_transform(X, T0)
    assert Xt.A.agrees_with(x, 3)
    assert Xt.B.agrees_with(y.scale(lam - 1), 3)
    assert is_zero(Xt.linear_part()[1][1] - (lam - 1))
