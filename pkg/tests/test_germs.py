"""Germs: orders, exp/log, characteristic directions and fixed curves."""

import random

import pytest
from flint import fmpq
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import curated_maps, example_pq, poly, random_field
from tidgerm.algebra.field import is_zero
from tidgerm.algebra.jet import Jet2
from tidgerm.algebra.roots import ProjPoint, homog_eval
from tidgerm.errors import DicriticalMap, NotExact, NotTangentToIdentity
from tidgerm.germs import (
    Diffeo,
    VectorField,
    characteristic_directions,
    characteristic_polynomial,
    exp,
    fixed_curves,
    log,
    order,
)

x, y = Jet2.x(), Jet2.y()
ZERO = Jet2.zero()


# ---------------------------------------------------------------------------
# orders
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "obj, expected",
    [
        (VectorField(x * x, ZERO), 2),
        (Diffeo.from_polynomials(x + x * x, y), 2),
        (Diffeo.from_polynomials(x + x**3, y - y**4), 3),
    ],
)
def test_order(obj, expected):
    assert order(obj) == expected


def test_example_order():
    assert example_pq().order() == 2


def test_not_tangent_to_identity():
    F = Diffeo.from_polynomials(x.scale(2), y)
    assert not F.is_tangent_to_identity()
    with pytest.raises(NotTangentToIdentity):
        log(F, 3)


# ---------------------------------------------------------------------------
# exp / log
# ---------------------------------------------------------------------------


def test_exp_of_zero_is_identity():
    F = exp(VectorField(ZERO, ZERO), 3)
    fx, fy = F.jet(3)
    assert fx.agrees_with(x) and fy.agrees_with(y)


def test_exp_x_squared():
    # flow of x' = x^2 at time 1 is x / (1 - x)
    fx, fy = exp(VectorField(x * x, ZERO), 3).jet(3)
    assert fx.agrees_with(x + x * x + x**3, 3)
    assert fy.agrees_with(y, 3)


def test_exp_xy():
    # flow of x' = x y is x e^y
    fx, _ = exp(VectorField(x * y, ZERO), 3).jet(3)
    assert fx.agrees_with(x + x * y + (x * y * y).scale(fmpq(1, 2)), 3)


def test_log_identity():
    X = log(Diffeo.from_polynomials(x, y), 4)
    assert X.A.is_zero() and X.B.is_zero()


def test_log_x_plus_x_squared():
    X = log(Diffeo.from_polynomials(x + x * x, y), 4)
    assert X.A.agrees_with(x * x - x**3 + (x**4).scale(fmpq(3, 2)), 4)
    assert X.B.agrees_with(ZERO, 4)


def test_log_example_leading_jet():
    c = example_pq().level().param("c")
    X = log(example_pq(), 2)
    assert X.A.agrees_with(x * x + (x * y).scale(c), 2)
    assert X.B.agrees_with((x * y).scale(-1) - (y * y).scale(c), 2)


@pytest.mark.parametrize("seed", range(6))
def test_exp_log_round_trip(seed):
    X = random_field(random.Random(seed), order=2 + seed % 2, degree=4)
    back = log(exp(X, 8), 8)
    assert back.A.agrees_with(X.A, 8) and back.B.agrees_with(X.B, 8)


@pytest.mark.parametrize("F", curated_maps()[:8], ids=lambda F: F.text()[:30])
def test_lowest_jet_of_log(F):
    k1 = F.order()
    X = log(F, k1 + 2)
    gx, gy = F.minus_identity(k1)
    assert X.A.homogeneous(k1) == gx.homogeneous(k1)
    assert X.B.homogeneous(k1) == gy.homogeneous(k1)
    assert X.order() == k1


def _compose(F, G, N):
    """Jet of ``F o G`` through degree ``N`` (brute-force substitution)."""
    fx, fy = F.jet(N)
    gx, gy = G.jet(N)
    return fx.substitute(gx, gy).truncate(N), fy.substitute(gx, gy).truncate(N)


@pytest.mark.parametrize("seed", range(4))
def test_exp_homomorphism(seed):
    X = random_field(random.Random(100 + seed), order=2, degree=3)
    N = 6
    F = exp(X, N)
    cx, cy = _compose(F, F, N)
    dx, dy = exp(X.scale(2), N).jet(N)
    assert cx.agrees_with(dx, N) and cy.agrees_with(dy, N)


# ---------------------------------------------------------------------------
# characteristic directions
# ---------------------------------------------------------------------------


def _dirs(F):
    return sorted((d.point.text(), d.multiplicity, d.degenerate) for d in characteristic_directions(F))


def test_example_directions():
    assert _dirs(example_pq()) == [("[-c:1]", 1, True), ("[0:1]", 1, False), ("[1:0]", 1, False)]


def test_three_nondegenerate_directions():
    F = Diffeo.from_polynomials(x + x * x, y + y * y)
    assert _dirs(F) == [("[0:1]", 1, False), ("[1:0]", 1, False), ("[1:1]", 1, False)]


def test_degenerate_triple_direction():
    F = Diffeo.from_polynomials(x, y + x * x)
    assert _dirs(F) == [("[0:1]", 3, True)]


def test_dicritical_map():
    F = Diffeo.from_polynomials(x - x * x + y**3, y - x * y)
    with pytest.raises(DicriticalMap):
        characteristic_directions(F)


@pytest.mark.parametrize("seed", range(10))
def test_directions_covariant_under_diagonal_conjugation(seed):
    rng = random.Random(seed)
    gx = poly({(2, 0): rng.randint(-3, 3), (1, 1): rng.randint(-3, 3), (0, 2): rng.randint(-3, 3)})
    gy = poly({(2, 0): rng.randint(-3, 3), (1, 1): rng.randint(-3, 3), (0, 2): rng.randint(-3, 3) or 1})
    F = Diffeo.from_polynomials(x + gx, y + gy)
    a, b = fmpq(rng.randint(1, 4)), fmpq(rng.randint(1, 4), rng.randint(1, 3))
    # G = L^-1 F L with L(x, y) = (a x, b y)
    Gx = gx.substitute(x.scale(a), y.scale(b)).scale(1 / a)
    Gy = gy.substitute(x.scale(a), y.scale(b)).scale(1 / b)
    G = Diffeo.from_polynomials(x + Gx, y + Gy)
    try:
        dF = characteristic_directions(F)
    except DicriticalMap:
        with pytest.raises(DicriticalMap):
            characteristic_directions(G)
        return
    dG = characteristic_directions(G)
    # a direction [u:v] of G maps to [a u : b v] for F
    hF = sum(d.multiplicity for d in dF)
    hG = sum(d.multiplicity for d in dG)
    assert hF == hG
    hpoly = characteristic_polynomial(F)
    for d in dG:
        u, v = d.point.a, d.point.b
        assert is_zero(homog_eval(hpoly, a * u, b * v))


# ---------------------------------------------------------------------------
# fixed curves
# ---------------------------------------------------------------------------


def test_fixed_axis():
    fc = fixed_curves(Diffeo.from_polynomials(x + y * y, y + y * y))
    assert fc.curve.text() == "y"
    assert fc.tangents == [ProjPoint(1, 0)]
    assert fc.tangent_to(ProjPoint(1, 0))


def test_example_isolated_fixed_point():
    from tidgerm.parse import parse_germ

    P = parse_germ("param c\nF.x = x + c*y + x^2\nF.y = y - y^2\n").F
    assert fixed_curves(P).is_unit
    assert fixed_curves(example_pq()).is_unit


def test_fixed_vertical_axis():
    fc = fixed_curves(Diffeo.from_polynomials(x * (Jet2.const(1) + x), y * (Jet2.const(1) + x)))
    assert fc.curve.text() == "x"
    assert fc.tangent_to(ProjPoint(0, 1))


def test_fixed_curves_multiplicity():
    fc = fixed_curves(Diffeo.from_polynomials(x + y * y, y + y * y))
    assert fc.g.text() == "y^2"
    assert fc.factors[0][1] == 2


def test_fixed_curves_needs_exact_map():
    F = Diffeo(*Diffeo.from_polynomials(x + x * x, y).jet(3))
    assert not F.is_exact
    with pytest.raises(NotExact):
        fixed_curves(F)


@given(st.integers(-4, 4), st.integers(-4, 4))
@settings(max_examples=25, deadline=None)
def test_common_factor_is_fixed_curve(a, b):
    F = Diffeo.from_polynomials(x + x * y + (x * x).scale(fmpq(a)), y + (x * y).scale(fmpq(b)))
    fc = fixed_curves(F)
    # every factor of g vanishes on fixed points: here x divides both components of F - id
    assert any(f.text() == "x" for f, _ in fc.factors)
