"""Numeric orbits, tangent directions and model-domain checks."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import example_pq
from tidgerm.algebra.jet import Jet2
from tidgerm.classify import VivasShape
from tidgerm.dynamics import (
    NumericMap,
    VivasDomain,
    compile_map,
    iterate,
    iterated_tangents,
    mutually_asymptotic,
    normalizing_scales,
    numeric_directions,
    projective_distance,
    tangent_direction,
    vivas_checks,
)
from tidgerm.errors import Escape, NotConvergent, ShapeMismatch
from tidgerm.germs import Diffeo

x, y = Jet2.x(), Jet2.y()


def _map(fx, fy):
    return compile_map(Diffeo.from_polynomials(fx, fy))


# ---------------------------------------------------------------------------
# orbits
# ---------------------------------------------------------------------------


def test_closed_form_orbit():
    # x/(1 - x) iterates to x0 / (1 - n x0)
    F = Diffeo(rational=((x, Jet2.const(1) - x), (y, Jet2.const(1))))
    orbit = iterate(compile_map(F), (-0.1, 0.0), 10_000)
    n = np.arange(10_001)
    exact = -0.1 / (1 + 0.1 * n)
    assert np.max(np.abs(orbit.points[:, 0] - exact)) < 1e-12
    assert np.all(orbit.points[:, 1] == 0)


def test_identity_orbit_is_constant():
    orbit = iterate(_map(x, y), (0.3, -0.2j), 50)
    assert np.all(orbit.points == orbit.points[0])


def test_escape_raises_with_partial_orbit():
    f = NumericMap.from_callable(lambda a, b: (2 * a, b))
    with pytest.raises(Escape) as info:
        iterate(f, (1.0, 0.0), 10, radius=10.0)
    assert info.value.orbit.escaped
    assert info.value.orbit.steps == 3


def test_escape_flag():
    f = NumericMap.from_callable(lambda a, b: (2 * a, b))
    orbit = iterate(f, (1.0, 0.0), 10, radius=10.0, on_escape="flag")
    assert orbit.escaped and len(orbit.points) == 4


def test_compile_with_parameter_binding():
    f = compile_map(example_pq(), {"c": 2.0})
    a, b = f.evaluate(0.1, 0.1)
    assert a == pytest.approx(0.1 + 0.01 + 2.0 * 0.01)
    assert b == pytest.approx((0.1 - 0.1 * 0.01) / (1 + 0.1 + 2.0 * 0.1))


def test_csv():
    orbit = iterate(_map(x - x * x, y), (0.5, 0.0), 2)
    lines = orbit.to_csv().splitlines()
    assert lines[0] == "n,re_x,im_x,re_y,im_y"
    assert lines[1] == "0,0.5,0.0,0.0,0.0"
    assert lines[2] == "1,0.25,0.0,0.0,0.0"


# ---------------------------------------------------------------------------
# directions
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "fx, fy, start, direction",
    [
        (x - x * x, y - y * y, (0.1, 0.05), (1, 1)),
        (x - x * x + x * y, y - (y * y).scale(2), (0.1, 0.05), (3, 1)),
        (x - x * x, y - (x * y).scale(3), (0.1, 0.1), (1, 0)),
    ],
)
def test_tangent_direction(fx, fy, start, direction):
    orbit = iterate(_map(fx, fy), start, 100_000)
    v, residual = tangent_direction(orbit, ratio=1e-3)
    assert projective_distance(v, direction) < 1e-5
    assert residual < 1e-4
    F = Diffeo.from_polynomials(fx, fy)
    assert min(projective_distance(v, d) for d in numeric_directions(F)) < 1e-5


def test_extrapolation_beats_raw_direction():
    orbit = iterate(_map(x - x * x, y - y * y), (0.1, 0.05), 20_000)
    raw, _ = tangent_direction(orbit, ratio=1e-2, extrapolate=False)
    fine, _ = tangent_direction(orbit, ratio=1e-2)
    assert projective_distance(fine, (1, 1)) < projective_distance(raw, (1, 1))


def test_not_convergent():
    orbit = iterate(_map(x + x * x, y), (0.01, 0.0), 20, radius=100.0)
    with pytest.raises(NotConvergent):
        tangent_direction(orbit, tail=10)


def test_numeric_directions_of_example():
    dirs = numeric_directions(example_pq(), {"c": 2.0})
    want = [(1, 0), (0, 1), (-2, 1)]
    for w in want:
        assert min(projective_distance(w, d) for d in dirs) < 1e-12


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_projective_distance_properties(a, b, c, d):
    if abs(a) + abs(b) < 1e-6 or abs(c) + abs(d) < 1e-6:
        return
    assert projective_distance((a, b), (c, d)) == pytest.approx(projective_distance((c, d), (a, b)))
    assert projective_distance((a, b), (3 * a, 3 * b)) < 1e-12
    assert 0 <= projective_distance((a, b), (c, d)) <= 1 + 1e-12


def test_iterated_tangents():
    orbit = iterate(_map(x - x * x, y - y * y), (0.1, 0.05), 100_000)
    levels = iterated_tangents(orbit, 2, ratio=1e-3)
    assert [t.chart for t in levels] == ["chart_t", "chart_t"]
    assert abs(levels[0].coordinate - 1) < 1e-4


def test_mutually_asymptotic_orbits():
    f = _map(x - x * x, y - y * y)
    o1 = iterate(f, (0.1, 0.05), 50_000)
    o2 = iterate(f, (0.12, 0.07), 50_000)
    o3 = iterate(f, (0.1, 0.0), 50_000)
    assert mutually_asymptotic(o1, o2, depth=1, tol=1e-3, ratio=1e-2)
    assert not mutually_asymptotic(o1, o3, depth=1, tol=1e-3, ratio=1e-2)


# ---------------------------------------------------------------------------
# model domains
# ---------------------------------------------------------------------------

SHAPE = VivasShape(r=1, m=0, a=-1, b=0, c=-1, p=1, leaf=None)


def test_vivas_checks_on_normal_form():
    domain = VivasDomain(0.1, 0.1, 0.3, 2, 1, 0, 1)
    rep = vivas_checks(_map(x - x * x, y - x * y * y), SHAPE, domain, samples=1000, N=3, steps=200, orbit_steps=5000)
    assert rep["sampled"] == 1000
    assert rep["invariance_fraction"] >= 0.99
    assert rep["exponent"]["slope"] >= 3
    assert rep["passed"]


def test_domain_samples_lie_inside():
    domain = VivasDomain(0.1, 0.1, 0.3, 2, 1, 0, 2)
    z, u = domain.sample(200, rng=1)
    assert 0 < len(z) <= 200
    assert np.all(domain.contains(z, u))
    assert np.all(domain.margin(z, u) > 0)


def test_empty_domain():
    # |z| < |u|^M with |u| ~ 0.1 and M = 40 leaves nothing
    domain = VivasDomain(0.1, 0.1, 0.3, 40, 1, 0, 1)
    z, u = domain.sample(50, rng=0, max_batches=3)
    assert len(z) == 0
    rep = vivas_checks(_map(x - x * x, y - x * y * y), SHAPE, VivasDomain(0.1, 0.1, 0.3, 40, 1, 0, 1), samples=5)
    assert rep["empty"] and not rep["passed"]


def test_shape_must_be_normalized():
    bad = VivasShape(r=1, m=0, a=2, b=0, c=-1, p=1, leaf=None)
    with pytest.raises(ShapeMismatch):
        vivas_checks(_map(x, y), bad, VivasDomain(0.1, 0.1, 0.3, 2, 1, 0, 1))
    with pytest.raises(ShapeMismatch):
        vivas_checks(_map(x, y), SHAPE, VivasDomain(0.1, 0.1, 0.3, 2, 2, 0, 1))


@pytest.mark.parametrize("kwargs", [dict(eps=0.6), dict(delta=0), dict(eta=0), dict(M=1), dict(r=0), dict(p=0)])
def test_domain_parameters(kwargs):
    params = dict(eps=0.1, delta=0.1, eta=0.3, M=2, r=1, m=0, p=1) | kwargs
    with pytest.raises(ValueError):
        VivasDomain(**params)


def test_normalizing_scales():
    shape = VivasShape(r=2, m=1, a=3, b=0, c=-2, p=2, leaf=None)
    alpha, beta = normalizing_scales(shape)
    # beta^p = a / c and alpha^r beta^m a = -1
    assert beta**2 == pytest.approx(3 / -2)
    assert alpha**2 * beta * 3 == pytest.approx(-1)
