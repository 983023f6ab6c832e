"""Double-precision experiments: orbits, tangents and model domains.

Exact maps are compiled into numpy evaluators with parameters replaced by
user-supplied numeric bindings.  Nothing here is rigorous; the routines
report residuals and fractions so that callers can judge agreement with the
symbolic side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra.field import to_complex
from .errors import Escape, NotConvergent, ShapeMismatch
from .germs import Diffeo, characteristic_polynomial

__all__ = [
    "NumericMap",
    "NumericOrbit",
    "compile_map",
    "iterate",
    "tangent_direction",
    "iterated_tangents",
    "mutually_asymptotic",
    "numeric_directions",
    "projective_distance",
    "VivasDomain",
    "normalizing_scales",
    "vivas_checks",
]


# ---------------------------------------------------------------------------
# compilation
# ---------------------------------------------------------------------------


def _poly_source(j, bindings, consts):
    """Python source of a polynomial; coefficients are appended to ``consts``."""
    parts = []
    for (i, k), c in sorted(j.terms.items()):
        consts.append(to_complex(c, bindings))
        mono = [f"K[{len(consts) - 1}]"]
        if i:
            mono.append("x" if i == 1 else f"x**{i}")
        if k:
            mono.append("y" if k == 1 else f"y**{k}")
        parts.append("*".join(mono))
    return " + ".join(parts) if parts else "0j"


class NumericMap:
    """Numeric evaluator of a map; works on scalars and numpy arrays."""

    def __init__(self, fn, text: str = ""):
        self._fn = fn
        self.text = text

    @classmethod
    def from_callable(cls, fn, text: str = "") -> "NumericMap":
        return cls(fn, text)

    def evaluate(self, x, y):
        return self._fn(x, y)

    __call__ = evaluate


def compile_map(F: Diffeo, bindings=None) -> NumericMap:
    """Compile an exact map, substituting ``bindings`` for its parameters.

    The components are turned into one Python expression each (numerator
    over denominator) with the coefficients as complex constants.

    Examples
    --------
    >>> from tidgerm.algebra.jet import Jet2
    >>> x, y = Jet2.x(), Jet2.y()
    >>> f = compile_map(Diffeo.from_polynomials(x + x * x, y))
    >>> f.evaluate(0.5, 0.0)
    ((0.75+0j), 0j)
    """
    if not F.is_exact:
        raise ValueError("only exact maps can be compiled")
    consts = []
    comps = []
    for num, den in F.rational:
        ns = _poly_source(num, bindings, consts)
        if set(den.terms) <= {(0, 0)}:
            d = to_complex(den.terms.get((0, 0), 1), bindings)
            consts.append(1 / d)
            comps.append(f"({ns}) * K[{len(consts) - 1}]")
        else:
            comps.append(f"({ns}) / ({_poly_source(den, bindings, consts)})")
    src = f"lambda x, y: ({comps[0]}, {comps[1]})"
    fn = eval(src, {"K": tuple(consts), "__builtins__": {}})  # noqa: S307 - generated from exact terms
    return NumericMap(fn, F.text())


# ---------------------------------------------------------------------------
# orbits
# ---------------------------------------------------------------------------


@dataclass
class NumericOrbit:
    """``points[n]`` is the ``n``-th iterate of ``start``."""

    points: np.ndarray
    start: tuple
    steps: int
    escaped: bool = False

    @property
    def norms(self) -> np.ndarray:
        return np.sqrt(np.abs(self.points[:, 0]) ** 2 + np.abs(self.points[:, 1]) ** 2)

    def to_csv(self) -> str:
        lines = ["n,re_x,im_x,re_y,im_y"]
        for n, (a, b) in enumerate(self.points):
            a, b = complex(a), complex(b)
            lines.append(f"{n},{a.real!r},{a.imag!r},{b.real!r},{b.imag!r}")
        return "\n".join(lines) + "\n"


def iterate(F_num, z0, n: int, radius: float = 10.0, on_escape: str = "raise") -> NumericOrbit:
    """Orbit of ``z0`` under ``F_num`` for ``n`` steps.

    Stops early if a point leaves the ball of ``radius`` or is not finite;
    with ``on_escape='raise'`` this raises :class:`Escape` carrying the
    partial orbit, with ``'flag'`` the partial orbit is returned with
    ``escaped`` set.

    Examples
    --------
    >>> f = NumericMap.from_callable(lambda x, y: (x / (1 - x), y))
    >>> o = iterate(f, (-0.1, 0.0), 10)
    >>> bool(abs(o.points[-1][0] - (-0.05)) < 1e-15)
    True
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    pts = np.empty((n + 1, 2), dtype=complex)
    x, y = complex(z0[0]), complex(z0[1])
    pts[0] = (x, y)
    ev = F_num.evaluate if hasattr(F_num, "evaluate") else F_num
    r2 = radius * radius
    for i in range(1, n + 1):
        try:
            x, y = ev(x, y)
            x, y = complex(x), complex(y)
            nrm = x.real * x.real + x.imag * x.imag + y.real * y.real + y.imag * y.imag
            bad = not (nrm <= r2)
        except (ZeroDivisionError, OverflowError):
            bad = True
        if bad:
            orbit = NumericOrbit(pts[:i].copy(), (z0[0], z0[1]), i - 1, True)
            if on_escape == "raise":
                raise Escape(f"orbit left the ball of radius {radius} at step {i}", orbit)
            return orbit
        pts[i] = (x, y)
    return NumericOrbit(pts, (z0[0], z0[1]), n)


# ---------------------------------------------------------------------------
# directions
# ---------------------------------------------------------------------------


def _normalize_dir(a: complex, b: complex):
    """Affine representative ``[1 : b/a]`` or ``[a/b : 1]``."""
    if abs(a) >= abs(b):
        return (1 + 0j, b / a)
    return (a / b, 1 + 0j)


def projective_distance(v, w) -> float:
    """Chordal distance ``|v x w| / (|v| |w|)`` between two directions."""
    a1, b1 = v
    a2, b2 = w
    num = abs(a1 * b2 - a2 * b1)
    den = math.hypot(abs(a1), abs(b1)) * math.hypot(abs(a2), abs(b2))
    return num / den


def _check_convergent(orbit: NumericOrbit, tail: int, ratio: float):
    norms = orbit.norms
    if len(norms) <= tail:
        raise NotConvergent(f"orbit shorter than the {tail}-point tail")
    t = norms[-tail:]
    if not np.all(np.diff(t) < 0):
        raise NotConvergent("norms are not decreasing along the tail")
    if norms[0] == 0 or t[-1] >= ratio * norms[0]:
        raise NotConvergent(f"final norm is not below {ratio:g} of the initial norm")


def tangent_direction(orbit: NumericOrbit, tail: int = 50, ratio: float = 1e-4, extrapolate: bool = True):
    """Limit direction of a convergent orbit.

    The direction of ``z_n`` is written in the affine chart chosen by the
    last point (``w_n = y_n / x_n`` or ``x_n / y_n``).  Along parabolic
    orbits ``w_n = w + A/n + o(1/n)``, so with ``extrapolate`` the estimate
    is the Richardson value ``2 w_n - w_(n/2)`` and the residual is its
    distance to the same estimate one halving earlier; otherwise the
    estimate is ``w_n`` and the residual the largest chordal distance
    between it and the tail directions.

    Returns ``((a, b), residual)`` with ``(a, b)`` an affine representative.

    Raises
    ------
    NotConvergent
        If the tail norms are not decreasing or not small enough.
    """
    _check_convergent(orbit, tail, ratio)
    if not extrapolate:
        return _direction_of(orbit.points, tail)
    pts = orbit.points
    n = len(pts) - 1
    last = pts[-1]
    use_x = abs(last[0]) >= abs(last[1])

    def w(i):
        a, b = pts[i]
        return b / a if use_x else a / b

    r1 = 2 * w(n) - w(n // 2)
    r2 = 2 * w(n // 2) - w(n // 4)
    v = (1 + 0j, complex(r1)) if use_x else (complex(r1), 1 + 0j)
    return v, float(abs(r1 - r2))


def _direction_of(points, tail):
    last = points[-1]
    v = _normalize_dir(last[0], last[1])
    res = 0.0
    for p in points[-tail:]:
        res = max(res, projective_distance(v, (p[0], p[1])))
    return v, float(res)


def numeric_directions(F: Diffeo, bindings=None):
    """Characteristic directions evaluated numerically, as ``(a, b)`` pairs.

    ``h[j]`` multiplies ``x^(d-j) y^j``; the finite roots of ``h(a, 1)`` give
    ``[a:1]`` and leading zeros of ``h`` give ``[1:0]``.
    """
    h = [to_complex(c, bindings) for c in characteristic_polynomial(F)]
    out = []
    lead = 0
    while lead < len(h) and h[lead] == 0:
        lead += 1
    if lead:
        out.append((1 + 0j, 0j))
    if len(h) - lead > 1:
        out.extend((complex(r), 1 + 0j) for r in np.roots(h[lead:]))
    return [_normalize_dir(a, b) for a, b in out]


@dataclass
class TangentLevel:
    """One level of the iterated tangents of an orbit."""

    level: int
    chart: str
    coordinate: complex
    residual: float

    def to_dict(self):
        return {
            "level": self.level,
            "chart": self.chart,
            "coordinate": [self.coordinate.real, self.coordinate.imag],
            "residual": self.residual,
        }


def iterated_tangents(orbit: NumericOrbit, depth: int, tail: int = 50, ratio: float = 1e-4):
    """Limit points of an orbit lifted through ``depth`` successive blow-ups.

    At each level the limit direction ``[1 : tau]`` (``|tau| <= 1``) or
    ``[sigma : 1]`` is read off the tail; the orbit is then lifted to the
    chart centred at that point, ``(x, y/x - tau)`` or ``(x/y - sigma, y)``.

    Raises
    ------
    NotConvergent
        If the orbit or one of its lifts does not converge.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    _check_convergent(orbit, tail, ratio)
    pts = orbit.points
    out = []
    for level in range(1, depth + 1):
        (a, b), res = _direction_of(pts, tail)
        with np.errstate(all="ignore"):
            if abs(a) >= abs(b):
                tau = b / a
                new = np.column_stack([pts[:, 0], pts[:, 1] / pts[:, 0] - tau])
                out.append(TangentLevel(level, "chart_t", complex(tau), res))
            else:
                sigma = a / b
                new = np.column_stack([pts[:, 0] / pts[:, 1] - sigma, pts[:, 1]])
                out.append(TangentLevel(level, "chart_s", complex(sigma), res))
        if level == depth:
            break
        finite = np.all(np.isfinite(new[-tail:]))
        norms = np.sqrt(np.abs(new[-tail:, 0]) ** 2 + np.abs(new[-tail:, 1]) ** 2)
        if not finite or norms[-1] > norms[0]:
            raise NotConvergent(f"the lift at level {level} does not converge")
        if norms[-1] == 0:
            # the orbit lies on the lifted axis; deeper levels repeat
            pts = new
            continue
        pts = new
    return out


def mutually_asymptotic(o1: NumericOrbit, o2: NumericOrbit, depth: int = 3, tol: float = 1e-6, tail: int = 50, ratio=1e-4):
    """Whether two orbits have the same iterated tangents up to ``depth``."""
    t1 = iterated_tangents(o1, depth, tail, ratio)
    t2 = iterated_tangents(o2, depth, tail, ratio)
    for a, b in zip(t1, t2):
        if a.chart != b.chart or abs(a.coordinate - b.coordinate) > tol:
            return False
    return True


# ---------------------------------------------------------------------------
# model parabolic domains
# ---------------------------------------------------------------------------


@dataclass
class VivasDomain:
    """``{|w - eps| < eps, |arg w| < eta, |u^p - delta| < delta, |z| < |u|^M}``, ``w = z^r u^m``."""

    eps: float
    delta: float
    eta: float
    M: int
    r: int
    m: int
    p: int

    def __post_init__(self):
        if not (0 < self.eps < 0.5 and 0 < self.delta < 0.5):
            raise ValueError("eps and delta must lie in (0, 1/2)")
        if self.eta <= 0 or self.M < 2:
            raise ValueError("eta must be positive and M at least 2")
        if self.r < 1 or self.m < 0 or self.p < 1:
            raise ValueError("need r >= 1, m >= 0, p >= 1")

    def contains(self, z, u):
        z = np.asarray(z, dtype=complex)
        u = np.asarray(u, dtype=complex)
        w = z**self.r * u**self.m
        up = u**self.p
        with np.errstate(all="ignore"):
            return (
                (np.abs(w - self.eps) < self.eps)
                & (np.abs(np.angle(w)) < self.eta)
                & (np.abs(up - self.delta) < self.delta)
                & (np.abs(z) < np.abs(u) ** self.M)
            )

    def margin(self, z, u):
        """Smallest slack of the four inequalities (negative outside)."""
        z = np.asarray(z, dtype=complex)
        u = np.asarray(u, dtype=complex)
        w = z**self.r * u**self.m
        with np.errstate(all="ignore"):
            s1 = self.eps - np.abs(w - self.eps)
            s2 = self.eta - np.abs(np.angle(w))
            s3 = self.delta - np.abs(u**self.p - self.delta)
            s4 = np.abs(u) ** self.M - np.abs(z)
        return np.minimum(np.minimum(s1, s2), np.minimum(s3, s4))

    def sample(self, n: int, rng=None, max_batches: int = 200):
        """Random points of the domain (fewer than ``n`` if it looks empty).

        ``u`` is drawn with ``u^p`` uniform in its disc and a random branch
        of the root; ``w`` uniformly in the sector of its disc; ``z`` is a
        random ``r``-th root of ``w / u^m``; points violating ``|z| < |u|^M``
        are rejected.
        """
        rng = np.random.default_rng(rng)
        zs, us = [], []
        got = 0
        batch = max(4 * n, 1000)
        for _ in range(max_batches):
            s = self.delta + self.delta * np.sqrt(rng.random(batch)) * np.exp(2j * np.pi * rng.random(batch))
            u = s ** (1.0 / self.p) * np.exp(2j * np.pi * rng.integers(0, self.p, batch) / self.p)
            w = self.eps + self.eps * np.sqrt(rng.random(batch)) * np.exp(2j * np.pi * rng.random(batch))
            keep = np.abs(np.angle(w)) < self.eta
            u, w = u[keep], w[keep]
            base = (w / u**self.m) ** (1.0 / self.r)
            z = base * np.exp(2j * np.pi * rng.integers(0, self.r, len(base)) / self.r)
            ok = self.contains(z, u)
            zs.append(z[ok])
            us.append(u[ok])
            got += int(ok.sum())
            if got >= n:
                break
        z = np.concatenate(zs)[:n] if zs else np.empty(0, complex)
        u = np.concatenate(us)[:n] if us else np.empty(0, complex)
        return z, u

    def to_dict(self):
        return {"eps": self.eps, "delta": self.delta, "eta": self.eta, "M": self.M, "r": self.r, "m": self.m, "p": self.p}


def normalizing_scales(shape, bindings=None):
    """``(alpha, beta)`` with ``z = alpha Z, u = beta U`` making ``a = c = -1``.

    ``beta^p = a / c`` and ``alpha^r = -1 / (beta^m a)`` (principal roots).
    """
    a = to_complex(shape.a, bindings)
    c = to_complex(shape.c, bindings)
    beta = (a / c) ** (1.0 / shape.p)
    alpha = (-1.0 / (beta**shape.m * a)) ** (1.0 / shape.r)
    return alpha, beta


def vivas_checks(
    F_num,
    shape,
    domain: VivasDomain,
    samples: int = 1000,
    N: int = 3,
    steps: int = 2000,
    orbit_steps: int = 20000,
    seed: Optional[int] = 0,
    bindings=None,
) -> dict:
    """Numerical checks of the model domain for a chart map in normal form.

    ``F_num`` acts on ``(z, u)``; ``shape`` must be normalized
    (``a = c = -1``) and agree with ``domain`` on ``r, m, p``.

    Checks
    ------
    invariance
        fraction of sampled points whose image stays in the domain, and the
        smallest slack of the images;
    argument drift
        fraction of sampled orbits along which ``|arg(z^r u^m)|`` has
        decreased after ``steps`` iterations;
    exponent
        along one orbit, the least-squares slope of ``log|z_n|`` against
        ``log|u_n|`` over the tail, the first index ``n0`` after which
        ``|z_n| <= C |u_n|^N`` with ``C = |z_n0| / |u_n0|^N``, and ``C``.

    Raises
    ------
    ShapeMismatch
        If the shape is not normalized or disagrees with the domain.
    """
    a = to_complex(shape.a, bindings)
    c = to_complex(shape.c, bindings)
    if abs(a + 1) > 1e-12 or abs(c + 1) > 1e-12:
        raise ShapeMismatch("shape must be normalized so that a = c = -1")
    if (shape.r, shape.m, shape.p) != (domain.r, domain.m, domain.p):
        raise ShapeMismatch("shape and domain disagree on (r, m, p)")
    ev = F_num.evaluate if hasattr(F_num, "evaluate") else F_num
    z, u = domain.sample(samples, seed)
    report = {"domain": domain.to_dict(), "requested": samples, "sampled": int(len(z)), "N": N}
    if len(z) == 0:
        report.update({"empty": True, "invariance_fraction": None, "passed": False})
        return report
    report["empty"] = False
    z1, u1 = ev(z, u)
    inside = domain.contains(z1, u1)
    report["invariance_fraction"] = float(inside.mean())
    report["min_image_margin"] = float(np.min(domain.margin(z1, u1)))
    # argument drift
    w0 = np.abs(np.angle(z**domain.r * u**domain.m))
    zz, uu = z.copy(), u.copy()
    with np.errstate(all="ignore"):
        for _ in range(steps):
            zz, uu = ev(zz, uu)
    wn = np.abs(np.angle(zz**domain.r * uu**domain.m))
    finite = np.isfinite(wn)
    report["arg_drift_fraction"] = float(np.mean(finite & ((wn < w0) | (wn < 1e-12))))
    # exponent check along the sample closest to the domain's core
    k = int(np.argmax(domain.margin(z, u)))
    orbit = iterate(F_num, (complex(z[k]), complex(u[k])), orbit_steps, radius=10.0, on_escape="flag")
    report["exponent"] = _exponent_check(orbit, N)
    report["passed"] = report["invariance_fraction"] >= 0.99 and report["exponent"]["slope"] >= N
    return report


def _exponent_check(orbit: NumericOrbit, N: int) -> dict:
    zs = np.abs(orbit.points[:, 0])
    us = np.abs(orbit.points[:, 1])
    ok = (zs > 0) & (us > 0)
    lz, lu = np.log(zs[ok]), np.log(us[ok])
    n = len(lz)
    if n < 10:
        return {"slope": float("nan"), "n0": None, "C": None, "holds_after_n0": False}
    t0 = n // 2
    slope = float(np.polyfit(lu[t0:], lz[t0:], 1)[0])
    # n0: first index from which |z_n|/|u_n|^N is non-increasing to the end
    ratio = lz - N * lu
    rises = np.nonzero(np.diff(ratio) > 1e-15)[0]
    n0 = int(rises[-1] + 1) if len(rises) else 0
    if n0 >= n - 1:
        n0 = None
    C = float(np.exp(ratio[n0])) if n0 is not None else None
    holds = bool(n0 is not None and np.all(ratio[n0:] <= ratio[n0] + 1e-12))
    return {"slope": slope, "n0": n0, "C": C, "holds_after_n0": holds}
