"""Deterministic test corpora: random fields and maps plus curated families.

Everything is built from fixed seeds so failures are reproducible.
"""

from __future__ import annotations

import random
from fractions import Fraction

from flint import fmpq

from tidgerm.algebra.field import is_zero
from tidgerm.algebra.jet import Jet2
from tidgerm.blowup import contains_saddle_node, is_dicritical, resolve, second_type, strict_separatrices
from tidgerm.germs import Diffeo, VectorField, exp
from tidgerm.index import separatrix_cs

X0, Y0 = Jet2.x(), Jet2.y()


def q(v) -> fmpq:
    v = Fraction(v)
    return fmpq(v.numerator, v.denominator)


def poly(coeffs: dict) -> Jet2:
    """Exact polynomial from ``{(i, j): rational}``."""
    return Jet2({k: q(c) for k, c in coeffs.items() if c != 0})


def random_rational(rng: random.Random, lo=-5, hi=5) -> Fraction:
    den = rng.choice((1, 1, 1, 2, 3))
    return Fraction(rng.randint(lo * den, hi * den), den)


def random_poly(rng, lo_deg, hi_deg, density=0.6) -> dict:
    out = {}
    for d in range(lo_deg, hi_deg + 1):
        for i in range(d + 1):
            if rng.random() < density:
                c = random_rational(rng)
                if c:
                    out[(i, d - i)] = c
    return out


def random_field(rng, order=2, degree=4, density=0.6) -> VectorField:
    """Polynomial field of exact order ``order``, degree at most ``degree``."""
    while True:
        A = random_poly(rng, order, degree, density)
        B = random_poly(rng, order, degree, density)
        X = VectorField(poly(A), poly(B))
        if X.order() == order:
            return X


def random_fields(n, seed, order=2, degree=4, non_dicritical=False, density=0.6):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        X = random_field(rng, order if isinstance(order, int) else rng.choice(order), degree, density)
        if non_dicritical and is_dicritical(X):
            continue
        out.append(X)
    return out


def polymap(X: VectorField, N: int) -> Diffeo:
    """Polynomial map agreeing with ``exp X`` through degree ``N``."""
    gx, gy = exp(X, N).jet(N)
    return Diffeo.from_polynomials(Jet2(dict(gx.terms)), Jet2(dict(gy.terms)))


def random_maps(n, seed, degree=3, density=0.5):
    """Maps ``id + (order-2 part) + (degree-3 part)`` with isolated characteristic directions."""
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        gx = random_poly(rng, 2, degree, density)
        gy = random_poly(rng, 2, degree, density)
        gx[(1, 0)] = gx.get((1, 0), 0) + 1
        gy[(0, 1)] = gy.get((0, 1), 0) + 1
        F = Diffeo.from_polynomials(poly(gx), poly(gy))
        if F.order() != 2:
            continue
        # non-dicritical leading part
        p = [c for c in F.minus_identity(2)[0].homogeneous(2)]
        qq = [c for c in F.minus_identity(2)[1].homogeneous(2)]
        h = [0] * 4
        for j, c in enumerate(qq):
            h[j] += c
        for j, c in enumerate(p):
            h[j + 1] -= c
        if all(c == 0 for c in h):
            continue
        out.append(F)
    return out


# ---------------------------------------------------------------------------
# curated families
# ---------------------------------------------------------------------------


def poincare_dulac(n: int) -> VectorField:
    """``x d/dx + (n y + x^n) d/dy`` (resonant node, one smooth separatrix)."""
    return VectorField(X0, Y0.scale(n) + X0**n)


def saddle_node(p: int, nu) -> VectorField:
    """``x^(p+1) d/dx + y (1 + nu x^p) d/dy``."""
    return VectorField(X0 ** (p + 1), Y0 * (Jet2.const(1) + (X0**p).scale(q(nu))))


def pure_domain_fields():
    """Fields whose exponential has a pure-domain direction along ``[1:0]``."""
    return [
        VectorField(X0 * X0, (X0 * Y0).scale(2) + X0**3),
        VectorField(X0**3, (X0 * X0 * Y0).scale(2) + X0**4),
    ]


CURATED_FIELDS = (
    [poincare_dulac(n) for n in (2, 3, 4)]
    + [saddle_node(p, nu) for p in (1, 2) for nu in (0, 1, Fraction(1, 2))]
    + [
        VectorField(X0 * X0, Y0 * Y0),
        VectorField(X0, Y0.scale(-1)),
        VectorField(X0 * X0, Y0),
        VectorField(X0, Y0.scale(2)),
        VectorField(Y0 * Y0 - X0**3, Y0 * X0),
        VectorField(X0 * X0 + X0 * Y0, Y0 * Y0.scale(2)),
    ]
)


def example_pq(c=None) -> Diffeo:
    """Blow-up transform at ``[1:0]`` of ``(x + c y + x^2, y - y^2)`` over ``Q(c)``."""
    from tidgerm.parse import parse_germ
    from tidgerm.blowup import DivisorPoint, blow_up_diffeo

    spec = parse_germ("param c\nF.x = x + c*y + x^2\nF.y = y - y^2\nblowup [1:0]\n")
    F = spec.F
    for v in spec.blowups:
        F = blow_up_diffeo(F, DivisorPoint.from_direction(v))
    return F


def curated_maps():
    x, y = X0, Y0
    return [
        Diffeo.from_polynomials(x + x * x, y + y * y),
        Diffeo.from_polynomials(x - x * x, y - y * y),
        Diffeo.from_polynomials(x - x * x + x * y, y - (y * y).scale(2)),
        Diffeo.from_polynomials(x - x * x, y - (x * y).scale(3)),
        Diffeo.from_polynomials(x, y + x * x),
        Diffeo.from_polynomials(x + y * y, y + y * y),
        Diffeo.from_polynomials(x + x * x, y),
        Diffeo.from_polynomials(x - x * x + y**3, y - x * y),
        example_pq(),
    ] + [polymap(X, 6) for X in pure_domain_fields()]


# ---------------------------------------------------------------------------
# separatrix lemmas as executable checks
# ---------------------------------------------------------------------------


def _total(descs):
    """Number of separatrices represented (``None`` when infinitely many)."""
    if any(s.count is None for s in descs):
        return None
    return sum(s.count for s in descs)


def _transverse(descs) -> bool:
    """Two smooth separatrices with distinct tangents at the origin."""
    if len(descs) == 1:
        # a conjugate pair is transverse when it passes through conjugate points
        return descs[0].count == 2 and descs[0].first_conjugates == 2
    a, b = descs
    if a.first_point is None or b.first_point is None:
        # the root is reduced: its two branches are the eigen-directions
        return a.first_point is None and b.first_point is None
    return a.first_point != b.first_point


def lemma_checks(X: VectorField) -> list:
    """The separatrix and index lemmas evaluated on ``X``.

    Returns ``(statement, holds)`` for every statement whose hypothesis is
    met by the saturated singular field ``X``:

    * ``"one-separatrix"``: exactly one separatrix, non-singular => some leaf
      is a saddle-node;
    * ``"two-separatrices"``: exactly two separatrices, non-singular and
      transverse => the root is reduced or some leaf is a saddle-node;
    * ``"index-zero"``: second type with exactly one strong separatrix,
      non-singular => its index vanishes;
    * ``"index-product"``: second type with exactly two strong separatrices,
      non-singular and transverse => their indices multiply to 1.
    """
    tree = resolve(X)
    seps = strict_separatrices(tree)
    has_sn, _ = contains_saddle_node(tree)
    out = []
    smooth = all(s.smooth for s in seps)
    n = _total(seps)
    if n == 1 and smooth:
        out.append(("one-separatrix", has_sn))
    if n == 2 and smooth and _transverse(seps):
        out.append(("two-separatrices", tree.root.singularity.reduced or has_sn))
    strong = [s for s in seps if s.strength == "strong"]
    if second_type(tree) and all(s.smooth for s in strong):
        ns = _total(strong)
        if ns == 1:
            out.append(("index-zero", is_zero(separatrix_cs(tree, strong[0]).value)))
        if ns == 2 and len(strong) == 2 and _transverse(strong):
            prod = separatrix_cs(tree, strong[0]).value * separatrix_cs(tree, strong[1]).value
            out.append(("index-product", is_zero(prod - 1)))
    return out
