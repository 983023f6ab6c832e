"""Bivariate truncated power series with a certified precision degree.

A :class:`Jet2` stores a sparse map ``(i, j) -> coefficient`` and an integer
``prec``: every coefficient of total degree ``<= prec`` is exact, nothing is
known beyond.  ``prec = None`` marks an exact polynomial.

Precision rules (``v(a)`` is the least total degree of a stored term, or
``prec + 1`` for a jet with no stored terms):

* ``a + b``           -> ``min(Pa, Pb)``
* ``a * b``           -> ``min(Pa + v(b), Pb + v(a))``
* ``d/dx a``          -> ``Pa - 1``
* ``f(g, h)``         -> ``min((Pf + 1) * v - 1, Pg, Ph)`` with ``v = min(v(g), v(h)) >= 1``
* ``1 / a``           -> ``Pa`` (``a(0) != 0``)
* ``a / f`` (``f`` exact of order ``e``) -> ``Pa - e``
"""

from __future__ import annotations

from ..errors import InsufficientPrecision
from .field import (
    _join_terms,
    _mono_text,
    _term,
    inv,
    is_syntactic_zero,
    is_zero,
    p_divmod,
    p_trim,
    to_complex,
    to_text,
)

__all__ = ["Jet2", "hom_coeffs", "from_hom_coeffs"]


def _minp(*ps):
    vals = [p for p in ps if p is not None]
    return min(vals) if vals else None


def hom_coeffs(terms, d):
    """Coefficients of the degree-``d`` part: entry ``j`` multiplies ``x^(d-j) y^j``."""
    return [terms.get((d - j, j), 0) for j in range(d + 1)]


def from_hom_coeffs(coeffs, d):
    return {(d - j, j): c for j, c in enumerate(coeffs) if not is_syntactic_zero(c)}


def _mul_terms(ta, tb, limit):
    out = {}
    if not ta or not tb:
        return out
    by_deg = {}
    for (i, j), c in tb.items():
        by_deg.setdefault(i + j, []).append((i, j, c))
    degs = sorted(by_deg)
    for (i1, j1), c1 in ta.items():
        d1 = i1 + j1
        for d2 in degs:
            if limit is not None and d1 + d2 > limit:
                break
            for i2, j2, c2 in by_deg[d2]:
                key = (i1 + i2, j1 + j2)
                out[key] = out[key] + c1 * c2 if key in out else c1 * c2
    return {k: v for k, v in out.items() if not is_syntactic_zero(v)}


class Jet2:
    """Truncated bivariate series; see the module docstring for precision rules."""

    __slots__ = ("terms", "prec")

    def __init__(self, terms=None, prec=None):
        terms = terms or {}
        if prec is not None:
            terms = {k: v for k, v in terms.items() if k[0] + k[1] <= prec and not is_syntactic_zero(v)}
        else:
            terms = {k: v for k, v in terms.items() if not is_syntactic_zero(v)}
        self.terms = terms
        self.prec = prec

    @classmethod
    def _raw(cls, terms, prec):
        obj = cls.__new__(cls)
        obj.terms = terms
        obj.prec = prec
        return obj

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, prec=None):
        return cls._raw({}, prec)

    @classmethod
    def const(cls, c, prec=None):
        return cls({(0, 0): c}, prec)

    @classmethod
    def x(cls, prec=None):
        return cls({(1, 0): 1}, prec)

    @classmethod
    def y(cls, prec=None):
        return cls({(0, 1): 1}, prec)

    # -- queries --------------------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self.prec is None

    def coeff(self, i: int, j: int):
        if self.prec is not None and i + j > self.prec:
            raise InsufficientPrecision(f"coefficient of x^{i} y^{j} beyond precision {self.prec}")
        return self.terms.get((i, j), 0)

    def homogeneous(self, d: int):
        """List of degree-``d`` coefficients (see :func:`hom_coeffs`)."""
        if self.prec is not None and d > self.prec:
            raise InsufficientPrecision(f"degree {d} beyond precision {self.prec}")
        return hom_coeffs(self.terms, d)

    def homogeneous_jet(self, d: int) -> "Jet2":
        return Jet2(from_hom_coeffs(self.homogeneous(d), d), None)

    def low_degree(self):
        """Least total degree of a stored term (syntactic), or ``None``."""
        if not self.terms:
            return None
        return min(i + j for i, j in self.terms)

    def valuation_bound(self):
        """Lower bound for the order used by the precision rules."""
        v = self.low_degree()
        if v is None:
            return None if self.prec is None else self.prec + 1
        return v

    def max_degree(self) -> int:
        return max((i + j for i, j in self.terms), default=-1)

    def order(self):
        """Least total degree of a nonzero coefficient.

        Returns ``None`` for the exact zero polynomial and raises
        :class:`InsufficientPrecision` for a jet whose certified
        coefficients all vanish.
        """
        for d in sorted({i + j for i, j in self.terms}):
            if any(not is_zero(c) for c in hom_coeffs(self.terms, d)):
                return d
        if self.prec is None:
            return None
        raise InsufficientPrecision("all certified coefficients vanish")

    def is_zero(self) -> bool:
        """Exactly zero to the certified precision."""
        return all(is_zero(c) for c in self.terms.values())

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Jet2):
            other = Jet2.const(other)
        prec = _minp(self.prec, other.prec)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return Jet2(out, prec)

    __radd__ = __add__

    def __neg__(self):
        return Jet2._raw({k: -v for k, v in self.terms.items()}, self.prec)

    def __sub__(self, other):
        if not isinstance(other, Jet2):
            other = Jet2.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s) -> "Jet2":
        if is_syntactic_zero(s):
            return Jet2.zero(self.prec)
        return Jet2({k: v * s for k, v in self.terms.items()}, self.prec)

    def mul_prec(self, other: "Jet2"):
        if self.prec is None and other.prec is None:
            return None
        va, vb = self.valuation_bound(), other.valuation_bound()
        cands = []
        if self.prec is not None:
            if vb is None:
                return None  # other is the exact zero polynomial
            cands.append(self.prec + vb)
        if other.prec is not None:
            if va is None:
                return None
            cands.append(other.prec + va)
        return min(cands)

    def __mul__(self, other):
        if not isinstance(other, Jet2):
            return self.scale(other)
        prec = self.mul_prec(other)
        return Jet2._raw(_mul_terms(self.terms, other.terms, prec), prec)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n: int):
        out = Jet2.const(1)
        for _ in range(n):
            out = out * self
        return out

    def truncate(self, n: int) -> "Jet2":
        prec = n if self.prec is None else min(self.prec, n)
        return Jet2._raw({k: v for k, v in self.terms.items() if k[0] + k[1] <= prec}, prec)

    def with_prec(self, prec) -> "Jet2":
        """Same jet re-labelled with a lower (or equal) precision."""
        if prec is None:
            if self.prec is not None:
                raise ValueError("cannot promote a truncated jet to an exact polynomial")
            return self
        return self.truncate(prec)

    def deriv_x(self) -> "Jet2":
        prec = None if self.prec is None else self.prec - 1
        return Jet2._raw({(i - 1, j): i * c for (i, j), c in self.terms.items() if i > 0}, prec)

    def deriv_y(self) -> "Jet2":
        prec = None if self.prec is None else self.prec - 1
        return Jet2._raw({(i, j - 1): j * c for (i, j), c in self.terms.items() if j > 0}, prec)

    def map(self, fn) -> "Jet2":
        return Jet2({k: fn(v) for k, v in self.terms.items()}, self.prec)

    def substitute(self, gx: "Jet2", gy: "Jet2") -> "Jet2":
        """``self(gx, gy)`` for ``gx, gy`` without constant term."""
        for g in (gx, gy):
            if (0, 0) in g.terms and not is_zero(g.terms[(0, 0)]):
                raise ValueError("substituted jets must vanish at the origin")
        uses_x = any(i > 0 for i, _ in self.terms)
        uses_y = any(j > 0 for _, j in self.terms)
        v = min(gx.valuation_bound() or 1, gy.valuation_bound() or 1)
        v = max(v, 1)
        cands = []
        if self.prec is not None:
            cands.append((self.prec + 1) * v - 1)
        if uses_x and gx.prec is not None:
            cands.append(gx.prec)
        if uses_y and gy.prec is not None:
            cands.append(gy.prec)
        prec = min(cands) if cands else None
        gx_t = gx if prec is None else gx.truncate(prec)
        gy_t = gy if prec is None else gy.truncate(prec)
        # f = sum_i x^i h_i(y)
        rows = {}
        for (i, j), c in self.terms.items():
            rows.setdefault(i, {})[j] = c
        ypow = [Jet2.const(1, prec)]
        max_j = max((j for _, j in self.terms), default=0)
        for _ in range(max_j):
            ypow.append((ypow[-1] * gy_t).truncate(prec) if prec is not None else ypow[-1] * gy_t)
        out = Jet2.zero(prec)
        xp = Jet2.const(1, prec)
        for i in range(max(rows, default=-1) + 1):
            if i > 0:
                xp = xp * gx_t
                if prec is not None:
                    xp = xp.truncate(prec)
            row = rows.get(i)
            if not row:
                continue
            h = Jet2.zero(prec)
            for j, c in row.items():
                h = h + ypow[j].scale(c)
            prod = xp * h
            out = out + (prod.truncate(prec) if prec is not None else prod)
        return Jet2._raw(out.terms, prec)

    def invert_unit(self, prec=None) -> "Jet2":
        """Series inverse of a jet with nonzero constant term.

        ``prec`` defaults to the jet's own precision and is mandatory for an
        exact polynomial.
        """
        target = self.prec if prec is None else (prec if self.prec is None else min(prec, self.prec))
        if target is None:
            raise ValueError("target precision required to invert an exact polynomial")
        a0 = self.coeff(0, 0)
        if is_zero(a0):
            raise ZeroDivisionError("jet is not a unit")
        i0 = inv(a0)
        parts = {d: {k: v for k, v in self.terms.items() if k[0] + k[1] == d} for d in range(1, target + 1)}
        b = {0: {(0, 0): i0}}
        for d in range(1, target + 1):
            acc = {}
            for k in range(1, d + 1):
                if parts[k] and b[d - k]:
                    for key, val in _mul_terms(parts[k], b[d - k], None).items():
                        acc[key] = acc[key] + val if key in acc else val
            b[d] = {key: -val * i0 for key, val in acc.items() if not is_syntactic_zero(val)}
        terms = {}
        for part in b.values():
            terms.update(part)
        return Jet2(terms, target)

    def divide(self, f: "Jet2") -> "Jet2":
        """Quotient by an exact polynomial ``f`` that divides ``self``.

        For a truncated ``self`` the quotient is certified to ``prec - ord f``.
        For exact inputs the division must be exact as polynomials.
        """
        if not f.is_exact:
            raise ValueError("divisor must be an exact polynomial")
        e = f.order()
        if e is None:
            raise ZeroDivisionError("division by the zero polynomial")
        fe = p_trim(hom_coeffs(f.terms, e))
        if self.prec is None:
            top = self.max_degree() - e
            prec_out = None
        else:
            top = self.prec - e
            prec_out = top
        fparts = {d: hom_coeffs(f.terms, d) for d in range(e, f.max_degree() + 1)}
        q = {}
        for n in range(0, top + 1):
            # residual of degree n + e
            acc = hom_coeffs(self.terms, n + e)
            for jdeg in range(1, n + 1):
                if n + e - (e + jdeg) < 0 or (e + jdeg) not in fparts:
                    continue
                qpart = q.get(n - jdeg)
                if not qpart:
                    continue
                prod = _mul_terms(from_hom_coeffs(fparts[e + jdeg], e + jdeg), from_hom_coeffs(qpart, n - jdeg), None)
                sub = hom_coeffs(prod, n + e)
                acc = [a - s for a, s in zip(acc, sub)]
            quo, rem = p_divmod(acc, fe)
            if rem:
                raise ArithmeticError("jet is not divisible by the given polynomial")
            if len(quo) > n + 1:
                raise ArithmeticError("jet is not divisible by the given polynomial")
            q[n] = quo + [0] * (n + 1 - len(quo))
        terms = {}
        for n, part in q.items():
            terms.update(from_hom_coeffs(part, n))
        out = Jet2(terms, prec_out)
        if prec_out is None:
            if not (out * f - self).is_zero():
                raise ArithmeticError("polynomial division is not exact")
        return out

    # -- restriction / evaluation ----------------------------------------------

    def along_x_axis(self):
        """Coefficients of ``self(x, 0)`` and their certified precision."""
        top = self.max_degree() if self.prec is None else self.prec
        return [self.terms.get((i, 0), 0) for i in range(max(top, 0) + 1)], self.prec

    def along_y_axis(self):
        top = self.max_degree() if self.prec is None else self.prec
        return [self.terms.get((0, j), 0) for j in range(max(top, 0) + 1)], self.prec

    def evaluate(self, x, y, bindings=None):
        total = 0
        for (i, j), c in self.terms.items():
            total += to_complex(c, bindings) * x**i * y**j
        return total

    # -- comparison / text -----------------------------------------------------

    def agrees_with(self, other: "Jet2", upto=None) -> bool:
        """Exact agreement of all coefficients of degree ``<= upto``."""
        limit = _minp(self.prec, other.prec, upto)
        keys = set(self.terms) | set(other.terms)
        for k in keys:
            if limit is not None and k[0] + k[1] > limit:
                continue
            if not is_zero(self.terms.get(k, 0) - other.terms.get(k, 0)):
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, Jet2):
            return NotImplemented
        return self.prec == other.prec and self.agrees_with(other)

    __hash__ = None

    def text(self, names=("x", "y"), show_prec=True) -> str:
        keys = sorted(self.terms, key=lambda k: (k[0] + k[1], -k[0]))
        terms = [_term(to_text(self.terms[k]), _mono_text(((names[0], k[0]), (names[1], k[1])))) for k in keys]
        out = _join_terms(terms)
        if show_prec and self.prec is not None:
            out = f"{out} + O({self.prec + 1})" if terms else f"O({self.prec + 1})"
        return out

    def __str__(self):
        return self.text()

    def __repr__(self):
        return f"Jet2({self.text()})"
