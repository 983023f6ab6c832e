"""Dense univariate polynomials over any tower level, and Laurent residues."""

from __future__ import annotations

from ..errors import InsufficientPrecision
from .field import (
    inv,
    is_syntactic_zero,
    is_zero,
    p_add,
    p_deriv,
    p_divmod,
    p_eval,
    p_gcd,
    p_gcdex,
    p_monic,
    p_mul,
    p_scale,
    p_sub,
    p_text,
    p_trim,
)

__all__ = ["UniPoly", "upoly_gcd", "squarefree_decomposition", "laurent_residue"]


class UniPoly:
    """Univariate polynomial with coefficients lowest degree first.

    The coefficient list is trimmed with the exact zero test, so the leading
    coefficient is nonzero unless the polynomial is zero.
    """

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs, var="t"):
        self.coeffs = tuple(p_trim(coeffs))
        self.var = var

    @classmethod
    def _raw(cls, coeffs, var):
        obj = cls.__new__(cls)
        obj.coeffs = tuple(coeffs)
        obj.var = var
        return obj

    # -- basic queries --------------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lead(self):
        return self.coeffs[-1]

    def __getitem__(self, i):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __call__(self, x):
        return p_eval(self.coeffs, x)

    # -- arithmetic -----------------------------------------------------------

    def _wrap(self, coeffs):
        return UniPoly._raw(coeffs, self.var)

    def _c(self, other):
        if isinstance(other, UniPoly):
            return list(other.coeffs)
        return p_trim([other])

    def __add__(self, other):
        return self._wrap(p_add(list(self.coeffs), self._c(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(p_sub(list(self.coeffs), self._c(other)))

    def __rsub__(self, other):
        return self._wrap(p_sub(self._c(other), list(self.coeffs)))

    def __neg__(self):
        return self._wrap([-c for c in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, UniPoly):
            return self._wrap(p_mul(list(self.coeffs), list(other.coeffs)))
        return self._wrap(p_scale(list(self.coeffs), other))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = UniPoly([1], self.var)
        for _ in range(n):
            out = out * self
        return out

    def __divmod__(self, other: "UniPoly"):
        q, r = p_divmod(list(self.coeffs), list(other.coeffs))
        return self._wrap(q), self._wrap(r)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other: "UniPoly") -> "UniPoly":
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ArithmeticError("polynomial division is not exact")
        return q

    def __eq__(self, other):
        if not isinstance(other, UniPoly):
            other = UniPoly([other], self.var)
        return (self - other).is_zero()

    __hash__ = None

    def monic(self) -> "UniPoly":
        return self._wrap(p_monic(list(self.coeffs)))

    def derivative(self) -> "UniPoly":
        return self._wrap(p_deriv(list(self.coeffs)))

    def taylor_shift(self, a) -> "UniPoly":
        """The polynomial ``u -> p(a + u)``."""
        c = list(self.coeffs)
        n = len(c)
        # repeated synthetic division
        for i in range(n):
            for j in range(n - 2, i - 1, -1):
                c[j] = c[j] + a * c[j + 1]
        return UniPoly(c, self.var)

    def valuation(self) -> int:
        """Multiplicity of 0 as a root (``-1`` for the zero polynomial)."""
        for i, c in enumerate(self.coeffs):
            if not is_zero(c):
                return i
        return -1

    def text(self) -> str:
        return p_text(self.coeffs, self.var)

    __str__ = text

    def __repr__(self):
        return f"UniPoly({self.text()})"


def upoly_gcd(p: UniPoly, q: UniPoly) -> UniPoly:
    """Monic greatest common divisor (Euclid over the tower).

    Examples
    --------
    >>> x = UniPoly([0, 1], "x")
    >>> upoly_gcd(x**3 + x**2, x**2 + 2*x + 1).text()
    'x + 1'
    """
    return UniPoly._raw(p_gcd(list(p.coeffs), list(q.coeffs)), p.var)


def upoly_gcdex(p: UniPoly, q: UniPoly):
    g, s, t = p_gcdex(list(p.coeffs), list(q.coeffs))
    return UniPoly._raw(g, p.var), UniPoly._raw(s, p.var), UniPoly._raw(t, p.var)


def squarefree_decomposition(p: UniPoly):
    """Yun's algorithm: list of ``(g_i, i)`` with ``p = lc * prod g_i^i``.

    The ``g_i`` are monic, squarefree and pairwise coprime; factors equal to
    1 are omitted.
    """
    if p.degree < 1:
        return []
    a = p.monic()
    da = a.derivative()
    b = upoly_gcd(a, da)
    c = a.exact_div(b)
    d = da.exact_div(b) - c.derivative()
    out = []
    i = 1
    while c.degree >= 1:
        g = upoly_gcd(c, d)
        c_next = c.exact_div(g)
        if g.degree >= 1:
            out.append((g, i))
        d = d.exact_div(g) - c_next.derivative() if c_next.degree >= 0 else d
        c = c_next
        i += 1
    return out


def laurent_residue(numer, denom, numer_prec=None, denom_prec=None):
    """Residue at 0 of ``numer / denom``.

    Parameters
    ----------
    numer, denom : UniPoly or sequence
        Coefficients lowest degree first.  They may be truncations of power
        series.
    numer_prec, denom_prec : int or None
        Largest degree up to which each coefficient list is certified;
        ``None`` means the polynomial is exact.

    Raises
    ------
    InsufficientPrecision
        If ``denom`` has no certified nonzero coefficient, or the certified
        terms do not reach the ``x^-1`` coefficient.

    Examples
    --------
    >>> from flint import fmpq
    >>> laurent_residue([1], [0, -1, 1])
    -1
    """
    n = list(numer.coeffs) if isinstance(numer, UniPoly) else list(numer)
    d = list(denom.coeffs) if isinstance(denom, UniPoly) else list(denom)
    limit = len(d) - 1 if denom_prec is None else min(denom_prec, len(d) - 1)
    m = None
    for i in range(limit + 1):
        if not is_zero(d[i]):
            m = i
            break
    if m is None:
        if denom_prec is None:
            raise ZeroDivisionError("residue with zero denominator")
        raise InsufficientPrecision("denominator vanishes to its certified precision")
    if m == 0:
        return 0
    # numer certified through degree m-1, unit part through degree m-1
    if numer_prec is not None and numer_prec < m - 1:
        raise InsufficientPrecision(f"numerator needed to degree {m - 1}")
    if denom_prec is not None and denom_prec < 2 * m - 1:
        raise InsufficientPrecision(f"denominator needed to degree {2 * m - 1}")
    unit = d[m:]
    u0 = inv(unit[0])
    # q = numer / unit up to degree m-1
    q = []
    for k in range(m):
        acc = n[k] if k < len(n) else 0
        for j in range(1, k + 1):
            if j < len(unit) and not is_syntactic_zero(unit[j]):
                acc = acc - unit[j] * q[k - j]
        q.append(acc * u0)
    return q[m - 1]
