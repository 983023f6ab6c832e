"""Exact coefficient tower.

The bottom of the tower is ``Q(p1, ..., pn)`` for a (possibly empty) tuple of
transcendental parameters.  Elements are :class:`flint.fmpq` when there are
no parameters and :class:`RatFunc` otherwise.  Algebraic levels
``L = K[w]/(m(w))`` sit on top; ``m`` only has to be squarefree.  When an
inversion or a zero test meets a zero-divisor of ``L`` the computation stops
with :class:`~tidgerm.errors.ZeroDivisorSplit`, carrying the factorisation
of ``m`` that the zero-divisor revealed (dynamic evaluation).

All values are immutable.  Python ``int`` values are accepted everywhere a
coefficient is expected.
"""

from __future__ import annotations

import threading
from fractions import Fraction

import flint
from flint import fmpq

from ..errors import DivisionByZero, NotSquarefree, ZeroDivisorSplit

__all__ = [
    "BaseField",
    "RatFunc",
    "AlgebraicLevel",
    "AlgElem",
    "base_field",
    "is_zero",
    "is_syntactic_zero",
    "inv",
    "to_text",
    "level_of",
    "join_levels",
    "is_ancestor",
    "for_each_root",
    "to_complex",
]


# ---------------------------------------------------------------------------
# generic element helpers
# ---------------------------------------------------------------------------


def is_zero(v) -> bool:
    """Exact zero test (may raise ``ZeroDivisorSplit`` at algebraic levels)."""
    if isinstance(v, AlgElem):
        return v.is_zero()
    if isinstance(v, RatFunc):
        return v.num.is_zero()
    return v == 0


def is_syntactic_zero(v) -> bool:
    """True when the stored representation is literally zero.

    Unlike :func:`is_zero` this never triggers a branch split; it is used to
    prune storage.
    """
    if isinstance(v, AlgElem):
        return all(is_syntactic_zero(c) for c in v.c)
    if isinstance(v, RatFunc):
        return v.num.is_zero()
    return v == 0


def inv(v):
    """Multiplicative inverse of a coefficient of any level."""
    if isinstance(v, (int, Fraction)):
        if v == 0:
            raise DivisionByZero("inverse of zero")
        return fmpq(1) / fmpq(v) if isinstance(v, int) else fmpq(v.denominator, v.numerator)
    if isinstance(v, fmpq):
        if v == 0:
            raise DivisionByZero("inverse of zero")
        return 1 / v
    return v.inv()


def level_of(v):
    """Tower level carrying ``v``; ``None`` for plain rationals."""
    if isinstance(v, AlgElem):
        return v.level
    if isinstance(v, RatFunc):
        return v.field
    return None


def is_ancestor(a, b) -> bool:
    """True if level ``a`` is ``b`` or lies below ``b`` in the tower."""
    if a is None:
        return True
    while b is not None:
        if b is a:
            return True
        b = b.parent
    return False


def join_levels(a, b):
    """The higher of two comparable levels (``None`` means "rationals")."""
    if a is None:
        return b
    if b is None:
        return a
    if is_ancestor(a, b):
        return b
    if is_ancestor(b, a):
        return a
    if isinstance(a, BaseField) and isinstance(b, BaseField) and a.params == b.params:
        return a
    raise TypeError(f"incompatible tower levels {a.name} and {b.name}")


def _wrap_text(s: str) -> str:
    if " " in s or "/(" in s:
        return f"({s})"
    return s


def to_text(v) -> str:
    """Canonical text of a coefficient."""
    if isinstance(v, (AlgElem, RatFunc)):
        return v.text()
    if isinstance(v, Fraction):
        v = fmpq(v.numerator, v.denominator)
    return str(v)


def to_complex(v, bindings=None) -> complex:
    """Evaluate a base-level coefficient numerically.

    ``bindings`` maps parameter names to numbers.  Algebraic elements have no
    canonical numeric value and are rejected.
    """
    if isinstance(v, RatFunc):
        return v.evaluate(bindings or {})
    if isinstance(v, AlgElem):
        raise TypeError("algebraic elements have no canonical numeric value")
    if isinstance(v, fmpq):
        return complex(int(v.p) / int(v.q))
    return complex(v)


# ---------------------------------------------------------------------------
# dense univariate helpers on coefficient lists (low degree first)
# ---------------------------------------------------------------------------


def p_trim(a):
    a = list(a)
    while a and is_zero(a[-1]):
        a.pop()
    return a


def p_add(a, b):
    n = max(len(a), len(b))
    return p_trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def p_sub(a, b):
    n = max(len(a), len(b))
    return p_trim([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])


def p_scale(a, s):
    return p_trim([s * c for c in a])


def p_mul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if is_syntactic_zero(ai):
            continue
        for j, bj in enumerate(b):
            out[i + j] = out[i + j] + ai * bj
    return p_trim(out)


def p_divmod(a, b):
    """Quotient and remainder; the leading coefficient of ``b`` is inverted."""
    b = p_trim(b)
    if not b:
        raise DivisionByZero("polynomial division by zero")
    a = p_trim(a)
    db = len(b) - 1
    lead_inv = inv(b[-1])
    if len(a) <= db:
        return [], a
    q = [0] * (len(a) - db)
    r = list(a)
    for k in range(len(a) - 1, db - 1, -1):
        coef = r[k] * lead_inv
        q[k - db] = coef
        if is_syntactic_zero(coef):
            continue
        for j in range(db + 1):
            r[k - db + j] = r[k - db + j] - coef * b[j]
    return p_trim(q), p_trim(r[:db])


def p_rem_monic(a, m):
    """Remainder modulo a monic polynomial without any zero test."""
    d = len(m) - 1
    r = list(a)
    for k in range(len(r) - 1, d - 1, -1):
        coef = r[k]
        if is_syntactic_zero(coef):
            continue
        for j in range(d):
            r[k - d + j] = r[k - d + j] - coef * m[j]
        r[k] = 0
    r = r[:d]
    return r + [0] * (d - len(r))


def p_monic(a):
    a = p_trim(a)
    if not a:
        return a
    li = inv(a[-1])
    return [c * li for c in a[:-1]] + [1]


def p_gcdex(a, b):
    """Monic ``g = gcd(a, b)`` with cofactors ``s, t`` such that ``s a + t b = g``."""
    r0, r1 = p_trim(a), p_trim(b)
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while r1:
        q, r = p_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, p_sub(s0, p_mul(q, s1))
        t0, t1 = t1, p_sub(t0, p_mul(q, t1))
    if not r0:
        return [], [], []
    li = inv(r0[-1])
    return [c * li for c in r0[:-1]] + [1], p_scale(s0, li), p_scale(t0, li)


def p_gcd(a, b):
    r0, r1 = p_trim(a), p_trim(b)
    while r1:
        r0, r1 = r1, p_divmod(r0, r1)[1]
    return p_monic(r0)


def p_deriv(a):
    return p_trim([i * a[i] for i in range(1, len(a))])


def p_eval(a, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def p_text(a, var="T") -> str:
    """Canonical text of a coefficient list, highest degree first."""
    terms = []
    for i in range(len(a) - 1, -1, -1):
        c = a[i]
        if is_syntactic_zero(c):
            continue
        terms.append(_term(to_text(c), _mono_text(((var, i),))))
    return _join_terms(terms)


def _mono_text(pairs) -> str:
    parts = []
    for name, e in pairs:
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def _term(ctext: str, mono: str) -> str:
    if not mono:
        return ctext
    if ctext == "1":
        return mono
    if ctext == "-1":
        return "-" + mono
    return f"{_wrap_text(ctext)}*{mono}"


def _join_terms(terms) -> str:
    if not terms:
        return "0"
    out = terms[0]
    for t in terms[1:]:
        out += f" - {t[1:]}" if t.startswith("-") else f" + {t}"
    return out


# ---------------------------------------------------------------------------
# Q(params)
# ---------------------------------------------------------------------------

_REGISTRY_LOCK = threading.Lock()
_BASES: dict = {}


def base_field(params=()) -> "BaseField":
    """The (shared) base field ``Q(params)``."""
    params = tuple(params)
    with _REGISTRY_LOCK:
        field = _BASES.get(params)
        if field is None:
            field = BaseField(params)
            _BASES[params] = field
        return field


class BaseField:
    """``Q`` or the rational function field ``Q(params)``."""

    def __init__(self, params=()):
        self.params = tuple(params)
        self.parent = None
        self.depth = 0
        self.degree = 1
        self.base = self
        self.name = "Q(" + ", ".join(self.params) + ")" if self.params else "Q"
        self.ctx = flint.fmpq_mpoly_ctx.get(self.params, "lex") if self.params else None
        if self.ctx is not None:
            self._zero_poly = self.ctx.constant(0)
            self._one_poly = self.ctx.constant(1)
        self.zero = self(0)
        self.one = self(1)

    def __repr__(self):
        return f"BaseField({self.name})"

    def __call__(self, v):
        if self.ctx is None:
            if isinstance(v, RatFunc):
                const = v.constant_value()
                if const is None:
                    raise TypeError(f"{v.text()} is not a rational number")
                return const
            if isinstance(v, AlgElem):
                raise TypeError("cannot coerce an algebraic element into the base field")
            if isinstance(v, Fraction):
                return fmpq(v.numerator, v.denominator)
            return fmpq(v)
        if isinstance(v, RatFunc):
            if v.field is self:
                return v
            return self._remap(v)
        if isinstance(v, AlgElem):
            raise TypeError("cannot coerce an algebraic element into the base field")
        if isinstance(v, Fraction):
            v = fmpq(v.numerator, v.denominator)
        return RatFunc(self, self.ctx.constant(fmpq(v)), self._one_poly)

    def _remap(self, v: "RatFunc") -> "RatFunc":
        src = v.field.params
        try:
            pos = [self.params.index(p) for p in src]
        except ValueError as exc:
            raise TypeError(f"parameters {src} not contained in {self.params}") from exc

        def conv(poly):
            out = {}
            for exps, coef in poly.to_dict().items():
                e = [0] * len(self.params)
                for k, ek in zip(pos, exps):
                    e[k] = ek
                out[tuple(e)] = coef
            return self.ctx.from_dict(out)

        return RatFunc(self, conv(v.num), conv(v.den))

    def param(self, name: str) -> "RatFunc":
        idx = self.params.index(name)
        return RatFunc(self, self.ctx.gens()[idx], self._one_poly)

    def adjoin_param(self, name: str) -> "BaseField":
        """Adjoin a new transcendental generator."""
        if name in self.params:
            raise ValueError(f"parameter {name} already present")
        return base_field(self.params + (name,))

    def adjoin(self, modulus, name=None) -> "AlgebraicLevel":
        return AlgebraicLevel(self, modulus, name)

    def text(self) -> str:
        return self.name


class RatFunc:
    """Element of ``Q(params)``: a reduced fraction with monic denominator."""

    __slots__ = ("field", "num", "den")

    def __init__(self, field: BaseField, num, den):
        if num.is_zero():
            den = field._one_poly
        elif not den.is_constant():
            g = num.gcd(den)
            if not g.is_constant():
                num = num / g
                den = den / g
        lc = den.leading_coefficient()
        if lc != 1:
            num = num / lc
            den = den / lc
        self.field = field
        self.num = num
        self.den = den

    # -- coercion ---------------------------------------------------------

    def _other(self, other):
        if isinstance(other, RatFunc):
            if other.field is self.field:
                return other
            return self.field(other)
        if isinstance(other, (int, fmpq, Fraction)):
            return self.field(other)
        return None

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return RatFunc(self.field, self.num + o.num, self.den)
        return RatFunc(self.field, self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(self.field, -self.num, self.den)

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return RatFunc(self.field, self.num - o.num, self.den)
        return RatFunc(self.field, self.num * o.den - o.num * self.den, self.den * o.den)

    def __rsub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, fmpq)):
            if other == 0:
                return self.field.zero
            return RatFunc(self.field, self.num * other, self.den)
        o = self._other(other)
        if o is None:
            return NotImplemented
        if self.den.is_constant() and o.den.is_constant():
            return RatFunc(self.field, self.num * o.num, self.field._one_poly)
        return RatFunc(self.field, self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inv(self):
        if self.num.is_zero():
            raise DivisionByZero("inverse of zero")
        return RatFunc(self.field, self.den, self.num)

    def __truediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self * o.inv()

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o * self.inv()

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        return RatFunc(self.field, self.num**n, self.den**n)

    def __eq__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    __hash__ = None

    def __bool__(self):
        return not self.num.is_zero()

    # -- queries ------------------------------------------------------------

    def constant_value(self):
        """The rational value if the element does not involve parameters."""
        if self.num.is_constant() and self.den.is_constant():
            return fmpq(self.num.leading_coefficient() if not self.num.is_zero() else 0)
        return None

    def evaluate(self, bindings) -> complex:
        def ev(poly):
            acc = 0j
            for exps, coef in zip(poly.monoms(), poly.coeffs()):
                term = complex(int(coef.p) / int(coef.q))
                for name, e in zip(self.field.params, exps):
                    if e:
                        if name not in bindings:
                            raise KeyError(f"no numeric binding for parameter {name}")
                        term *= complex(bindings[name]) ** int(e)
                acc += term
            return acc

        return ev(self.num) / ev(self.den)

    def text(self) -> str:
        n = str(self.num)
        if self.den == 1:
            return n
        d = str(self.den)
        n = f"({n})" if " " in n else n
        d = f"({d})" if " " in d or "*" in d else d
        return f"{n}/{d}"

    def __repr__(self):
        return self.text()

    __str__ = text


# ---------------------------------------------------------------------------
# algebraic levels
# ---------------------------------------------------------------------------


class AlgebraicLevel:
    """``parent[w]/(m(w))`` for a monic squarefree ``m``.

    Parameters
    ----------
    parent : BaseField or AlgebraicLevel
    modulus : sequence
        Coefficients of ``m`` over ``parent``, lowest degree first.
    name : str, optional
        Generator name used in canonical text; defaults to ``w<depth>``.
    """

    def __init__(self, parent, modulus, name=None):
        m = p_trim(modulus)
        if len(m) < 2:
            raise ValueError("defining polynomial must have positive degree")
        m = p_monic(m)
        g = p_gcd(m, p_deriv(m))
        if len(g) > 1:
            raise NotSquarefree(f"{p_text(m)} is not squarefree")
        self.parent = parent
        self.base = parent.base
        self.depth = parent.depth + 1
        self.modulus = tuple(m)
        self.degree = len(m) - 1
        self.name = name or f"w{self.depth}"
        self.zero = AlgElem(self, (0,) * self.degree)
        self.one = self(1)

    def __repr__(self):
        return f"AlgebraicLevel({self.name}: {self.text()})"

    @property
    def gen(self) -> "AlgElem":
        if self.degree == 1:
            return AlgElem(self, (-self.modulus[0],))
        return AlgElem(self, (0, 1) + (0,) * (self.degree - 2))

    def __call__(self, v) -> "AlgElem":
        return AlgElem(self, self.lift(v))

    def lift(self, v):
        """Coefficient tuple of ``v`` in this level."""
        if isinstance(v, AlgElem):
            if v.level is self:
                return v.c
            if not is_ancestor(v.level, self.parent):
                raise TypeError(f"{v.level.name} is not below {self.name}")
            head = v if v.level is self.parent else self.parent(v)
        else:
            head = self.parent(v)
        return (head,) + (0,) * (self.degree - 1)

    def adjoin(self, modulus, name=None) -> "AlgebraicLevel":
        return AlgebraicLevel(self, modulus, name)

    def text(self) -> str:
        return p_text(self.modulus, self.name)

    def chain(self):
        """Algebraic levels from the bottom up to ``self``."""
        out = []
        lvl = self
        while isinstance(lvl, AlgebraicLevel):
            out.append(lvl)
            lvl = lvl.parent
        return out[::-1]

    def absolute_degree(self) -> int:
        d = 1
        for lvl in self.chain():
            d *= lvl.degree
        return d

    # -- linear algebra over the parent --------------------------------------

    def mult_matrix(self, e: "AlgElem"):
        """Matrix (over the parent) of multiplication by ``e``; column i is e*w^i."""
        cols = []
        w = self.gen
        cur = e
        for _ in range(self.degree):
            cols.append(cur.c)
            cur = cur * w
        return [[cols[j][i] for j in range(self.degree)] for i in range(self.degree)]

    def trace(self, e: "AlgElem"):
        """Trace of ``e`` over the parent level."""
        e = self(e) if not (isinstance(e, AlgElem) and e.level is self) else e
        w = self.gen
        cur = e
        total = 0
        for i in range(self.degree):
            total = total + cur.c[i]
            cur = cur * w
        return total


class AlgElem:
    """Element of an :class:`AlgebraicLevel`, stored by its reduced coordinates."""

    __slots__ = ("level", "c", "_zero")

    def __init__(self, level: AlgebraicLevel, coeffs):
        self.level = level
        self.c = tuple(coeffs)
        self._zero = None

    # -- coercion -----------------------------------------------------------

    def _other(self, other):
        if isinstance(other, AlgElem):
            if other.level is self.level:
                return other.c
            if is_ancestor(other.level, self.level):
                return self.level.lift(other)
            if is_ancestor(self.level, other.level):
                return None
            raise TypeError(f"incompatible levels {self.level.name} and {other.level.name}")
        if isinstance(other, (int, fmpq, Fraction, RatFunc)):
            return self.level.lift(other)
        return None

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return AlgElem(self.level, tuple(a + b for a, b in zip(self.c, o)))

    __radd__ = __add__

    def __neg__(self):
        return AlgElem(self.level, tuple(-a for a in self.c))

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return AlgElem(self.level, tuple(a - b for a, b in zip(self.c, o)))

    def __rsub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return AlgElem(self.level, tuple(b - a for a, b in zip(self.c, o)))

    def __mul__(self, other):
        if isinstance(other, (int, fmpq, RatFunc)) or (
            isinstance(other, AlgElem) and other.level is not self.level and is_ancestor(other.level, self.level.parent)
        ):
            if isinstance(other, int) and other == 0:
                return self.level.zero
            return AlgElem(self.level, tuple(a * other for a in self.c))
        o = self._other(other)
        if o is None:
            return NotImplemented
        d = self.level.degree
        prod = [0] * (2 * d - 1)
        for i, a in enumerate(self.c):
            if is_syntactic_zero(a):
                continue
            for j, b in enumerate(o):
                if is_syntactic_zero(b):
                    continue
                prod[i + j] = prod[i + j] + a * b
        return AlgElem(self.level, p_rem_monic(prod, self.level.modulus))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        result = self.level.one
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def _split_on(self, g):
        """Raise the split induced by a proper factor ``g`` of the modulus."""
        lvl = self.level
        cof, rem = p_divmod(list(lvl.modulus), g)
        factors = (tuple(p_monic(g)), tuple(p_monic(cof)))
        raise ZeroDivisorSplit(lvl, factors)

    def inv(self):
        rep = p_trim(self.c)
        if not rep:
            raise DivisionByZero(f"inverse of zero in {self.level.name}")
        g, s, _t = p_gcdex(rep, list(self.level.modulus))
        if len(g) > 1:
            self._split_on(g)
        s = list(s) + [0] * (self.level.degree - len(s))
        return AlgElem(self.level, s[: self.level.degree])

    def __truediv__(self, other):
        if isinstance(other, AlgElem) and other.level is not self.level and is_ancestor(self.level, other.level):
            return NotImplemented
        return self * inv(other)

    def __rtruediv__(self, other):
        return other * self.inv()

    def is_zero(self) -> bool:
        if self._zero is None:
            self._zero = self._compute_zero()
        return self._zero

    def _compute_zero(self) -> bool:
        rep = p_trim(self.c)
        if not rep:
            return True
        g = p_gcd(rep, list(self.level.modulus))
        if len(g) > 1:
            self._split_on(g)
        return False

    def is_syntactic_zero(self) -> bool:
        return is_syntactic_zero(self)

    def __eq__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return AlgElem(self.level, tuple(a - b for a, b in zip(self.c, o))).is_zero()

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    __hash__ = None

    def __bool__(self):
        return not self.is_zero()

    def text(self) -> str:
        return p_text(self.c, self.level.name)

    def __repr__(self):
        return self.text()

    __str__ = text


# ---------------------------------------------------------------------------
# branch driver
# ---------------------------------------------------------------------------


def for_each_root(parent, factor, fn):
    """Run ``fn(level, root)`` on a root of each branch of ``factor``.

    ``factor`` is a monic squarefree coefficient list over ``parent``.  A
    linear factor is solved in ``parent`` directly; otherwise its root is
    adjoined.  If ``fn`` provokes a split of that new level, the computation
    is repeated on every factor of the split (dynamic evaluation).  Results
    are concatenated in branch order.
    """
    pending = [p_monic(list(factor))]
    out = []
    while pending:
        phi = pending.pop(0)
        if len(phi) == 2:
            out.extend(fn(parent, -phi[0], phi))
            continue
        lvl = AlgebraicLevel(parent, phi)
        try:
            out.extend(fn(lvl, lvl.gen, phi))
        except ZeroDivisorSplit as exc:
            if exc.level is not lvl:
                raise
            pending[0:0] = [list(f) for f in exc.factors]
    return out
