"""Text input for maps and vector fields.

Example input::

    # a map over Q(c)
    param c
    F.x = x + c*y + x^2
    F.y = y - y^2
    blowup [1:0]

Lines
-----
``param NAME ...``
    Declare transcendental parameters (must precede their use).
``vars U V``
    Rename the coordinates (default ``x y``); component targets follow.
``F.x = expr`` / ``F.y = expr``
    Components of a map.  Denominators must be units at the origin.
``X.dx = expr`` / ``X.dy = expr``
    Components of a polynomial vector field.
``blowup [a:b]``
    Replace the germ by its blow-up transform at that direction (repeatable).

Expressions use ``+ - * / ^``, parentheses, integer literals and names.
Floating literals are rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from flint import fmpq

from .algebra.field import BaseField, base_field, inv, is_zero
from .algebra.jet import Jet2
from .algebra.roots import ProjPoint
from .errors import ParseError
from .germs import Diffeo, VectorField

__all__ = ["GermSpec", "parse_germ", "load_germ", "parse_direction"]

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+)|(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


@dataclass
class GermSpec:
    """Parsed input file."""

    field: BaseField
    names: tuple = ("x", "y")
    kind: str = "map"
    F: Diffeo = None
    X: VectorField = None
    blowups: list = field(default_factory=list)
    source: str = "<input>"

    def germ(self):
        return self.F if self.kind == "map" else self.X


class _Frac:
    """Quotient of exact polynomials used while parsing."""

    __slots__ = ("num", "den")

    def __init__(self, num: Jet2, den: Jet2 = None):
        self.num = num
        self.den = den if den is not None else Jet2.const(1)

    def _den_is_one(self):
        return set(self.den.terms) <= {(0, 0)} and is_zero(self.den.terms.get((0, 0), 0) - 1)

    def __add__(self, o):
        if self._den_is_one() and o._den_is_one():
            return _Frac(self.num + o.num)
        return _Frac(self.num * o.den + o.num * self.den, self.den * o.den)

    def __neg__(self):
        return _Frac(-self.num, self.den)

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        return _Frac(self.num * o.num, self.den * o.den)

    def constant(self):
        """Value if both parts are constants, else ``None``."""
        if set(self.num.terms) <= {(0, 0)} and set(self.den.terms) <= {(0, 0)}:
            return self.num.terms.get((0, 0), 0) * inv(self.den.terms[(0, 0)])
        return None

    def normalized(self):
        if set(self.den.terms) <= {(0, 0)}:
            return _Frac(self.num.scale(inv(self.den.terms[(0, 0)])))
        return self


class _Parser:
    def __init__(self, text, line, col0, source, field, names):
        self.toks = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                break
            start = m.start(m.lastindex) if m.lastindex else pos
            if m.group(1):
                raise ParseError("floating literals are not allowed", line, col0 + start + 1, source)
            kind = "num" if m.group(2) else "name" if m.group(3) else "op"
            self.toks.append((kind, m.group(m.lastindex), col0 + start + 1))
            pos = m.end()
        self.i = 0
        self.line = line
        self.source = source
        self.field = field
        self.names = names
        self.end_col = col0 + len(text) + 1

    def error(self, msg, col=None):
        if col is None:
            col = self.toks[self.i][2] if self.i < len(self.toks) else self.end_col
        raise ParseError(msg, self.line, col, self.source)

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, self.end_col)

    def take(self, value=None):
        tok = self.peek()
        if tok[0] is None or (value is not None and tok[1] != value):
            self.error(f"expected {value!r}" if value else "unexpected end of input")
        self.i += 1
        return tok

    def done(self):
        if self.i != len(self.toks):
            self.error(f"unexpected token {self.peek()[1]!r}")

    # expr := term (('+'|'-') term)*
    def expr(self):
        val = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self):
        val = self.unary()
        while self.peek()[1] in ("*", "/"):
            _kind, op, col = self.take()
            rhs = self.unary()
            if op == "*":
                val = val * rhs
            else:
                val = self._divide(val, rhs, col)
        return val

    def _divide(self, a, b, col):
        b = b.normalized()
        c = b.constant()
        if c is not None:
            if is_zero(c):
                self.error("division by zero", col)
            return _Frac(a.num.scale(inv(c)), a.den)
        if is_zero(b.num.terms.get((0, 0), 0)):
            self.error("division by a polynomial vanishing at the origin", col)
        return _Frac(a.num * b.den, a.den * b.num)

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            return -self.unary()
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            neg = False
            if self.peek()[1] == "-":
                self.take()
                neg = True
            kind, val, col = self.take()
            if kind != "num":
                self.error("exponent must be an integer literal", col)
            n = int(val)
            out = _Frac(Jet2.const(1))
            for _ in range(n):
                out = out * base
            if neg:
                out = self._divide(_Frac(Jet2.const(1)), out, col)
            return out
        return base

    def atom(self):
        kind, val, col = self.take()
        if kind == "num":
            return _Frac(Jet2.const(fmpq(int(val))))
        if kind == "name":
            if val == self.names[0]:
                return _Frac(Jet2.x())
            if val == self.names[1]:
                return _Frac(Jet2.y())
            if val in self.field.params:
                return _Frac(Jet2.const(self.field.param(val)))
            self.error(f"unknown name {val!r}", col)
        if val == "(":
            inner = self.expr()
            self.take(")")
            return inner
        self.error(f"unexpected token {val!r}", col)


def _strip_comment(line):
    return line.split("#", 1)[0]


def parse_direction(text: str, field: BaseField, source="<direction>", line=1) -> ProjPoint:
    """Parse a projective literal such as ``[-c:1]`` over ``field``."""
    s = text.strip()
    if not (s.startswith("[") and s.endswith("]") and ":" in s):
        raise ParseError("direction must look like [a:b]", line, 1, source)
    inner = s[1:-1]
    a_txt, b_txt = inner.split(":", 1)
    vals = []
    for part, off in ((a_txt, 2), (b_txt, 3 + len(a_txt))):
        p = _Parser(part, line, off - 1, source, field, ("\0x", "\0y"))
        v = p.expr()
        p.done()
        c = v.normalized().constant()
        if c is None:
            raise ParseError("direction coordinates must be constants", line, off, source)
        vals.append(field(c))
    try:
        return ProjPoint(vals[0], vals[1])
    except ValueError as exc:
        raise ParseError(str(exc), line, 1, source) from exc


def parse_germ(text: str, source: str = "<input>") -> GermSpec:
    """Parse the input grammar into a :class:`GermSpec`."""
    params = []
    names = ("x", "y")
    comps = {}
    blowups_raw = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        stripped = line.strip()
        col0 = len(line) - len(line.lstrip())
        head = stripped.split()[0]
        if head == "param":
            for nm in stripped.split()[1:]:
                if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", nm) or nm in names:
                    raise ParseError(f"bad parameter name {nm!r}", lineno, col0 + 1, source)
                if comps:
                    raise ParseError("parameters must be declared before components", lineno, col0 + 1, source)
                params.append(nm)
            continue
        if head == "vars":
            parts = stripped.split()[1:]
            if len(parts) != 2 or comps:
                raise ParseError("vars takes two names and must precede components", lineno, col0 + 1, source)
            names = tuple(parts)
            continue
        if head == "blowup":
            blowups_raw.append((stripped[len("blowup"):].strip(), lineno))
            continue
        if "=" not in stripped:
            raise ParseError("expected 'target = expression'", lineno, col0 + 1, source)
        target, expr_txt = line.split("=", 1)
        target = target.strip()
        valid = {f"F.{names[0]}": ("F", 0), f"F.{names[1]}": ("F", 1), f"X.d{names[0]}": ("X", 0), f"X.d{names[1]}": ("X", 1)}
        if target not in valid:
            raise ParseError(f"unknown target {target!r}", lineno, col0 + 1, source)
        fld = base_field(tuple(params))
        p = _Parser(expr_txt, lineno, len(line.split("=", 1)[0]) + 1, source, fld, names)
        val = p.expr()
        p.done()
        if target in comps:
            raise ParseError(f"duplicate target {target!r}", lineno, col0 + 1, source)
        comps[target] = (valid[target], val.normalized(), lineno)
    fld = base_field(tuple(params))
    kinds = {v[0][0] for v in comps.values()}
    if len(kinds) != 1:
        raise ParseError("give either F.* (a map) or X.* (a field) components", 1, 1, source)
    kind = kinds.pop()
    slots = [None, None]
    for (_kind, idx), val, lineno in comps.values():
        slots[idx] = (val, lineno)
    spec = GermSpec(field=fld, names=names, source=source)
    if kind == "F":
        if None in slots:
            raise ParseError("a map needs both components", 1, 1, source)
        rational = tuple((v.num, v.den) for v, _ in slots)
        spec.kind = "map"
        spec.F = Diffeo(rational=rational)
    else:
        zero = _Frac(Jet2.zero())
        vals = []
        for s in slots:
            v = s[0] if s else zero
            if not (set(v.den.terms) <= {(0, 0)}):
                raise ParseError("vector field components must be polynomials", s[1], 1, source)
            vals.append(v.num)
        spec.kind = "field"
        spec.X = VectorField(vals[0], vals[1])
    for txt, lineno in blowups_raw:
        spec.blowups.append(parse_direction(txt, fld, source, lineno))
    return spec


def load_germ(path) -> GermSpec:
    path = Path(path)
    return parse_germ(path.read_text(), source=str(path))
