"""Input grammar."""

import pytest

from tidgerm.algebra.field import to_text
from tidgerm.errors import ParseError
from tidgerm.parse import load_germ, parse_direction, parse_germ

EXAMPLE = """\
# a map over Q(c)
param c
F.x = x + c*y + x^2
F.y = y - y^2
"""


def test_parse_example():
    spec = parse_germ(EXAMPLE)
    assert spec.kind == "map"
    assert spec.field.params == ("c",)
    assert spec.F.text() == "(x + c*y + x^2, y - y^2)"


def test_parse_field():
    spec = parse_germ("X.dx = x^2\nX.dy = y^2 - 3/2*x*y\n")
    assert spec.kind == "field"
    assert spec.X.text() == "(x^2)*dx + (-3/2*x*y + y^2)*dy"


def test_rational_components():
    spec = parse_germ("F.x = x/(1 - x)\nF.y = y\n")
    assert spec.F.text() == "((x)/(1 - x), y)"


def test_renamed_coordinates():
    spec = parse_germ("vars z u\nF.z = z - z^2\nF.u = u - z*u^2\n")
    assert spec.names == ("z", "u")
    assert spec.F.text() == "(x - x^2, y - x*y^2)"


def test_blowup_directive():
    spec = parse_germ(EXAMPLE + "blowup [1:0]\n")
    assert [v.text() for v in spec.blowups] == ["[1:0]"]


@pytest.mark.parametrize("text, expected", [("[-c:1]", "[-c:1]"), ("[1:0]", "[1:0]"), ("[2:4]", "[1/2:1]"), ("[c:2*c]", "[1/2:1]")])
def test_parse_direction(text, expected):
    field = parse_germ(EXAMPLE).field
    assert parse_direction(text, field).text() == expected


@pytest.mark.parametrize(
    "text, line, col",
    [
        ("F.x = x + y +\nF.y = y\n", 1, 14),
        ("F.x = x + 1.5*y^2\nF.y = y\n", 1, 11),
        ("F.x = x\nF.y = y + z\n", 2, 11),
        ("F.x = x\nF.q = y\n", 2, 1),
        ("F.x = x\nX.dy = y\n", 1, 1),
        ("F.x = x\n", 1, 1),
        ("F.x = x\nF.y = y / x\n", 2, 9),
    ],
)
def test_parse_errors_have_positions(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_germ(text, source="in.germ")
    assert info.value.line == line
    assert info.value.col == col
    assert str(info.value).startswith(f"in.germ:{line}:{col}:")


def test_parameter_after_components():
    with pytest.raises(ParseError):
        parse_germ("F.x = x\nparam c\nF.y = y\n")


def test_bad_direction():
    with pytest.raises(ParseError):
        parse_direction("1:0", parse_germ(EXAMPLE).field)
    with pytest.raises(ParseError):
        parse_direction("[x:1]", parse_germ(EXAMPLE).field)


def test_packaged_example_files():
    from importlib.resources import files

    base = files("tidgerm") / "data"
    p = load_germ(base / "example_p.germ")
    pq = load_germ(base / "example_pq.germ")
    assert p.blowups == []
    assert [v.text() for v in pq.blowups] == ["[1:0]"]
    assert to_text(p.F.rational[0][0].coeff(0, 1)) == "c"
