"""
Tests for the program graph language: declarations, guards, actions and
error positions.
Run with: pytest test/test_program_graph.py
"""

import sys
from pathlib import Path

project_root = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root))

import pytest

from cubeabs.errors import LoadError, ParseError
from cubeabs.fixtures import MODELS_DIR
from cubeabs.program_graph import (
    Assignment,
    Term,
    load_program_graph,
    parse_program_graph,
)

HEADER = """var x : 0..1 = 0
var y : 0..2 = 0|2
loc a
loc b
init a
"""


def parse(body: str):
    return parse_program_graph(HEADER + body, name="test")


def test_declarations():
    pg = parse("final b\n")
    assert pg.locations == ["a", "b"]
    assert pg.initial == "a"
    assert pg.finals == ["b"]
    assert pg.variables["y"].initial == (0, 2)
    assert list(pg.variables["y"].domain) == [0, 1, 2]
    assert pg.name == "test"


def test_comments_and_blank_lines():
    pg = parse("\n   # nothing here\nedge a -> b go  # trailing\n")
    assert len(pg.instructions) == 1
    assert pg.instructions[0].action == "go"


def test_action_edge():
    (ins,) = parse("edge a -> b [x=0] go\n").instructions
    assert (ins.source, ins.target, ins.action) == ("a", "b", "go")
    assert ins.enabled({"x": 0, "y": 0})
    assert not ins.enabled({"x": 1, "y": 0})
    assert ins.effect({"x": 0, "y": 1}) == {"x": 0, "y": 1}
    assert str(ins) == "a -> b [x=0] go"


def test_simultaneous_assignments():
    (ins,) = parse("edge a -> b x:=1, y:=x\n").instructions
    assert ins.assignments == (
        Assignment("x", Term(1)),
        Assignment("y", Term("x")),
    )
    assert ins.effect({"x": 0, "y": 2}) == {"x": 1, "y": 0}
    assert ins.guard is None


def test_arithmetic_terms():
    (ins,) = parse("edge a -> a [y!=2] y:=y+1\n").instructions
    assert ins.effect({"x": 0, "y": 1}) == {"x": 0, "y": 2}
    assert not ins.enabled({"x": 0, "y": 2})
    assert Term("y", "-", 1).evaluate({"y": 2}) == 1


def test_guard_precedence():
    (ins,) = parse("edge a -> b [x=0 & (y!=1 | x=1)] go\n").instructions
    assert str(ins.guard) == "(x=0 & (y!=1 | x=1))"
    assert ins.guard.variables() == {"x", "y"}
    assert ins.enabled({"x": 0, "y": 2})
    assert not ins.enabled({"x": 0, "y": 1})
    (ins,) = parse("edge a -> b [x=1 | y=0 & x=0] go\n").instructions
    assert ins.enabled({"x": 0, "y": 0})
    assert not ins.enabled({"x": 0, "y": 1})


def test_outgoing_instructions():
    pg = parse("edge a -> b go\nedge b -> a back\nedge a -> a stay\n")
    assert [j for j, _ in pg.outgoing("a")] == [0, 2]
    assert pg.location_index("b") == 1


@pytest.mark.parametrize(
    "body, line, column, fragment",
    [
        ("edge a -> c go\n", 6, 11, "undeclared location 'c'"),
        ("edge a -> b z:=1\n", 6, 13, "undeclared variable 'z'"),
        ("edge a -> b x:=2\n", 6, 16, "outside the domain of x"),
        ("edge a -> b x:=1, x:=0\n", 6, 19, "assigned twice"),
        ("edge a -> b [x=0]\n", 6, 18, "missing action"),
        ("edge a -> b [x] go\n", 6, 15, "expected '=' or '!='"),
        ("edge a -> b go now\n", 6, 16, "unexpected 'now'"),
        ("loc a\n", 6, 5, "declared twice"),
        ("init b\n", 6, None, "initial location given twice"),
        ("jump a\n", 6, 1, "unknown record 'jump'"),
        ("loc c$\n", 6, 6, "unexpected character '$'"),
    ],
)
def test_errors_carry_positions(body, line, column, fragment):
    with pytest.raises(ParseError) as info:
        parse(body)
    assert info.value.line == line
    if column is not None:
        assert info.value.column == column
    assert fragment in str(info.value)


def test_variable_errors():
    with pytest.raises(ParseError) as info:
        parse_program_graph("var x : 0..1 = 2\nloc a\ninit a\n")
    assert (info.value.line, info.value.column) == (1, 16)
    with pytest.raises(ParseError, match="empty domain"):
        parse_program_graph("var x : 2..1 = 2\n")


def test_missing_locations():
    with pytest.raises(ParseError, match="no location"):
        parse_program_graph("var x : 0..1 = 0\n")
    with pytest.raises(ParseError, match="no initial location"):
        parse_program_graph("loc a\n")


def test_parse_error_is_a_load_error():
    assert issubclass(ParseError, LoadError)


@pytest.mark.parametrize("name", ["peterson_0.pg", "peterson_1.pg", "xy_process.pg"])
def test_bundled_models_parse(name):
    pg = load_program_graph(MODELS_DIR / name)
    assert pg.initial == "l0"
    assert pg.instructions
    assert name in pg.name


def test_peterson_process():
    pg = load_program_graph(MODELS_DIR / "peterson_0.pg")
    assert pg.variables["t"].initial == (0, 1)
    crit = next(ins for ins in pg.instructions if ins.action == "crit")
    assert crit.enabled({"b_0": 1, "b_1": 0, "t": 1})
    assert crit.enabled({"b_0": 1, "b_1": 1, "t": 0})
    assert not crit.enabled({"b_0": 1, "b_1": 1, "t": 1})


if __name__ == "__main__":
    pytest.main([__file__])
