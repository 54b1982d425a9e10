"""
Tests for the parallel composition of program graphs.
Run with: pytest test/test_compose.py
"""

import sys
from pathlib import Path

project_root = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root))

import pytest

from cubeabs.compose import ComposeOptions, compose, merge_variables
from cubeabs.config import Settings
from cubeabs.errors import ArgumentError, PreconditionError, ResourceError
from cubeabs.fixtures import MODELS_DIR
from cubeabs.hda import accessibility
from cubeabs.program_graph import load_program_graph, parse_program_graph


@pytest.fixture
def xy():
    return load_program_graph(MODELS_DIR / "xy_process.pg")


@pytest.fixture
def peterson():
    return [
        load_program_graph(MODELS_DIR / "peterson_0.pg"),
        load_program_graph(MODELS_DIR / "peterson_1.pg"),
    ]


def test_single_process_is_a_line(xy):
    A = compose([xy])
    assert A.pcs.counts() == (5, 4)
    assert len(A.init) == 1 and len(A.final) == 1
    assert A.pcs.name(min(A.init)) == "l0|x=0,y=0"
    assert A.letters == {"x:=_0 1", "x:=_0 0", "y:=_0 1", "y:=_0 0"}


def test_two_holes(xy):
    A = compose([xy, xy])
    assert A.pcs.counts() == (23, 32, 8)
    (v,) = A.init
    assert A.pcs.find("l0,l0|x=0,y=0") == v
    assert A.pcs.name(min(A.final)) == "l4,l4|x=0,y=0"
    assert accessibility(A).accessible


def test_critical_sections_never_overlap(xy):
    """No state has both processes between x:=1 and x:=0."""
    A = compose([xy, xy])
    names = [A.pcs.name(v) for v in A.pcs.vertices]
    assert not any(n.startswith("l1,l1") for n in names)
    assert not any(n.startswith("l3,l3") for n in names)


def test_peterson(peterson):
    A = compose(peterson)
    assert A.pcs.counts() == (20, 34, 10)
    assert len(A.init) == 2
    assert A.final == A.init
    assert {"crit_0", "crit_1", "t:=_0 1", "t:=_1 0"} <= A.letters


def test_max_degree(xy):
    A = compose([xy, xy], ComposeOptions(max_degree=1))
    assert A.pcs.counts() == (23, 32)


def test_explicit_finals(xy):
    A = compose([xy, xy], ComposeOptions(finals=[["l2", "l2"], ["l4", "l4"]]))
    assert sorted(A.pcs.name(v) for v in A.final) == [
        "l2,l2|x=0,y=0",
        "l4,l4|x=0,y=0",
    ]
    with pytest.raises(ArgumentError):
        compose([xy, xy], ComposeOptions(finals=[["l4"]]))


def test_state_budget(peterson):
    with pytest.raises(ResourceError) as info:
        compose(peterson, ComposeOptions(budget_states=5))
    assert info.value.budget == "budget_states"
    assert info.value.limit == 5
    with pytest.raises(ResourceError):
        compose(peterson, settings=Settings(budget_states=5))


def test_shared_declarations(xy):
    assert list(merge_variables([xy, xy], ["x", "y"])) == ["x", "y"]
    with pytest.raises(ArgumentError, match="not declared shared"):
        compose([xy, xy], ComposeOptions(shared=["x"]))
    with pytest.raises(ArgumentError, match="not declared"):
        compose([xy, xy], ComposeOptions(shared=["x", "y", "z"]))


def test_inconsistent_declarations(xy):
    other = parse_program_graph("var x : 0..2 = 0\nloc a\ninit a\n")
    with pytest.raises(ArgumentError, match="inconsistently"):
        merge_variables([xy, other])
    with pytest.raises(ArgumentError):
        compose([])


def test_assignment_leaving_the_domain():
    counter = parse_program_graph(
        "var n : 0..1 = 0\nloc a\ninit a\nedge a -> a n:=n+1\n"
    )
    with pytest.raises(PreconditionError, match="outside its domain"):
        compose([counter])


def test_action_labels_carry_the_process_id():
    pg = parse_program_graph("loc a\nloc b\ninit a\nfinal b\nedge a -> b go\n")
    A = compose([pg, pg, pg])
    assert A.pcs.counts() == (8, 12, 6, 1)
    assert A.letters == {"go_0", "go_1", "go_2"}
    assert A.pcs.name(min(A.init)) == "a,a,a"


def test_composition_is_deterministic(peterson):
    assert compose(peterson) == compose(peterson)


if __name__ == "__main__":
    pytest.main([__file__])
