"""
Tests for labelled HDAs: validation, languages, accessibility, restriction
and the cube inventory.
Run with: pytest test/test_hda.py
"""

import sys
from pathlib import Path

project_root = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root))

import pytest

from cubeabs.dipath import make_path
from cubeabs.errors import ArgumentError, PreconditionError
from cubeabs.fixtures import builtin, shape
from cubeabs.hda import (
    Hda,
    accessibility,
    as_word,
    export_inventory,
    extended_label,
    inventory_frame,
    isomorphic,
    language_automaton,
    letter_automaton,
    restrict,
    validate_hda,
)
from cubeabs.precubical import cube, grid


def test_as_word():
    assert as_word("a; b;") == ("a", "b")
    assert as_word(("a",)) == ("a",)
    assert as_word("") == ()


def test_square_shape_is_valid():
    A = builtin("square")
    assert A.init == frozenset({0})
    assert A.final == frozenset({3})
    assert A.label(4) == A.label(5)
    assert A.label(6) == A.label(7)
    assert A.label(4) != A.label(6)
    assert validate_hda(A)


def test_label_coherence_violation():
    A = Hda(cube(2), {0}, {3}, {4: "a", 5: "b", 6: "c", 7: "c"})
    report = validate_hda(A)
    assert not report
    assert [(v.identity, v.cube, v.indices) for v in report.violations] == [
        ("label-coherence", 8, (1,))
    ]


def test_marks_and_labels_on_wrong_cubes():
    A = Hda(cube(2), {4}, {3}, {4: "a", 5: "a", 6: "c", 8: "d"})
    kinds = {v.identity for v in validate_hda(A).violations}
    assert {"init-not-vertex", "unlabeled-edge", "label-not-edge"} <= kinds


def test_missing_label():
    with pytest.raises(ArgumentError):
        Hda(cube(2)).label(4)


def test_extended_label_along_a_path():
    A = Hda(cube(2), {0}, {3}, {4: "a", 5: "a", 6: "b;c", 7: "b;c"})
    assert extended_label(A, make_path(A.pcs, 0, [4, 7])) == ("a", "b", "c")
    assert extended_label(A, make_path(A.pcs, 0)) == ()
    assert A.alphabet == frozenset({("a",), ("b", "c")})
    assert A.letters == frozenset({"a", "b", "c"})


def test_language_automata():
    A = Hda(cube(2), {0}, {3}, {4: "a", 5: "a", 6: "b;c", 7: "b;c"})
    L = language_automaton(A)
    assert L.accepts([("a",), ("b", "c")])
    assert L.accepts([("b", "c"), ("a",)])
    assert not L.accepts([("a",)])
    W = letter_automaton(A)
    assert W.accepts(["a", "b", "c"])
    assert W.accepts(["b", "c", "a"])
    assert not W.accepts(["b", "a", "c"])


def test_peterson_min_letter_language():
    A = builtin("peterson-min")
    W = letter_automaton(A)
    assert W.accepts([])
    assert W.accepts(["b_0:=_0 1", "t:=_0 1", "crit_0", "b_0:=_0 0"])
    assert not W.accepts(["crit_0"])


def test_accessibility():
    acc = accessibility(builtin("square"))
    assert acc.accessible and acc.coaccessible
    circle = accessibility(builtin("circle"))
    assert not circle.accessible
    assert circle.unreachable == frozenset({0})


def test_restrict_keeps_marks():
    A = builtin("square")
    B = restrict(A, [0, 1, 3, 4, 7])
    assert B.pcs.counts() == (3, 2)
    assert set(B.labels) == {4, 7}
    with pytest.raises(PreconditionError):
        restrict(A, [1, 2, 3, 5, 7])


def test_isomorphic_up_to_renaming():
    assert isomorphic(builtin("square"), shape(cube(2)))
    assert not isomorphic(builtin("square"), shape(grid(1, 2)))
    with pytest.raises(ArgumentError):
        isomorphic(builtin("cube3"), builtin("cube3"))


def test_inventory(tmp_path):
    A = builtin("square")
    frame = inventory_frame(A)
    assert len(frame) == 9
    assert list(frame.columns) == ["id", "degree", "name", "label", "faces", "init", "final"]
    assert frame.loc[frame["id"] == 8, "faces"].item() == "4/5 6/7"
    path = export_inventory(A, str(tmp_path))
    assert Path(path).exists()


if __name__ == "__main__":
    pytest.main([__file__])
