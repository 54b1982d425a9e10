"""
Tests for the built-in models and name-based abstraction maps.
Run with: pytest test/test_fixtures.py
"""

import sys
from pathlib import Path

project_root = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root))

import pytest

from cubeabs.errors import ArgumentError
from cubeabs.fixtures import (
    abstraction_by_names,
    builtin,
    builtin_names,
    coherent_labels,
    shape,
)
from cubeabs.hda import validate_hda
from cubeabs.precubical import PrecubicalSet, cube, interval


def test_builtin_names():
    names = builtin_names()
    assert {"square", "peterson", "peterson-min", "two-holes-grid"} <= set(names)
    assert names[-1] == "grid-MxN"


@pytest.mark.parametrize("name", [n for n in builtin_names() if n != "grid-MxN"])
def test_builtins_are_valid(name):
    A = builtin(name)
    assert validate_hda(A).ok


def test_builtins_are_cached():
    assert builtin("square") is builtin("square")


def test_grids():
    assert builtin("grid-2x3").pcs.counts() == (12, 17, 6)
    assert builtin("grid-1x2").pcs.counts()[2] == 2
    with pytest.raises(ArgumentError, match="unknown builtin"):
        builtin("grid-2")


def test_coherent_labels():
    assert coherent_labels(cube(2)) == {4: "a", 5: "a", 6: "b", 7: "b"}
    labels = coherent_labels(builtin("grid-2x2").pcs)
    assert len(set(labels.values())) == 4


def test_shape_marks_sources_and_sinks():
    A = shape(interval(0, 3))
    assert A.init == {0}
    assert A.final == {3}
    assert A.letters == {"a", "b", "c"}


def test_reduced_peterson_size():
    A = builtin("peterson-min")
    assert A.pcs.counts() == (4, 8)
    assert A.init == A.final
    assert len(A.init) == 2


def test_abstraction_by_names():
    A = builtin("two-holes-grid")
    B = builtin("two-holes-graph")
    amap = abstraction_by_names(A, B)
    assert amap.declared
    for v, w in amap.vertex_map.items():
        assert A.pcs.name(w) == B.pcs.name(v)
    for e, chain in amap.edge_expansion.items():
        assert sum((A.label(x) for x in chain), ()) == B.label(e)


def test_abstraction_needs_names():
    unnamed = PrecubicalSet({0: 0, 1: 0, 2: 1}, {2: ((0, 1),)})
    assert unnamed.name(0) is None
    with pytest.raises(ArgumentError, match="has no name"):
        abstraction_by_names(builtin("square"), shape(unnamed))


if __name__ == "__main__":
    pytest.main([__file__])
