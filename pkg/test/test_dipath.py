"""
Tests for directed paths, dihomotopy classes, trace categories, divisibility,
cancellation and path transport.
Run with: pytest test/test_dipath.py
"""

import math
import sys
from pathlib import Path as FsPath

project_root = FsPath(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root))

import pytest
from hypothesis import given, settings

from cubeabs.dipath import (
    Path,
    adjacent_paths,
    are_dihomotopic,
    cancellation_sufficient,
    compare_trace_categories,
    concat,
    dihomotopy_class,
    divides,
    edge_path,
    is_acyclic,
    is_path,
    make_path,
    paths_between,
    paths_from,
    paths_into,
    trace_category,
    transport_path,
)
from cubeabs.errors import ArgumentError, PreconditionError, ResourceError
from cubeabs.fixtures import builtin
from cubeabs.precubical import cube

from strategies import subcomplexes


@pytest.fixture
def square():
    return cube(2)


def test_make_path_chains(square):
    p = make_path(square, 0, [4, 7])
    assert p.end == 3
    assert p.to_text() == "path 0 : 4 7"
    assert is_path(square, p)
    assert edge_path(square, [6, 5]).start == 0
    with pytest.raises(ArgumentError):
        make_path(square, 0, [5])
    with pytest.raises(ArgumentError):
        make_path(square, 4)
    assert not is_path(square, Path(0, (4,), 2))


def test_concat_paths(square):
    p = concat(make_path(square, 0, [4]), make_path(square, 1, [7]))
    assert p == make_path(square, 0, [4, 7])
    with pytest.raises(ArgumentError):
        concat(make_path(square, 0, [4]), make_path(square, 2, [5]))


def test_square_move(square):
    p = make_path(square, 0, [4, 7])
    assert adjacent_paths(square, p) == frozenset({make_path(square, 0, [6, 5])})
    c = dihomotopy_class(square, p)
    assert len(c) == 2
    assert c.canonical == p
    assert are_dihomotopic(square, make_path(square, 0, [6, 5]), p)


def test_class_budget(square):
    with pytest.raises(ResourceError) as info:
        dihomotopy_class(square, make_path(square, 0, [4, 7]), budget=1)
    assert info.value.budget == "budget_paths"


def test_holes_block_moves():
    """Six monotone paths cross the grid but only four classes survive the holes."""
    A = builtin("two-holes-grid")
    (v,), (w,) = A.init, A.final
    classes = trace_category(A).hom(v, w)
    assert sorted(len(c) for c in classes) == [1, 1, 2, 2]


def test_path_enumeration(square):
    assert len(list(paths_from(square, 0, 2))) == 5
    assert {p.edges for p in paths_into(square, 3, 1)} == {(), (7,), (5,)}
    assert paths_between(square, 0, 3, 2) == [
        make_path(square, 0, [4, 7]),
        make_path(square, 0, [6, 5]),
    ]
    assert paths_between(square, 3, 0, 4) == []


@pytest.mark.parametrize("m", range(1, 5))
@pytest.mark.parametrize("n", range(1, 5))
def test_grid_corner_class_has_every_interleaving(m, n):
    A = builtin(f"grid-{m}x{n}")
    (src,), (dst,) = A.init, A.final
    first = paths_between(A.pcs, src, dst, m + n)[0]
    members = dihomotopy_class(A.pcs, first).representatives
    assert len(members) == math.comb(m + n, m)
    assert {len(p.edges) for p in members} == {m + n}
    letters = {tuple(sorted(sum((A.label(e) for e in p.edges), ()))) for p in members}
    assert len(letters) == 1


def test_trace_category_of_square():
    tc = trace_category(builtin("square"))
    assert tc.objects == (0, 3)
    assert tc.size(0, 3) == 1
    assert tc.size(0, 0) == 1
    assert tc.size(3, 0) == 0
    assert tc.bound == 2
    assert tc.is_complete


def test_trace_category_of_two_holes():
    A = builtin("two-holes-grid")
    (v,), (w,) = A.init, A.final
    tc = trace_category(A)
    assert tc.size(v, w) == 4
    assert tc.complete[(v, w)]
    assert trace_category(A, weight="letters").size(v, w) == 4


def test_trace_category_stable_above_auto_bound():
    A = builtin("grid-2x2")
    auto = trace_category(A)
    raised = trace_category(A, max_len=auto.bound + 3)
    assert all(auto.size(v, w) == raised.size(v, w) for v in auto.objects for w in auto.objects)


def test_cyclic_trace_category_is_bounded():
    A = builtin("peterson-min")
    assert not is_acyclic(A.pcs)
    tc = trace_category(A, max_len=2)
    assert tc.bound == 2
    assert not tc.is_complete
    assert tc.size(0, 0) == 2


def test_trace_category_unknown_weight():
    with pytest.raises(ArgumentError):
        trace_category(builtin("square"), weight="cubes")


def test_identity_comparison():
    A = builtin("two-holes-grid")
    ids = {v: v for v in A.pcs.vertices}
    result = compare_trace_categories(A, A, ids, {})
    assert result.iso
    assert result.complete
    assert not result.mismatches


def test_divides_through_a_representative(square):
    omega = make_path(square, 0, [4, 7])
    gamma = make_path(square, 0, [6])
    d = divides(square, gamma, omega, 0)
    assert d.divisible and d.unique
    assert d.quotient == make_path(square, 2, [5])
    assert not divides(square, make_path(square, 0, [4, 7]), gamma, 0).divisible
    with pytest.raises(PreconditionError):
        divides(square, make_path(square, 1, [7]), omega, 0)
    with pytest.raises(ArgumentError):
        divides(square, gamma, omega, 2)


def test_cancellation(square):
    front = cancellation_sufficient(square, make_path(square, 0, [4]), 1)
    assert front.holds
    assert front.reason == "no-back-face-start"
    assert not cancellation_sufficient(square, make_path(square, 1, [7]), 1).holds


def test_transport_around_free_face(square):
    p = make_path(square, 0, [4, 7])
    q = transport_path(square, 8, 2, p, k=1)
    assert q == make_path(square, 0, [6, 5])
    assert 7 not in q.edges
    untouched = make_path(square, 0, [6, 5])
    assert transport_path(square, 8, 2, untouched) == untouched
    with pytest.raises(PreconditionError):
        transport_path(square, 4, 1, p)


@settings(max_examples=40, derandomize=True, deadline=None)
@given(subcomplexes(max_cells=40))
def test_class_is_a_closure(P):
    v = P.vertices[0]
    paths = sorted(paths_from(P, v, 3, budget=10_000), key=len)
    c = dihomotopy_class(P, paths[-1])
    for rep in c.representatives:
        assert (rep.start, rep.end, len(rep)) == (c.start, c.end, c.length)
        assert dihomotopy_class(P, rep).representatives == c.representatives


if __name__ == "__main__":
    pytest.main([__file__])
