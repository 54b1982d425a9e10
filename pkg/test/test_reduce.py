"""
Tests for checked collapses, edge merges, the reduction loop, report replay
and certification.
Run with: pytest test/test_reduce.py
"""

import sys
from pathlib import Path

project_root = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root))

import pytest
from hypothesis import given, settings

from cubeabs.errors import (
    ArgumentError,
    IntegrityError,
    LoadError,
    PreconditionError,
    RefusalError,
)
from cubeabs.dipath import compare_trace_categories, is_acyclic
from cubeabs.fixtures import abstraction_by_names, builtin, shape
from cubeabs.hda import Hda, accessibility
from cubeabs.homology import homology
from cubeabs.precubical import PrecubicalSet, cube, interval, reachability
from cubeabs.reduce import (
    ClauseStatus,
    Guarantee,
    ReduceOptions,
    ReductionReport,
    StepKind,
    Theorem,
    Verdict,
    certify,
    check_elementary,
    check_manual_2cube,
    check_merge,
    check_vertex_star,
    collapse_elementary,
    collapse_vertex_star,
    declared_map,
    merge_edges,
    reduce,
    replay,
)

from strategies import shaped_hdas

SQUARE_REPORT = """reduction v1
counts-before 4 4 1
step vstar 8 01 -
step merge 2 - -
merged 7 = 6;5
counts-after 2 1
"""


def boxed_square() -> Hda:
    """A square with every corner initial or final."""
    return Hda(cube(2), {0, 1}, {2, 3}, {4: "a", 5: "a", 6: "b", 7: "b"})


def test_elementary_needs_an_alternative_edge():
    judgment = check_elementary(builtin("square"), 8, 1, 2)
    assert not judgment.applicable
    assert judgment.theorem is Theorem.ELEM_DIM2
    assert [c.name for c in judgment.failed] == ["alternative-edge"]
    assert not judgment.guarantees


def test_elementary_blocked_by_distinguished_corner():
    judgment = check_elementary(boxed_square(), 8, 1, 2)
    assert "corner-not-distinguished" in {c.name for c in judgment.failed}


def test_elementary_blocked_by_second_edge():
    """The middle square's free face ends where another edge also ends."""
    A = builtin("three-squares")
    x = A.pcs.find("x")
    judgment = check_elementary(A, x, 1, 2)
    assert [c.name for c in judgment.failed] == ["unique-edge"]
    with pytest.raises(RefusalError) as info:
        collapse_elementary(A, x, 1, 2)
    assert info.value.judgment == judgment


def test_forced_elementary_collapse():
    A = builtin("three-squares")
    x = A.pcs.find("x")
    B, judgment = collapse_elementary(A, x, 1, 2, force=True)
    assert not judgment.applicable
    assert len(B.pcs) == len(A.pcs) - 2
    assert B.pcs.counts()[2] == 2


def test_elementary_argument_errors():
    A = builtin("square")
    with pytest.raises(ArgumentError):
        check_elementary(A, 8, 2, 1)
    with pytest.raises(ArgumentError):
        check_elementary(A, 8, 0, 3)


def test_vertex_star_on_square():
    A = builtin("square")
    judgment = check_vertex_star(A, 8, "01")
    assert judgment.applicable
    assert judgment.guarantees == frozenset(Guarantee)
    B, _ = collapse_vertex_star(A, 8, (0, 1))
    assert len(B.pcs) == len(A.pcs) - 4
    assert 1 not in B.pcs
    assert reachability(B.pcs).m0 == reachability(A.pcs).m0


def test_vertex_star_conditions():
    A = builtin("square")
    assert "mixed-corner" in {c.name for c in check_vertex_star(A, 8, "00").failed}
    with pytest.raises(ArgumentError):
        check_vertex_star(A, 8, "011")
    with pytest.raises(ArgumentError):
        check_vertex_star(A, 8, "02")
    assert "corner-not-distinguished" in {
        c.name for c in check_vertex_star(boxed_square(), 8, "01").failed
    }


def test_vertex_star_outside_the_cube():
    """The mixed corner of the first square of a 1 x 2 grid touches the second."""
    A = builtin("grid-1x2")
    x = A.pcs.squares[0]
    failed = {c.name for c in check_vertex_star(A, x, "01").failed} | {
        c.name for c in check_vertex_star(A, x, "10").failed
    }
    assert "star-in-cube" in failed


def test_vertex_star_on_a_three_cube():
    A = builtin("cube3")
    (x,) = A.pcs.cubes(3)
    B, judgment = collapse_vertex_star(A, x, "011")
    assert judgment.applicable
    assert len(B.pcs) == len(A.pcs) - 8


def test_merge_of_a_chain():
    P = interval(0, 2)
    A = shape(P, {3: "a", 4: "b"})
    assert check_merge(A, 1).applicable
    B = merge_edges(A, 1)
    assert B.pcs.counts() == (2, 1)
    assert B.label(5) == ("a", "b")
    with pytest.raises(RefusalError):
        merge_edges(A, 0)
    with pytest.raises(ArgumentError):
        check_merge(A, 3)


def test_merge_refused_next_to_a_square():
    judgment = check_merge(builtin("square"), 1)
    assert "no-higher-cubes" in {c.name for c in judgment.failed}


def test_manual_check_preconditions():
    with pytest.raises(PreconditionError):
        check_manual_2cube(builtin("interval"), 2, 1)
    assert not check_manual_2cube(boxed_square(), 8, 2).applicable


def test_reduce_square():
    A = builtin("square")
    B, report = reduce(A)
    assert B.pcs.counts() == (2, 1)
    assert [s.kind for s in report.steps] == [StepKind.VERTEX_STAR, StepKind.MERGE]
    assert report.to_text() == SQUARE_REPORT
    assert B.label(7) == A.label(6) + A.label(5)
    assert report.edge_expansion() == {7: (6, 5)}


def test_reduce_boxed_square_is_a_fixpoint():
    A = boxed_square()
    B, report = reduce(A)
    assert B == A
    assert report.steps == []
    assert report.counts_before == report.counts_after


def test_max_steps():
    _, report = reduce(builtin("square"), ReduceOptions(max_steps=1))
    assert len(report.steps) == 1


def test_reduce_two_holes_grid_keeps_holes():
    A = builtin("two-holes-grid")
    B, report = reduce(A)
    assert homology(B.pcs).same_groups(homology(A.pcs))
    assert accessibility(B).accessible


def test_report_text_round_trip():
    report = ReductionReport.from_text(SQUARE_REPORT)
    assert report.to_text() == SQUARE_REPORT
    assert report.merged == {7: (6, 5)}
    frame = report.to_frame()
    assert frame["kind"].tolist() == ["vstar", "merge"]


@pytest.mark.parametrize(
    "text",
    [
        "",
        "reduction v2\n",
        "reduction v1\ncounts-before 4 4 1\n",
        "reduction v1\ncounts-before 4 4 1\nstep elem 8 1\ncounts-after 4 4 1\n",
        "reduction v1\ncounts-before 4\nmerged 7 = 6;5\ncounts-after 4\n",
        "reduction v1\ncounts-before 4\nstep jump 8 1 1\ncounts-after 4\n",
    ],
)
def test_report_parse_errors(text):
    with pytest.raises(LoadError):
        ReductionReport.from_text(text)


def test_replay():
    A = builtin("square")
    B, report = reduce(A)
    assert replay(A, report, recheck=True) == B
    with pytest.raises(IntegrityError):
        replay(builtin("grid-1x2"), report)
    broken = ReductionReport.from_text(SQUARE_REPORT.replace("counts-after 2 1", "counts-after 3 2"))
    with pytest.raises(IntegrityError):
        replay(A, broken)


def test_replay_rejects_unlicensed_step():
    report = ReductionReport.from_text(
        "reduction v1\ncounts-before 4 4 1\nstep elem 8 1 2\ncounts-after 4 3\n"
    )
    A = builtin("square")
    assert replay(A, report).pcs.counts() == (4, 3)
    with pytest.raises(IntegrityError):
        replay(A, report, recheck=True)


def test_certify_square_reduction():
    A = builtin("square")
    B, report = reduce(A)
    result = certify(A, B, report)
    assert result.verdict is Verdict.CERTIFIED
    assert result.lines()[0] == "verdict certified"
    statuses = {c.name: c.status for c in result.clauses}
    assert statuses == {
        "distinguished": ClauseStatus.HOLDS,
        "homotopy": ClauseStatus.HOLDS,
        "trace": ClauseStatus.HOLDS,
        "homology-graph": ClauseStatus.HOLDS,
    }


def test_certify_against_itself():
    assert certify(builtin("square"), builtin("square")).verdict is Verdict.CERTIFIED
    A = builtin("peterson-min")
    assert certify(A, A).verdict is Verdict.CERTIFIED_BOUNDED


def test_certify_rejects_wrong_abstraction():
    A = builtin("square")
    _, report = reduce(A)
    with pytest.raises(IntegrityError):
        certify(A, A, report)


def test_certify_declared_map_on_two_holes():
    """Hand-declared map from the three-state graph into the two-hole grid."""
    A = builtin("two-holes-grid")
    B = builtin("two-holes-graph")
    result = certify(A, B, amap=abstraction_by_names(A, B))
    trace = next(c for c in result.clauses if c.name == "trace")
    assert trace.status is ClauseStatus.HOLDS
    (s,), (t,) = B.init, B.final
    assert f"{s}->{t}:4/4" in trace.detail
    assert result.verdict is Verdict.CERTIFIED_BOUNDED


def test_certify_refutes_a_bad_map():
    """Two parallel edges cannot abstract a filled square."""
    A = builtin("square")
    P = PrecubicalSet({0: 0, 1: 0, 2: 1, 3: 1}, {2: ((0, 1),), 3: ((0, 1),)})
    B = Hda(P, {0}, {1}, {2: "a", 3: "b"})
    result = certify(A, B, amap=declared_map({0: 0, 1: 3}, {2: [4, 7], 3: [6, 5]}))
    assert result.verdict is Verdict.REFUTED
    homotopy = next(c for c in result.clauses if c.name == "homotopy")
    assert homotopy.status is ClauseStatus.FAILS


def test_peterson_pipeline():
    A = builtin("peterson")
    B, report = reduce(A, ReduceOptions(enable_manual=True))
    assert B.pcs.counts() == (4, 8)
    assert A.init <= frozenset(B.pcs.vertices)
    result = certify(A, B, report)
    assert result.verdict is Verdict.CERTIFIED_BOUNDED
    _, again = reduce(A, ReduceOptions(enable_manual=True))
    assert again.to_text() == report.to_text()


def test_reduced_peterson_is_a_fixpoint():
    B = builtin("peterson-min")
    C, report = reduce(B, ReduceOptions(enable_manual=True))
    assert C == B
    assert not report.steps


@settings(max_examples=200, derandomize=True, deadline=None)
@given(shaped_hdas(max_cells=60))
def test_reduction_preserves_invariants(A):
    B, report = reduce(A)
    assert len(B.pcs) <= len(A.pcs)
    assert homology(B.pcs).same_groups(homology(A.pcs))
    ra, rb = reachability(A.pcs), reachability(B.pcs)
    assert (ra.m0, ra.m1) == (rb.m0, rb.m1)
    assert accessibility(B).accessible == accessibility(A).accessible
    assert replay(A, report) == B
    if is_acyclic(A.pcs):
        amap = report.abstraction_map(B)
        cmp = compare_trace_categories(A, B, amap.vertex_map, amap.edge_expansion)
        assert cmp.iso, cmp.mismatches
        assert cmp.complete
        assert all(amap.vertex_map[v] == v for v in B.pcs.vertices)


if __name__ == "__main__":
    pytest.main([__file__])
