"""
Tests for cubical homology, homology bases and the homology graph.
Run with: pytest test/test_homology.py
"""

import sys
from pathlib import Path

project_root = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root))

import numpy as np
import pytest
from hypothesis import given, settings

from cubeabs.config import Settings
from cubeabs.errors import ArgumentError
from cubeabs.fixtures import builtin, builtin_names
from cubeabs.homology import (
    EdgeStatus,
    GraphMode,
    HomologyBasis,
    Ring,
    boundary_chain,
    chain_boundary,
    euler_characteristic,
    homology,
    homology_graph,
    homology_iso_as_graphs,
    parse_ring,
    profile_frame,
    verify_pointing,
)
from cubeabs.precubical import PrecubicalSet, cube

from strategies import subcomplexes


def twisted() -> PrecubicalSet:
    """One vertex, three loops and two squares; H1 is Z + Z/4."""
    return PrecubicalSet(
        {0: 0, 1: 1, 2: 1, 3: 1, 4: 2, 5: 2},
        {
            1: ((0, 0),),
            2: ((0, 0),),
            3: ((0, 0),),
            4: ((1, 2), (2, 3)),
            5: ((1, 3), (3, 1)),
        },
    )


def test_parse_ring():
    assert str(parse_ring("Z")) == "z"
    assert str(parse_ring("rationals")) == "q"
    assert str(parse_ring("p7")) == "p7"
    assert parse_ring(None).ring is Ring.INTEGERS
    assert Ring("Q") is Ring.RATIONALS
    assert "PRIME_FIELD" in Ring
    assert GraphMode("Bruteforce") is GraphMode.BRUTEFORCE
    for bad in ("p4", "r", Ring.PRIME_FIELD):
        with pytest.raises(ArgumentError):
            parse_ring(bad)


def test_boundary_of_square():
    assert boundary_chain(cube(2), 8) == {4: -1, 5: 1, 6: 1, 7: -1}
    with pytest.raises(ArgumentError):
        chain_boundary(cube(2), 0)


def test_boundary_squares_to_zero():
    P = cube(3)
    d1, d2, d3 = (chain_boundary(P, n).data for n in (1, 2, 3))
    assert not np.any(d1 @ d2)
    assert not np.any(d2 @ d3)
    assert euler_characteristic(P) == 1


@pytest.mark.parametrize(
    "name, betti",
    [
        ("square", (1, 0, 0)),
        ("circle", (1, 1)),
        ("torus", (1, 2, 1)),
        ("two-holes-grid", (1, 2, 0)),
        ("cube3", (1, 0, 0, 0)),
    ],
)
def test_betti_numbers(name, betti):
    assert homology(builtin(name).pcs).betti == betti


def test_two_holes_composed_model():
    betti = homology(builtin("two-holes").pcs).betti
    assert betti[:2] == (1, 2)
    assert not any(betti[2:])


def test_torsion_and_field_coefficients():
    P = twisted()
    z = homology(P, "z")
    assert z.betti == (1, 1, 0)
    assert z.torsion == ((), (4,), ())
    assert str(z) == "H0: rank 1; H1: rank 1 torsion 4; H2: rank 0"
    assert homology(P, "q").betti == (1, 1, 0)
    assert homology(P, "p2").betti == (1, 2, 1)
    assert homology(P, "p3").betti == (1, 1, 0)


def test_same_groups_ignores_trailing_zeros():
    assert homology(builtin("square").pcs).same_groups(homology(builtin("point").pcs))
    assert not homology(builtin("circle").pcs).same_groups(homology(builtin("point").pcs))


def test_profile_frame():
    frame = profile_frame(homology(twisted()))
    assert list(frame.columns) == ["degree", "betti", "torsion", "ring"]
    assert frame["torsion"].tolist() == ["", "4", ""]


def test_basis_of_two_holes():
    basis = HomologyBasis(builtin("two-holes-grid").pcs)
    assert basis.rank(1) == 2
    assert [c.key for c in basis.classes(1)] == ["1:0", "1:1"]
    assert basis.find("0:0").degree == 0
    with pytest.raises(ArgumentError):
        basis.find("7:0")
    with pytest.raises(ArgumentError):
        HomologyBasis(cube(2), "p2")


def test_basis_keeps_torsion_classes():
    basis = HomologyBasis(twisted())
    assert basis.orders(1) == (4,)
    assert [c.order for c in basis.classes(1)] == [0, 4]


def _hole_classes(A, basis):
    """The H1 class around the hole next to the initial vertex, then the other."""
    P = A.pcs
    (v,) = A.init
    first, second = basis.classes(1)
    if any(v in (P.source(e), P.target(e)) for e in second.support):
        first, second = second, first
    return first, second


def test_hole_near_start_points_to_hole_near_end():
    A = builtin("two-holes-grid")
    basis = HomologyBasis(A.pcs)
    early, late = _hole_classes(A, basis)
    graph = homology_graph(A.pcs, "bruteforce", basis=basis)
    assert graph.status(early.key, late.key) is EdgeStatus.YES
    assert graph.status(late.key, early.key) is EdgeStatus.NO
    assert not graph.with_status(EdgeStatus.UNKNOWN)
    assert "unknown 0" in graph.lines()


SMALL_BUILTINS = [
    name
    for name in builtin_names()
    if name != "grid-MxN" and len(builtin(name).pcs) <= 20
]


@pytest.mark.parametrize("name", sorted(set(SMALL_BUILTINS) | {"two-holes-grid"}))
def test_search_is_sound(name):
    A = builtin(name)
    basis = HomologyBasis(A.pcs)
    exact = homology_graph(A.pcs, "bruteforce", basis=basis)
    search = homology_graph(A.pcs, "search", basis=basis)
    assert not search.with_status(EdgeStatus.NO)
    assert set(search.yes_edges) <= set(exact.yes_edges)
    nodes = {c.key: c for c in basis.generators}
    for a, b in search.yes_edges:
        cert = search.certificate(a, b)
        assert verify_pointing(A.pcs, nodes[a], nodes[b], cert, basis)


def test_auto_mode_follows_oracle_bound():
    P = builtin("two-holes-grid").pcs
    assert homology_graph(P, "auto").mode is GraphMode.BRUTEFORCE
    small = Settings(oracle_bound=4)
    assert homology_graph(P, "auto", settings=small).mode is GraphMode.SEARCH


def test_graph_frame():
    graph = homology_graph(builtin("circle").pcs, "bruteforce")
    frame = graph.to_frame()
    assert list(frame.columns) == ["source", "target", "status"]
    assert len(frame) == len(graph.nodes) ** 2


def test_iso_as_graphs_on_itself():
    P = builtin("two-holes-grid").pcs
    assert homology_iso_as_graphs(P, P) is True
    assert homology_iso_as_graphs(P, builtin("circle").pcs) is False


@settings(max_examples=40, derandomize=True, deadline=None)
@given(subcomplexes())
def test_random_boundaries_square_to_zero(P):
    for n in range(2, P.dimension + 1):
        assert not np.any(chain_boundary(P, n - 1).data @ chain_boundary(P, n).data)
    profile = homology(P)
    assert sum((-1) ** n * b for n, b in enumerate(profile.betti)) == euler_characteristic(P)


if __name__ == "__main__":
    pytest.main([__file__])
