"""
Built-in models.

Small shapes (point, interval, square, cube3, circle, torus, grids, a pinched
square), the two-process models composed from the bundled program graphs,
and hand-encoded objects: the two-hole model's grid and graph abstractions,
the three-square complex and the minimal model of the mutual exclusion
protocol.
"""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path
from typing import Callable, Mapping, Optional, Sequence
import re

import networkx as nx

from ._logger import logger
from .compose import compose
from .errors import ArgumentError
from .hda import Hda, as_word
from .precubical import (
    PrecubicalSet,
    cube,
    grid,
    interval,
    point,
    reachability,
)
from .program_graph import load_program_graph
from .reduce import AbstractionMap, ReduceOptions, reduce

logger.debug(f"Loading module {__name__}.")

MODELS_DIR = Path(__file__).resolve().parent.parent / "models"

__all__ = [
    "MODELS_DIR",
    "abstraction_by_names",
    "builtin",
    "builtin_names",
    "coherent_labels",
    "shape",
]


def coherent_labels(P: PrecubicalSet) -> dict[int, str]:
    """
    Label edges by direction: opposite edges of a square share a letter.
    Classes are lettered a, b, c, ... in order of their least edge.
    """
    G = nx.Graph()
    G.add_nodes_from(P.edges)
    for z in P.squares:
        for i in (1, 2):
            G.add_edge(P.face(z, 0, i), P.face(z, 1, i))
    classes = sorted(nx.connected_components(G), key=min)
    labels = {}
    for j, component in enumerate(classes):
        letter = chr(ord("a") + j) if j < 26 else f"a{j}"
        labels.update({e: letter for e in component})
    return labels


def shape(P: PrecubicalSet, labels: Optional[Mapping[int, str]] = None) -> Hda:
    """An HDA on a bare shape: sources initial, sinks final."""
    reach = reachability(P)
    return Hda(P, reach.m1, reach.m0, labels or coherent_labels(P))


def _circle() -> PrecubicalSet:
    return PrecubicalSet({0: 0, 1: 1}, {1: ((0, 0),)}, {0: "v", 1: "a"})


def _torus() -> PrecubicalSet:
    return PrecubicalSet(
        {0: 0, 1: 1, 2: 1, 3: 2},
        {1: ((0, 0),), 2: ((0, 0),), 3: ((1, 1), (2, 2))},
        {0: "v", 1: "a", 2: "b", 3: "x"},
    )


def _pinched() -> PrecubicalSet:
    """A square whose two front faces coincide."""
    return PrecubicalSet(
        {0: 0, 1: 0, 2: 0, 3: 1, 4: 1, 5: 1, 6: 2},
        {3: ((0, 1),), 4: ((1, 2),), 5: ((1, 2),), 6: ((3, 4), (3, 5))},
        {0: "a", 1: "b", 2: "c", 6: "x"},
    )


def _build(
    vertices: Sequence[str],
    edges: Sequence[tuple[str, str, str]],
    squares: Optional[Mapping[str, tuple[int, int, int, int]]] = None,
    init: Sequence[str] = (),
    final: Sequence[str] = (),
) -> Hda:
    """
    Hand-encoded HDA. Edges are (source, target, label); a square lists the
    positions in ``edges`` of its faces ``d^0_1, d^1_1, d^0_2, d^1_2``.
    Ids follow insertion order: vertices, edges, squares.
    """
    squares = squares or {}
    at = {v: j for j, v in enumerate(vertices)}
    base = len(vertices)
    top = base + len(edges)
    dims = [0] * base + [1] * len(edges) + [2] * len(squares)
    faces = {base + j: ((at[s], at[t]),) for j, (s, t, _) in enumerate(edges)}
    names = dict(enumerate(vertices))
    for j, (name, (a, b, c, d)) in enumerate(squares.items()):
        faces[top + j] = ((base + a, base + b), (base + c, base + d))
        names[top + j] = name
    P = PrecubicalSet.from_cubes(dims, faces, names)
    labels = {base + j: as_word(w) for j, (_, _, w) in enumerate(edges)}
    reach = reachability(P)
    return Hda(
        P,
        [at[v] for v in init] if init else reach.m1,
        [at[v] for v in final] if final else reach.m0,
        labels,
    )


def _three_squares() -> Hda:
    vertices = ["q0", "p1", "q1", "p0", "p2", "p4", "p3", "p5"]
    edges = [
        ("q0", "p0", "a"),
        ("p1", "p2", "a"),
        ("q1", "p4", "a"),
        ("q0", "p1", "b"),
        ("p0", "p2", "b"),
        ("p3", "p5", "b"),
        ("p1", "q1", "b"),
        ("p2", "p4", "b"),
        ("p0", "p3", "c"),
        ("p2", "p5", "c"),
    ]
    squares = {"y": (0, 1, 3, 4), "x": (1, 2, 6, 7), "z": (8, 9, 4, 5)}
    return _build(vertices, edges, squares)


def _grid_name(i: int, j: int) -> str:
    return f"l{i},l{j}|x=0,y=0"


def _two_holes_grid() -> Hda:
    """The two-hole model with both critical sections merged into edges."""
    steps = {0: "x", 2: "y"}
    vertices = [_grid_name(i, j) for i in (0, 2, 4) for j in (0, 2, 4)]
    edges = []
    for i in (0, 2, 4):
        for j in (0, 2):
            v = steps[j]
            edges.append(
                (_grid_name(i, j), _grid_name(i, j + 2), f"{v}:=_1 1;{v}:=_1 0")
            )
    for i in (0, 2):
        for j in (0, 2, 4):
            v = steps[i]
            edges.append(
                (_grid_name(i, j), _grid_name(i + 2, j), f"{v}:=_0 1;{v}:=_0 0")
            )
    # process 1 edges first, then process 0 edges
    def vertical(i: int, j: int) -> int:
        return 2 * (i // 2) + j // 2

    def horizontal(i: int, j: int) -> int:
        return 6 + 3 * (i // 2) + j // 2

    squares = {}
    for i, j in ((0, 2), (2, 0)):
        squares[f"s{i}{j}"] = (
            horizontal(i, j),
            horizontal(i, j + 2),
            vertical(i, j),
            vertical(i + 2, j),
        )
    return _build(
        vertices, edges, squares, [_grid_name(0, 0)], [_grid_name(4, 4)]
    )


def _two_holes_graph() -> Hda:
    """Three states; each edge runs through one critical section per process."""
    x01 = "x:=_0 1;x:=_0 0;x:=_1 1;x:=_1 0"
    x10 = "x:=_1 1;x:=_1 0;x:=_0 1;x:=_0 0"
    y01 = "y:=_0 1;y:=_0 0;y:=_1 1;y:=_1 0"
    y10 = "y:=_1 1;y:=_1 0;y:=_0 1;y:=_0 0"
    s, m, t = _grid_name(0, 0), _grid_name(2, 2), _grid_name(4, 4)
    edges = [(s, m, x01), (s, m, x10), (m, t, y01), (m, t, y10)]
    return _build([s, m, t], edges, None, [s], [t])


def _peterson_min() -> Hda:
    """The four-state minimal model of the mutual exclusion protocol."""
    n000 = "l0,l0|b_0=0,b_1=0,t=0"
    n001 = "l0,l0|b_0=0,b_1=0,t=1"
    n020 = "l0,l2|b_0=0,b_1=1,t=0"
    n201 = "l2,l0|b_0=1,b_1=0,t=1"
    enter0 = "b_0:=_0 1;t:=_0 1"
    enter1 = "b_1:=_1 1;t:=_1 0"
    leave0 = "crit_0;b_0:=_0 0"
    leave1 = "crit_1;b_1:=_1 0"
    edges = [
        (n000, n020, enter1),
        (n000, n201, enter0),
        (n001, n201, enter0),
        (n001, n020, enter1),
        (n020, n000, leave1),
        (n201, n001, leave0),
        (n020, n201, f"{enter0};{leave1}"),
        (n201, n020, f"{enter1};{leave0}"),
    ]
    return _build(
        [n000, n001, n020, n201], edges, None, [n000, n001], [n000, n001]
    )


def _compose_models(*files: str) -> Hda:
    pgs = [load_program_graph(MODELS_DIR / f) for f in files]
    return compose(pgs)


def _two_holes() -> Hda:
    return _compose_models("xy_process.pg", "xy_process.pg")


def _peterson() -> Hda:
    return _compose_models("peterson_0.pg", "peterson_1.pg")


def _peterson_partial() -> Hda:
    return reduce(_peterson(), ReduceOptions(enable_manual=False))[0]


_BUILTINS: dict[str, Callable[[], Hda]] = {
    "point": lambda: shape(point()),
    "interval": lambda: shape(interval(0, 1)),
    "square": lambda: shape(cube(2)),
    "cube3": lambda: shape(cube(3)),
    "circle": lambda: shape(_circle()),
    "torus": lambda: shape(_torus()),
    "pinched": lambda: shape(_pinched()),
    "two-holes": _two_holes,
    "two-holes-grid": _two_holes_grid,
    "two-holes-graph": _two_holes_graph,
    "three-squares": _three_squares,
    "peterson": _peterson,
    "peterson-partial": _peterson_partial,
    "peterson-min": _peterson_min,
}

_GRID = re.compile(r"grid-(\d+)x(\d+)$")


def builtin_names() -> list[str]:
    return sorted(_BUILTINS) + ["grid-MxN"]


@lru_cache(maxsize=None)
def builtin(name: str) -> Hda:
    """
    A built-in model by name; ``grid-MxN`` gives the full M x N grid.

    Raises:
        ArgumentError: unknown name.
    """
    m = _GRID.match(name)
    if m:
        return shape(grid(int(m.group(1)), int(m.group(2))))
    try:
        factory = _BUILTINS[name]
    except KeyError:
        raise ArgumentError(
            f"unknown builtin {name!r}, known: {', '.join(builtin_names())}"
        ) from None
    logger.debug(f"Building builtin {name}")
    return factory()


def _follow(A: Hda, start: int, word: Sequence[str]) -> list[int]:
    """The edge path from ``start`` spelling ``word`` letter by letter."""
    P = A.pcs
    path, v, rest = [], start, tuple(word)
    while rest:
        step = [
            e
            for e in P.out_edges(v)
            if rest[: len(A.label(e))] == A.label(e) and A.label(e)
        ]
        if len(step) != 1:
            raise ArgumentError(
                f"word {';'.join(word)} does not spell a unique path from {v}"
            )
        e = step[0]
        path.append(e)
        rest = rest[len(A.label(e)):]
        v = P.target(e)
    return path


def abstraction_by_names(A: Hda, B: Hda) -> AbstractionMap:
    """
    Declared map from B into A: vertices match by name, each edge of B
    expands into the path of A that spells its label from the mapped source.
    """
    vertex_map = {}
    for v in B.pcs.vertices:
        name = B.pcs.name(v)
        if name is None:
            raise ArgumentError(f"vertex {v} of the abstraction has no name")
        vertex_map[v] = A.pcs.find(name)
    expansion = {}
    for e in B.pcs.edges:
        chain = _follow(A, vertex_map[B.pcs.source(e)], B.label(e))
        if A.pcs.target(chain[-1]) != vertex_map[B.pcs.target(e)]:
            raise ArgumentError(f"edge {e} does not land on its mapped target")
        expansion[e] = tuple(chain)
    return AbstractionMap(vertex_map, expansion, declared=True)
