"""
Hypothesis strategies for precubical sets and HDAs shared by the tests.

Random complexes are face closures of random cube selections in small grids,
cubes and tensor products, so they are always valid and weakly regular.
"""

import sys
from pathlib import Path

project_root = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root))

from hypothesis import strategies as st

from cubeabs.fixtures import shape
from cubeabs.precubical import (
    PrecubicalSet,
    closure,
    cube,
    grid,
    interval,
    tensor,
)

_AMBIENTS = [
    ("grid-1x2", lambda: grid(1, 2)),
    ("grid-2x2", lambda: grid(2, 2)),
    ("grid-2x3", lambda: grid(2, 3)),
    ("cube3", lambda: cube(3)),
    ("cube3x1", lambda: tensor(cube(2), interval(0, 2))),
]


@st.composite
def subcomplexes(draw, max_cells: int = 60) -> PrecubicalSet:
    """Face closure of a random selection of cubes in a small ambient complex."""
    _, build = draw(st.sampled_from(_AMBIENTS))
    ambient = build()
    tops = draw(
        st.lists(st.sampled_from(ambient.ids), min_size=1, max_size=8, unique=True)
    )
    P = closure(ambient, tops).as_pcs()
    if len(P) > max_cells:
        P = closure(ambient, tops[:1]).as_pcs()
    return P


@st.composite
def shaped_hdas(draw, max_cells: int = 60):
    """Subcomplexes with sources initial, sinks final and coherent labels."""
    return shape(draw(subcomplexes(max_cells)))
