"""
Precubical sets.

A precubical set is stored as a map from integer cube ids to degrees together
with the face operators: ``faces[x][i - 1] == (d^0_i x, d^1_i x)``. Cube ids
are stable under restriction, so a subset of a precubical set keeps the ids of
its parent and reduction traces stay comparable with the original model.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from collections import deque
from typing import Iterable, Iterator, Mapping, NamedTuple, Optional, Sequence

import networkx as nx

from ._logger import logger
from .errors import ArgumentError, PreconditionError

logger.debug(f"Loading module {__name__}.")

CubeId = int

__all__ = [
    "CubeId",
    "PrecubicalSet",
    "PrecubicalSubset",
    "Reachability",
    "ValidationReport",
    "Violation",
    "closure",
    "corner_edge",
    "cube",
    "cube_image",
    "final_vertex",
    "free_faces",
    "grid",
    "initial_vertex",
    "interval",
    "is_free_face",
    "is_regular",
    "is_weakly_regular",
    "point",
    "reachability",
    "remove_star",
    "renumber",
    "restrict_pcs",
    "skeleton",
    "star",
    "subset",
    "tensor",
    "validate_precubical",
    "vertex_digraph",
]


class PrecubicalSet:
    """
    Finite precubical set with integer cube ids.

    Args:
        dims: degree of every cube.
        faces: for every cube of degree n > 0, a sequence of n pairs
            ``(d^0_i x, d^1_i x)`` for i = 1..n.
        names: optional display names (e.g. global states of a program).
    """

    def __init__(
        self,
        dims: Mapping[int, int],
        faces: Optional[Mapping[int, Sequence[Sequence[int]]]] = None,
        names: Optional[Mapping[int, str]] = None,
    ):
        faces = faces or {}
        unknown = set(faces) - set(dims)
        if unknown:
            raise ArgumentError(
                f"faces given for undeclared cubes {sorted(unknown)}"
            )
        if any(n < 0 for n in dims.values()):
            raise ArgumentError("cube degrees must be non-negative")

        self._dims: dict[int, int] = {int(x): int(n) for x, n in dims.items()}
        self._faces: dict[int, tuple[tuple[int, int], ...]] = {
            x: tuple((int(a), int(b)) for a, b in faces.get(x, ()))
            for x in self._dims
        }
        self._names: dict[int, str] = {
            int(x): str(s)
            for x, s in (names or {}).items()
            if int(x) in self._dims
        }
        self._ids: tuple[int, ...] = tuple(sorted(self._dims))

    @classmethod
    def from_cubes(
        cls,
        dims: Sequence[int],
        faces: Mapping[int, Sequence[Sequence[int]]],
        names: Optional[Mapping[int, str]] = None,
    ) -> "PrecubicalSet":
        """
        Builder from cubes in insertion order: ``dims[j]`` is the degree of
        the j-th inserted cube, ``faces`` refers to insertion positions.
        Ids come out dense, ordered by degree then insertion.
        """
        order = sorted(range(len(dims)), key=lambda j: (dims[j], j))
        new_id = {j: x for x, j in enumerate(order)}
        try:
            return cls(
                {new_id[j]: dims[j] for j in order},
                {
                    new_id[j]: tuple(
                        (new_id[a], new_id[b]) for a, b in faces.get(j, ())
                    )
                    for j in order
                },
                {new_id[j]: s for j, s in (names or {}).items()},
            )
        except KeyError as e:
            raise ArgumentError(f"face refers to unknown cube {e}") from None

    # basic access

    @property
    def ids(self) -> tuple[int, ...]:
        return self._ids

    def __iter__(self) -> Iterator[int]:
        return iter(self._ids)

    def __len__(self) -> int:
        return len(self._ids)

    def __contains__(self, x: object) -> bool:
        return x in self._dims

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PrecubicalSet):
            return NotImplemented
        return (
            self._dims == other._dims
            and self._faces == other._faces
            and self._names == other._names
        )

    def __hash__(self) -> int:
        return hash(
            tuple((x, self._dims[x], self._faces[x]) for x in self._ids)
        )

    def __repr__(self) -> str:
        return f"PrecubicalSet(counts={self.counts()})"

    def degree(self, x: int) -> int:
        try:
            return self._dims[x]
        except KeyError:
            raise ArgumentError(f"unknown cube {x}") from None

    def face(self, x: int, k: int, i: int) -> int:
        """The face ``d^k_i x``."""
        n = self.degree(x)
        if k not in (0, 1):
            raise ArgumentError(f"face side must be 0 or 1, got {k}")
        if not 1 <= i <= n:
            raise ArgumentError(
                f"face index {i} out of range 1..{n} for cube {x}"
            )
        pairs = self._faces[x]
        if len(pairs) < i:
            raise ArgumentError(f"face d^{k}_{i} of cube {x} is not assigned")
        return pairs[i - 1][k]

    def faces_of(self, x: int) -> tuple[tuple[int, int], ...]:
        self.degree(x)
        return self._faces[x]

    def name(self, x: int) -> Optional[str]:
        return self._names.get(x)

    @property
    def names(self) -> dict[int, str]:
        return dict(self._names)

    def label_of(self, x: int) -> str:
        """Name of a cube if it has one, its id otherwise."""
        return self._names.get(x, str(x))

    def find(self, name: str) -> int:
        """Id of the cube carrying ``name``."""
        for x, s in self._names.items():
            if s == name:
                return x
        raise ArgumentError(f"no cube named {name!r}")

    @property
    def max_id(self) -> int:
        return self._ids[-1] if self._ids else -1

    @cached_property
    def _by_degree(self) -> dict[int, tuple[int, ...]]:
        grouped: dict[int, list[int]] = {}
        for x in self._ids:
            grouped.setdefault(self._dims[x], []).append(x)
        return {n: tuple(xs) for n, xs in grouped.items()}

    def cubes(self, n: int) -> tuple[int, ...]:
        """Cubes of degree n in id order."""
        return self._by_degree.get(n, ())

    @property
    def vertices(self) -> tuple[int, ...]:
        return self.cubes(0)

    @property
    def edges(self) -> tuple[int, ...]:
        return self.cubes(1)

    @property
    def squares(self) -> tuple[int, ...]:
        return self.cubes(2)

    @property
    def dimension(self) -> int:
        return max(self._dims.values(), default=-1)

    def counts(self) -> tuple[int, ...]:
        """Number of cubes per degree, degrees 0..dimension."""
        return tuple(len(self.cubes(n)) for n in range(self.dimension + 1))

    def source(self, e: int) -> int:
        return self.face(e, 0, 1)

    def target(self, e: int) -> int:
        return self.face(e, 1, 1)

    # incidence indexes

    @cached_property
    def _coface_index(self) -> dict[int, tuple[tuple[int, int, int], ...]]:
        index: dict[int, list[tuple[int, int, int]]] = {}
        for x in self._ids:
            for i, pair in enumerate(self._faces[x], start=1):
                for k, y in enumerate(pair):
                    index.setdefault(y, []).append((x, k, i))
        return {y: tuple(v) for y, v in index.items()}

    def cofaces(self, y: int) -> tuple[tuple[int, int, int], ...]:
        """All incidences ``(x, k, i)`` with ``d^k_i x == y``."""
        return self._coface_index.get(y, ())

    @cached_property
    def _edge_index(self) -> tuple[dict[int, tuple], dict[int, tuple]]:
        outs: dict[int, list[int]] = {v: [] for v in self.vertices}
        ins: dict[int, list[int]] = {v: [] for v in self.vertices}
        for e in self.edges:
            pair = self._faces[e]
            if not pair:
                continue
            outs.setdefault(pair[0][0], []).append(e)
            ins.setdefault(pair[0][1], []).append(e)
        return (
            {v: tuple(es) for v, es in outs.items()},
            {v: tuple(es) for v, es in ins.items()},
        )

    def out_edges(self, v: int) -> tuple[int, ...]:
        return self._edge_index[0].get(v, ())

    def in_edges(self, v: int) -> tuple[int, ...]:
        return self._edge_index[1].get(v, ())

    def restricted(self, members: Iterable[int]) -> "PrecubicalSet":
        """Induced precubical set on ``members`` (ids kept, no closure check)."""
        keep = set(members)
        return PrecubicalSet(
            {x: self._dims[x] for x in keep},
            {x: self._faces[x] for x in keep},
            {x: s for x, s in self._names.items() if x in keep},
        )


@dataclass(frozen=True)
class PrecubicalSubset:
    """A face-closed set of cubes of a parent precubical set."""

    parent: PrecubicalSet
    members: frozenset[int]

    def __contains__(self, x: object) -> bool:
        return x in self.members

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.members))

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(
            x for x in self.members if self.parent.degree(x) == 0
        )

    def cubes(self, n: int) -> tuple[int, ...]:
        return tuple(x for x in self.parent.cubes(n) if x in self.members)

    def as_pcs(self) -> PrecubicalSet:
        return self.parent.restricted(self.members)


class Violation(NamedTuple):
    identity: str
    cube: int
    indices: tuple


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[Violation, ...] = ()

    @classmethod
    def from_violations(cls, violations: Iterable[Violation]):
        violations = tuple(violations)
        return cls(ok=not violations, violations=violations)

    def __bool__(self) -> bool:
        return self.ok

    def merged(self, other: "ValidationReport") -> "ValidationReport":
        return ValidationReport.from_violations(
            self.violations + other.violations
        )


@dataclass(frozen=True)
class Reachability:
    """Vertex reachability ``v ->_P w`` with extremal vertex sets."""

    reach: Mapping[int, frozenset[int]]
    m0: frozenset[int]
    m1: frozenset[int]

    def reaches(self, v: int, w: int) -> bool:
        return w in self.reach.get(v, frozenset())

    def pairs(self) -> frozenset[tuple[int, int]]:
        return frozenset(
            (v, w) for v, ws in self.reach.items() for w in ws
        )

    def common_successors(self, sources: Iterable[int]) -> frozenset[int]:
        """Vertices reachable from every vertex of ``sources``."""
        result: Optional[frozenset[int]] = None
        for v in sources:
            result = self.reach[v] if result is None else result & self.reach[v]
        return result if result is not None else frozenset(self.reach)

    def common_predecessors(self, targets: Iterable[int]) -> frozenset[int]:
        """Vertices reaching every vertex of ``targets``."""
        targets = frozenset(targets)
        return frozenset(
            v for v, ws in self.reach.items() if targets <= ws
        )


# constructions


def point() -> PrecubicalSet:
    """The one-point precubical set."""
    return PrecubicalSet({0: 0}, names={0: "0"})


def interval(k: int, l: int) -> PrecubicalSet:
    """
    The precubical interval with vertices k..l and edges [j-1, j].

    Vertex ``k + j`` gets id j, edge ``[k + j - 1, k + j]`` gets id
    ``l - k + j``.
    """
    if k > l:
        raise ArgumentError(f"interval bounds out of order: {k} > {l}")
    nv = l - k + 1
    dims = {j: 0 for j in range(nv)}
    names = {j: str(k + j) for j in range(nv)}
    faces = {}
    for j in range(1, nv):
        e = nv + j - 1
        dims[e] = 1
        faces[e] = ((j - 1, j),)
        names[e] = f"[{k + j - 1},{k + j}]"
    return PrecubicalSet(dims, faces, names)


def tensor(P: PrecubicalSet, Q: PrecubicalSet) -> PrecubicalSet:
    """
    Tensor product: cubes are pairs (p, q) of degree deg p + deg q.

    The face ``d^k_i`` acts on p for i <= deg p and on q at ``i - deg p``
    otherwise. Ids are dense, ordered by degree and then by (p, q).
    """
    pairs = sorted(
        product(P.ids, Q.ids),
        key=lambda pq: (P.degree(pq[0]) + Q.degree(pq[1]), pq[0], pq[1]),
    )
    new_id = {pq: j for j, pq in enumerate(pairs)}

    dims, faces, names = {}, {}, {}
    for (p, q), x in new_id.items():
        dp, dq = P.degree(p), Q.degree(q)
        dims[x] = dp + dq
        fx = []
        for i in range(1, dp + 1):
            fx.append(tuple(new_id[(P.face(p, k, i), q)] for k in (0, 1)))
        for i in range(1, dq + 1):
            fx.append(tuple(new_id[(p, Q.face(q, k, i))] for k in (0, 1)))
        faces[x] = fx
        names[x] = f"({P.label_of(p)},{Q.label_of(q)})"
    return PrecubicalSet(dims, faces, names)


def cube(n: int) -> PrecubicalSet:
    """The standard n-cube ``[0,1]^{(x)n}``."""
    if n < 0:
        raise ArgumentError("cube degree must be non-negative")
    result = point()
    for j in range(n):
        result = interval(0, 1) if j == 0 else tensor(result, interval(0, 1))
    return result


def grid(m: int, n: int) -> PrecubicalSet:
    """Full m x n grid of squares, ``[0,m] (x) [0,n]``."""
    return tensor(interval(0, m), interval(0, n))


def restrict_pcs(P: PrecubicalSet, members: Iterable[int]) -> PrecubicalSet:
    """Induced precubical set on a face-closed set of cubes (ids kept)."""
    return subset(P, members).as_pcs()


def renumber(P: PrecubicalSet) -> tuple[PrecubicalSet, dict[int, int]]:
    """Dense ids ordered by (degree, old id); returns the old-to-new map."""
    order = sorted(P.ids, key=lambda x: (P.degree(x), x))
    new_id = {x: j for j, x in enumerate(order)}
    dims = {new_id[x]: P.degree(x) for x in order}
    faces = {
        new_id[x]: tuple(
            (new_id[a], new_id[b]) for a, b in P.faces_of(x)
        )
        for x in order
    }
    names = {new_id[x]: s for x, s in P.names.items()}
    return PrecubicalSet(dims, faces, names), new_id


def skeleton(P: PrecubicalSet, n: int) -> PrecubicalSet:
    """Cubes of degree at most n."""
    return P.restricted(x for x in P.ids if P.degree(x) <= n)


# validation


def validate_precubical(
    P: PrecubicalSet, max_degree: Optional[int] = None
) -> ValidationReport:
    """
    Check face totality, face degrees and the precubical identities.

    Never raises; every violation names the offending cube and indices,
    identities as ``(k, i, l, j)`` for ``d^k_i d^l_j = d^l_{j-1} d^k_i``.
    """
    violations: list[Violation] = []
    structurally_ok: set[int] = set()

    for x in P.ids:
        n = P.degree(x)
        pairs = P.faces_of(x)
        good = True
        if max_degree is not None and n > max_degree:
            violations.append(Violation("max-degree", x, (n, max_degree)))
        if len(pairs) != n:
            violations.append(Violation("face-count", x, (len(pairs), n)))
            good = False
        for i, pair in enumerate(pairs, start=1):
            for k, y in enumerate(pair):
                if y not in P:
                    violations.append(Violation("unknown-face", x, (k, i, y)))
                    good = False
                elif P.degree(y) != n - 1:
                    violations.append(Violation("face-degree", x, (k, i, y)))
                    good = False
        if good:
            structurally_ok.add(x)

    for x in P.ids:
        n = P.degree(x)
        if n < 2 or x not in structurally_ok:
            continue
        if not all(
            y in structurally_ok for pair in P.faces_of(x) for y in pair
        ):
            continue
        for i in range(1, n):
            for j in range(i + 1, n + 1):
                for k in (0, 1):
                    for l in (0, 1):
                        lhs = P.face(P.face(x, l, j), k, i)
                        rhs = P.face(P.face(x, k, i), l, j - 1)
                        if lhs != rhs:
                            violations.append(
                                Violation("cube-identity", x, (k, i, l, j))
                            )

    return ValidationReport.from_violations(violations)


# cube images, regularity


def _corner_map(P: PrecubicalSet, x: int) -> dict[tuple, int]:
    """Image of every formal face of ``[0,1]^{(x)n}`` under x's map.

    Keys are tuples over {0, 1, None}; None marks a free coordinate.
    """
    n = P.degree(x)
    image = {}
    for t in product((0, 1, None), repeat=n):
        y = x
        for j in range(n, 0, -1):
            if t[j - 1] is not None:
                y = P.face(y, t[j - 1], j)
        image[t] = y
    return image


def cube_image(P: PrecubicalSet, x: int) -> tuple[PrecubicalSubset, bool]:
    """
    The subset ``x_#([0,1]^{(x)n})`` and whether x is regular.

    x is regular exactly when all ``3^n`` formal faces have distinct images.
    """
    image = _corner_map(P, x)
    values = frozenset(image.values())
    return PrecubicalSubset(P, values), len(values) == len(image)


def is_regular(P: PrecubicalSet, x: int) -> bool:
    return cube_image(P, x)[1]


def is_weakly_regular(P: PrecubicalSet) -> tuple[bool, Optional[int]]:
    """
    Weak regularity, decided on 2-cubes: ``d^0_1 x != d^0_2 x`` and
    ``d^1_1 x != d^1_2 x`` for every square x. Returns a failing square.
    """
    for x in P.squares:
        if P.face(x, 0, 1) == P.face(x, 0, 2) or P.face(x, 1, 1) == P.face(
            x, 1, 2
        ):
            return False, x
    return True, None


def initial_vertex(P: PrecubicalSet, x: int) -> int:
    """``d^0_1 ... d^0_1 x``."""
    for _ in range(P.degree(x)):
        x = P.face(x, 0, 1)
    return x


def final_vertex(P: PrecubicalSet, x: int) -> int:
    """``d^1_1 ... d^1_1 x``."""
    for _ in range(P.degree(x)):
        x = P.face(x, 1, 1)
    return x


# stars and free faces


def star(P: PrecubicalSet, x: int) -> frozenset[int]:
    """All cubes having x among their iterated faces, x included."""
    P.degree(x)
    seen = {x}
    todo = deque([x])
    while todo:
        y = todo.popleft()
        for z, _, _ in P.cofaces(y):
            if z not in seen:
                seen.add(z)
                todo.append(z)
    return frozenset(seen)


def is_free_face(P: PrecubicalSet, x: int, k: int, i: int) -> bool:
    """
    Whether ``d^k_i x`` is free: its star is ``{x, d^k_i x}`` and it occurs
    only once as a face of x.
    """
    f = P.face(x, k, i)
    return len(P.cofaces(f)) == 1 and not P.cofaces(x)


def free_faces(P: PrecubicalSet) -> list[tuple[int, int, int]]:
    """All ``(x, k, i)`` with a free face ``d^k_i x``, sorted."""
    result = []
    for x in P.ids:
        if P.cofaces(x):
            continue
        for i in range(1, P.degree(x) + 1):
            for k in (0, 1):
                if len(P.cofaces(P.face(x, k, i))) == 1:
                    result.append((x, k, i))
    return sorted(result)


def corner_edge(P: PrecubicalSet, x: int, k: int, i: int) -> int:
    """
    The edge ``e^k_i x``: all faces ``d^{1-k}_j`` with j != i applied to x.

    For k = 0 it is the edge in direction i leading into the final vertex,
    for k = 1 the one leaving the initial vertex.
    """
    n = P.degree(x)
    if n < 1:
        raise ArgumentError(f"cube {x} has no edges")
    if k not in (0, 1):
        raise ArgumentError(f"face side must be 0 or 1, got {k}")
    if not 1 <= i <= n:
        raise ArgumentError(f"corner index {i} out of range 1..{n}")
    y = x
    for j in range(n, 0, -1):
        if j != i:
            y = P.face(y, 1 - k, j)
    return y


def remove_star(P: PrecubicalSet, x: int) -> PrecubicalSet:
    """The precubical subset ``P \\ star(x)`` as a new precubical set."""
    removed = star(P, x)
    return P.restricted(y for y in P.ids if y not in removed)


# subsets


def closure(P: PrecubicalSet, S: Iterable[int]) -> PrecubicalSubset:
    """Smallest precubical subset containing S."""
    seen: set[int] = set()
    todo = deque()
    for x in S:
        if x not in P:
            raise ArgumentError(f"unknown cube {x}")
        if x not in seen:
            seen.add(x)
            todo.append(x)
    while todo:
        y = todo.popleft()
        for pair in P.faces_of(y):
            for z in pair:
                if z not in seen:
                    seen.add(z)
                    todo.append(z)
    return PrecubicalSubset(P, frozenset(seen))


def subset(P: PrecubicalSet, members: Iterable[int]) -> PrecubicalSubset:
    """Wrap a face-closed set of cubes; raises if it is not closed."""
    members = frozenset(members)
    for x in members:
        if x not in P:
            raise ArgumentError(f"unknown cube {x}")
        for pair in P.faces_of(x):
            for y in pair:
                if y not in members:
                    raise PreconditionError(
                        f"cube set is not face-closed: {x} lacks face {y}"
                    )
    return PrecubicalSubset(P, members)


# reachability


def vertex_digraph(P: PrecubicalSet) -> nx.MultiDiGraph:
    """1-skeleton as a multigraph; edge keys are edge ids."""
    G = nx.MultiDiGraph()
    G.add_nodes_from(P.vertices)
    for e in P.edges:
        G.add_edge(P.source(e), P.target(e), key=e)
    return G


def reachability(P: PrecubicalSet) -> Reachability:
    """
    Reflexive-transitive closure of the edge relation, with m0 the vertices
    without outgoing edges and m1 those without incoming edges.
    """
    G = nx.DiGraph(vertex_digraph(P))
    reach = {}
    for component in nx.strongly_connected_components(G):
        witness = next(iter(component))
        closed = frozenset(nx.descendants(G, witness) | component)
        for v in component:
            reach[v] = closed
    m0 = frozenset(v for v in P.vertices if not P.out_edges(v))
    m1 = frozenset(v for v in P.vertices if not P.in_edges(v))
    return Reachability(reach, m0, m1)
