"""
Cubical homology and the homology graph.

The chain complex of a precubical set has the cubes of degree n as basis of
the n-chains and the boundary ``d x = sum_i (-1)^i (d^0_i x - d^1_i x)``.
Homology is read off the Smith normal form of the boundary matrices. Classes
are described by coordinates in a fixed basis (free part first, then torsion
coordinates taken modulo their order) together with a representative cycle.

A class ``a`` points to a class ``b`` when there are precubical subsets X and
Y with ``a`` in the image of ``H(X)``, ``b`` in the image of ``H(Y)`` and
every vertex of X reaching every vertex of Y. The search mode looks for such
certificates near the stored representatives; the bruteforce mode decides the
relation exactly on small models.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum, EnumMeta
from typing import Iterable, Mapping, Optional, Sequence, Union
import time

import numpy as np
import pandas as pd
import sympy
from tqdm import tqdm

from ._logger import logger
from .config import Settings, get_settings
from .errors import ArgumentError, PreconditionError, ResourceError
from .precubical import (
    PrecubicalSet,
    PrecubicalSubset,
    closure,
    reachability,
    subset,
)
from .smith import rank_mod_p, smith_normal_form

logger.debug(f"Loading module {__name__}.")

Chain = dict[int, int]

__all__ = [
    "ChainPairing",
    "Coefficients",
    "EdgeStatus",
    "GraphMode",
    "HomologyBasis",
    "HomologyClassRef",
    "HomologyGraph",
    "HomologyProfile",
    "ImageSpace",
    "IntMatrix",
    "PointingCertificate",
    "Ring",
    "chain_boundary",
    "euler_characteristic",
    "homology",
    "homology_basis",
    "homology_graph",
    "homology_iso_as_graphs",
    "induced_image",
    "parse_ring",
    "points_to",
    "profile_frame",
    "verify_pointing",
]


class HomologyEnumMeta(EnumMeta):
    def __contains__(cls, item):
        return item in cls.__members__.keys()


class Ring(Enum, metaclass=HomologyEnumMeta):
    INTEGERS = "z"
    RATIONALS = "q"
    PRIME_FIELD = "p"

    @classmethod
    def _missing_(cls, value: str):
        value = value.lower()
        for member in cls.__members__.values():
            if member.value.lower() == value:
                return member
        return None


class EdgeStatus(Enum, metaclass=HomologyEnumMeta):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"

    @classmethod
    def _missing_(cls, value: str):
        value = value.lower()
        for member in cls.__members__.values():
            if member.value.lower() == value:
                return member
        return None


class GraphMode(Enum, metaclass=HomologyEnumMeta):
    SEARCH = "search"
    BRUTEFORCE = "bruteforce"
    AUTO = "auto"

    @classmethod
    def _missing_(cls, value: str):
        value = value.lower()
        for member in cls.__members__.values():
            if member.value.lower() == value:
                return member
        return None


@dataclass(frozen=True)
class Coefficients:
    ring: Ring
    p: Optional[int] = None

    def __str__(self) -> str:
        return f"p{self.p}" if self.ring is Ring.PRIME_FIELD else self.ring.value

    @property
    def is_field(self) -> bool:
        return self.ring is not Ring.INTEGERS


def parse_ring(ring: Union[str, Ring, Coefficients, None]) -> Coefficients:
    """
    Accepts ``z``/``integers``, ``q``/``rationals`` and ``p<prime>`` or
    ``f<prime>`` for prime fields.
    """
    if ring is None:
        return Coefficients(Ring.INTEGERS)
    if isinstance(ring, Coefficients):
        return ring
    if isinstance(ring, Ring):
        if ring is Ring.PRIME_FIELD:
            raise ArgumentError("a prime field needs its characteristic")
        return Coefficients(ring)

    text = ring.strip().lower()
    aliases = {"integers": "z", "zz": "z", "rationals": "q", "qq": "q"}
    text = aliases.get(text, text)
    if text in ("z", "q"):
        return Coefficients(Ring(text))
    if text[:1] in ("p", "f"):
        digits = text[1:].lstrip("_:")
        if digits.isdigit() and sympy.isprime(int(digits)):
            return Coefficients(Ring.PRIME_FIELD, int(digits))
    raise ArgumentError(f"unknown coefficient ring {ring!r}")


# chain complex


@dataclass(frozen=True)
class IntMatrix:
    """Dense integer matrix whose rows and columns are labelled by cube ids."""

    rows: tuple[int, ...]
    cols: tuple[int, ...]
    data: np.ndarray = field(compare=False)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.cols))

    def column(self, x: int) -> Chain:
        j = self.cols.index(x)
        return {
            self.rows[i]: int(c) for i, c in enumerate(self.data[:, j]) if c
        }

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            self.data.astype(np.int64), index=self.rows, columns=self.cols
        )


def _zeros(m: int, n: int) -> np.ndarray:
    return np.zeros((m, n), dtype=object)


def boundary_chain(P: PrecubicalSet, x: int) -> Chain:
    """Boundary of a single cube of degree at least 1."""
    chain: Chain = {}
    for i, (lo, hi) in enumerate(P.faces_of(x), start=1):
        sign = -1 if i % 2 else 1
        chain[lo] = chain.get(lo, 0) + sign
        chain[hi] = chain.get(hi, 0) - sign
    return {y: c for y, c in chain.items() if c}


def chain_boundary(P: PrecubicalSet, n: int) -> IntMatrix:
    """
    Matrix of the boundary map from n-chains to (n-1)-chains.

    Args:
        P: precubical set.
        n: degree, at least 1.
    """
    if n < 1:
        raise ArgumentError(f"boundary degree must be at least 1, got {n}")
    rows, cols = P.cubes(n - 1), P.cubes(n)
    index = {y: i for i, y in enumerate(rows)}
    data = _zeros(len(rows), len(cols))
    for j, x in enumerate(cols):
        for y, c in boundary_chain(P, x).items():
            data[index[y], j] += c
    return IntMatrix(rows, cols, data)


def _boundary_data(P: PrecubicalSet, n: int) -> np.ndarray:
    if n < 1:
        return _zeros(0, len(P.cubes(0)))
    return chain_boundary(P, n).data


def euler_characteristic(P: PrecubicalSet) -> int:
    return sum((-1) ** n * c for n, c in enumerate(P.counts()))


# homology groups


@dataclass(frozen=True)
class HomologyProfile:
    """Betti numbers and torsion coefficients per degree."""

    ring: Coefficients
    betti: tuple[int, ...]
    torsion: tuple[tuple[int, ...], ...]

    def __str__(self) -> str:
        parts = []
        for n, b in enumerate(self.betti):
            part = f"H{n}: rank {b}"
            if self.torsion[n]:
                part += " torsion " + ",".join(str(d) for d in self.torsion[n])
            parts.append(part)
        return "; ".join(parts)

    def same_groups(self, other: "HomologyProfile") -> bool:
        """Equal groups in every degree, trailing zero groups ignored."""

        def trimmed(profile):
            pairs = list(zip(profile.betti, profile.torsion))
            while pairs and pairs[-1] == (0, ()):
                pairs.pop()
            return pairs

        return self.ring == other.ring and trimmed(self) == trimmed(other)


def homology(
    P: PrecubicalSet, ring: Union[str, Ring, Coefficients, None] = "z"
) -> HomologyProfile:
    """
    Homology of a precubical set.

    Args:
        P: precubical set.
        ring: coefficients, see :func:`parse_ring`.
    """
    coeffs = parse_ring(ring)
    top = P.dimension
    diagonals = [smith_normal_form(_boundary_data(P, n)).diagonal
                 for n in range(top + 2)]

    def rank(n: int) -> int:
        if coeffs.ring is Ring.PRIME_FIELD:
            return rank_mod_p(diagonals[n], coeffs.p)
        return len(diagonals[n])

    betti, torsion = [], []
    for n in range(top + 1):
        betti.append(len(P.cubes(n)) - rank(n) - rank(n + 1))
        if coeffs.ring is Ring.INTEGERS:
            torsion.append(tuple(d for d in diagonals[n + 1] if d > 1))
        else:
            torsion.append(())
    return HomologyProfile(coeffs, tuple(betti), tuple(torsion))


def profile_frame(profile: HomologyProfile) -> pd.DataFrame:
    return pd.DataFrame.from_records(
        [
            {
                "degree": n,
                "betti": b,
                "torsion": " ".join(str(d) for d in profile.torsion[n]),
                "ring": str(profile.ring),
            }
            for n, b in enumerate(profile.betti)
        ],
        columns=["degree", "betti", "torsion", "ring"],
    )


# bases and classes


@dataclass(frozen=True)
class HomologyClassRef:
    """
    A homology class: degree, coordinates in the basis of its complex and a
    representative cycle as sorted ``(cube, coefficient)`` pairs. ``index``
    is the position in the basis for basis elements, None otherwise.
    """

    degree: int
    coordinates: tuple[int, ...]
    representative: tuple[tuple[int, int], ...]
    index: Optional[int] = None
    order: int = 0

    @property
    def key(self) -> str:
        return f"{self.degree}:{self.index}"

    @property
    def chain(self) -> Chain:
        return dict(self.representative)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(x for x, _ in self.representative)

    @property
    def is_zero(self) -> bool:
        return not any(self.coordinates)


def _normalized(chain: Mapping[int, int]) -> tuple[tuple[int, int], ...]:
    return tuple(sorted((int(x), int(c)) for x, c in chain.items() if c))


def _oriented(chain: Chain) -> tuple[Chain, int]:
    """Flip the sign so that the smallest cube has a positive coefficient."""
    items = _normalized(chain)
    if items and items[0][1] < 0:
        return {x: -c for x, c in items}, -1
    return dict(items), 1


class _DegreeBasis:
    """Smith data and the chosen generators of one homology group."""

    def __init__(self, P: PrecubicalSet, n: int):
        self.n = n
        self.cubes = P.cubes(n)
        self.index = {x: j for j, x in enumerate(self.cubes)}
        c = len(self.cubes)

        kernel = smith_normal_form(_boundary_data(P, n), shape=None)
        self.r = kernel.rank
        self.V = kernel.V
        self.V_inv = kernel.V_inv

        upper = (
            chain_boundary(P, n + 1).data
            if P.cubes(n + 1)
            else _zeros(c, 0)
        )
        A = np.dot(self.V_inv, upper)[self.r:, :] if c else _zeros(0, 0)
        if A.shape[0] == 0:
            A = _zeros(0, upper.shape[1])
        quotient = smith_normal_form(A)
        self.U2 = quotient.U
        self.U2_inv = quotient.U_inv
        q = len(quotient.diagonal)
        self.free_slots = list(range(q, c - self.r))
        self.torsion_slots = [
            j for j, d in enumerate(quotient.diagonal) if d > 1
        ]
        self.orders = [quotient.diagonal[j] for j in self.torsion_slots]

        # change of basis on the free part, identity until chosen
        b = len(self.free_slots)
        self.M_inv = sympy.eye(b)
        self.T = sympy.zeros(len(self.orders), b)
        self.free_chains: list[Chain] = [
            self.slot_chain(j) for j in self.free_slots
        ]
        self.torsion_chains: list[Chain] = [
            _oriented(self.slot_chain(j))[0] for j in self.torsion_slots
        ]

    @property
    def betti(self) -> int:
        return len(self.free_slots)

    def vector(self, chain: Mapping[int, int]) -> np.ndarray:
        z = _zeros(len(self.cubes), 1)
        for x, coeff in chain.items():
            try:
                z[self.index[x], 0] += int(coeff)
            except KeyError:
                raise ArgumentError(
                    f"cube {x} is not a {self.n}-cube of the complex"
                ) from None
        return z

    def slot_chain(self, j: int) -> Chain:
        K = self.V[:, self.r:]
        column = np.dot(K, self.U2_inv[:, j : j + 1])
        return {
            self.cubes[i]: int(column[i, 0])
            for i in range(len(self.cubes))
            if column[i, 0]
        }

    def raw(self, chain: Mapping[int, int]) -> tuple[list[int], list[int]]:
        """Free and torsion coordinates with respect to the Smith generators."""
        if not self.cubes:
            return [], []
        w = np.dot(self.V_inv, self.vector(chain))
        if any(w[i, 0] for i in range(self.r)):
            raise ArgumentError(f"chain is not a {self.n}-cycle")
        y = np.dot(self.U2, w[self.r:, :])
        free = [int(y[j, 0]) for j in self.free_slots]
        torsion = [
            int(y[j, 0]) % d for j, d in zip(self.torsion_slots, self.orders)
        ]
        return free, torsion

    def choose(self, candidates: Iterable[Chain]) -> bool:
        """
        Greedily pick candidate cycles that extend the rational span of the
        free part; keep them when they form a basis over the integers.
        """
        b = self.betti
        if b == 0:
            return True
        chosen: list[Chain] = []
        columns: list[list[int]] = []
        rank = 0
        for chain in candidates:
            oriented, _ = _oriented(chain)
            free, _ = self.raw(oriented)
            if not any(free):
                continue
            trial = sympy.Matrix(columns + [free]).T
            if trial.rank() > rank:
                chosen.append(oriented)
                columns.append(free)
                rank += 1
                if rank == b:
                    break
        if rank < b:
            return False
        M = sympy.Matrix(columns).T
        if M.det() not in (1, -1):
            return False
        self.M_inv = M.inv()
        self.free_chains = chosen
        T = [self.raw(chain)[1] for chain in chosen]
        self.T = sympy.Matrix(T).T if self.orders else sympy.zeros(0, b)
        return True

    def fallback(self) -> None:
        b = self.betti
        chains, columns = [], []
        for j in self.free_slots:
            oriented, sign = _oriented(self.slot_chain(j))
            chains.append(oriented)
            column = [0] * b
            column[len(columns)] = sign
            columns.append(column)
        M = sympy.Matrix(columns).T if b else sympy.eye(0)
        self.M_inv = M.inv() if b else sympy.eye(0)
        self.free_chains = chains
        self.T = sympy.zeros(len(self.orders), b)

    def coordinates(self, chain: Mapping[int, int]) -> tuple[int, ...]:
        free, torsion = self.raw(chain)
        b = self.betti
        a = self.M_inv * sympy.Matrix(b, 1, free) if b else sympy.zeros(0, 1)
        coords = [int(v) for v in a]
        if self.orders:
            shift = self.T * a if b else sympy.zeros(len(self.orders), 1)
            coords += [
                (t - int(s)) % d
                for t, s, d in zip(torsion, shift, self.orders)
            ]
        return tuple(coords)


def _components(P: PrecubicalSet) -> list[list[int]]:
    seen: set[int] = set()
    result = []
    for v in P.vertices:
        if v in seen:
            continue
        seen.add(v)
        comp, todo = [v], deque([v])
        while todo:
            u = todo.popleft()
            for e in P.out_edges(u) + P.in_edges(u):
                for w in (P.source(e), P.target(e)):
                    if w not in seen:
                        seen.add(w)
                        comp.append(w)
                        todo.append(w)
        result.append(sorted(comp))
    return sorted(result)


def _short_cycles(P: PrecubicalSet) -> list[Chain]:
    """
    Fundamental cycles of breadth-first spanning trees rooted at every
    vertex, shortest first.
    """
    candidates: dict[tuple, Chain] = {}
    for root in P.vertices:
        parent: dict[int, Optional[tuple[int, int, int]]] = {root: None}
        tree_edges: set[int] = set()
        todo = deque([root])
        while todo:
            u = todo.popleft()
            steps = [(e, P.target(e), 1) for e in P.out_edges(u)] + [
                (e, P.source(e), -1) for e in P.in_edges(u)
            ]
            for e, w, sign in steps:
                if w not in parent:
                    parent[w] = (u, e, sign)
                    tree_edges.add(e)
                    todo.append(w)

        def path_to(v: int) -> Chain:
            chain: Chain = {}
            while parent[v] is not None:
                u, e, sign = parent[v]
                chain[e] = chain.get(e, 0) + sign
                v = u
            return chain

        for e in P.edges:
            if e in tree_edges or P.source(e) not in parent:
                continue
            cycle = path_to(P.source(e))
            cycle[e] = cycle.get(e, 0) + 1
            for f, c in path_to(P.target(e)).items():
                cycle[f] = cycle.get(f, 0) - c
            items = _normalized(cycle)
            if items:
                oriented = _oriented(dict(items))[0]
                candidates.setdefault(_normalized(oriented), oriented)

    return [
        candidates[key]
        for key in sorted(
            candidates, key=lambda k: (sum(abs(c) for _, c in k), k)
        )
    ]


class HomologyBasis:
    """
    Chosen basis of ``H_n`` for every degree, over the integers or the
    rationals.

    Degree 0 uses the least vertex of every component; degree 1 prefers short
    cycles when they form a basis, higher degrees use the Smith generators.
    Representatives are oriented so the smallest cube has a positive
    coefficient.
    """

    def __init__(
        self,
        P: PrecubicalSet,
        ring: Union[str, Ring, Coefficients, None] = "z",
    ):
        self.P = P
        self.ring = parse_ring(ring)
        if self.ring.ring is Ring.PRIME_FIELD:
            raise ArgumentError(
                "homology bases are computed over the integers or rationals"
            )
        self._degrees = [_DegreeBasis(P, n) for n in range(P.dimension + 1)]
        for data in self._degrees:
            if data.n == 0:
                chosen = data.choose(
                    {comp[0]: 1} for comp in _components(P)
                )
            elif data.n == 1:
                chosen = data.choose(_short_cycles(P))
            else:
                chosen = False
            if not chosen:
                if data.n <= 1:
                    logger.debug(
                        f"Short generators of H{data.n} are not a basis, "
                        "using Smith generators."
                    )
                data.fallback()

    @property
    def dimension(self) -> int:
        return len(self._degrees) - 1

    def _data(self, n: int) -> Optional[_DegreeBasis]:
        if 0 <= n < len(self._degrees):
            return self._degrees[n]
        return None

    def rank(self, n: int) -> int:
        data = self._data(n)
        return data.betti if data else 0

    def orders(self, n: int) -> tuple[int, ...]:
        data = self._data(n)
        if data is None or self.ring.ring is Ring.RATIONALS:
            return ()
        return tuple(data.orders)

    def coordinates(self, n: int, chain: Mapping[int, int]) -> tuple[int, ...]:
        data = self._data(n)
        if data is None:
            if any(chain.values()):
                raise ArgumentError(f"the complex has no {n}-cubes")
            return ()
        coords = data.coordinates(chain)
        if self.ring.ring is Ring.RATIONALS:
            coords = coords[: data.betti]
        return coords

    def class_of(self, n: int, chain: Mapping[int, int]) -> HomologyClassRef:
        return HomologyClassRef(
            degree=n,
            coordinates=self.coordinates(n, chain),
            representative=_normalized(chain),
        )

    def classes(self, n: int) -> tuple[HomologyClassRef, ...]:
        data = self._data(n)
        if data is None:
            return ()
        size = data.betti + len(self.orders(n))
        result = []
        for j, chain in enumerate(data.free_chains):
            unit = [0] * size
            unit[j] = 1
            result.append(
                HomologyClassRef(n, tuple(unit), _normalized(chain), j, 0)
            )
        for t, d in enumerate(self.orders(n)):
            unit = [0] * size
            unit[data.betti + t] = 1
            result.append(
                HomologyClassRef(
                    n,
                    tuple(unit),
                    _normalized(data.torsion_chains[t]),
                    data.betti + t,
                    d,
                )
            )
        return tuple(result)

    @property
    def generators(self) -> tuple[HomologyClassRef, ...]:
        return tuple(
            c for n in range(self.dimension + 1) for c in self.classes(n)
        )

    def find(self, key: str) -> HomologyClassRef:
        for c in self.generators:
            if c.key == key:
                return c
        raise ArgumentError(f"no basis class {key!r}")


def homology_basis(
    P: PrecubicalSet, ring: Union[str, Ring, Coefficients, None] = "z"
) -> HomologyBasis:
    return HomologyBasis(P, ring)


# images of subcomplexes


@dataclass(frozen=True)
class ImageSpace:
    """
    Subgroup (or subspace over the rationals) of ``H_n`` spanned by
    ``vectors``; ``orders`` are the torsion orders of the trailing
    coordinates.
    """

    degree: int
    ring: Coefficients
    vectors: tuple[tuple[int, ...], ...]
    size: int
    orders: tuple[int, ...] = ()

    @property
    def rank(self) -> int:
        free = self.size - len(self.orders)
        if not self.vectors or free == 0:
            return 0
        return sympy.Matrix([v[:free] for v in self.vectors]).rank()

    def contains(
        self, target: Union[HomologyClassRef, Sequence[int]]
    ) -> bool:
        coords = (
            target.coordinates
            if isinstance(target, HomologyClassRef)
            else tuple(target)
        )
        if len(coords) != self.size:
            raise ArgumentError(
                f"expected {self.size} coordinates, got {len(coords)}"
            )
        if not any(coords):
            return True
        if self.ring.ring is Ring.RATIONALS:
            if not self.vectors:
                return False
            G = sympy.Matrix(self.vectors).T
            return G.rank() == G.row_join(sympy.Matrix(coords)).rank()

        free = self.size - len(self.orders)
        columns = [list(v) for v in self.vectors]
        for t, d in enumerate(self.orders):
            relation = [0] * self.size
            relation[free + t] = d
            columns.append(relation)
        if not columns:
            return False
        G = np.array(columns, dtype=object).T
        snf = smith_normal_form(G)
        y = np.dot(snf.U, np.array([[c] for c in coords], dtype=object))
        for j in range(self.size):
            value = int(y[j, 0])
            if j < snf.rank:
                if value % snf.diagonal[j]:
                    return False
            elif value:
                return False
        return True


def _cycle_generators(P: PrecubicalSet, n: int) -> list[Chain]:
    """Generators of the n-cycles of P."""
    cubes = P.cubes(n)
    if not cubes:
        return []
    snf = smith_normal_form(_boundary_data(P, n))
    result = []
    for j in range(snf.rank, len(cubes)):
        chain = {
            cubes[i]: int(snf.V[i, j])
            for i in range(len(cubes))
            if snf.V[i, j]
        }
        result.append(chain)
    return result


def _members(P: PrecubicalSet, X) -> frozenset[int]:
    if isinstance(X, PrecubicalSubset):
        return X.members
    if isinstance(X, PrecubicalSet):
        return frozenset(X.ids)
    return frozenset(X)


def induced_image(
    P: PrecubicalSet,
    X: Union[PrecubicalSubset, Iterable[int]],
    n: int,
    ring: Union[str, Ring, Coefficients, None] = "z",
    basis: Optional[HomologyBasis] = None,
) -> ImageSpace:
    """
    Image of ``H_n(X)`` in ``H_n(P)`` under the inclusion, as a span of
    coordinate vectors in the basis of P.

    Args:
        P: precubical set.
        X: precubical subset (face-closed set of cube ids).
        n: degree.
        ring: coefficients, integers or rationals.
        basis: precomputed basis of P, reused when given.
    """
    if basis is None:
        basis = HomologyBasis(P, ring)
    members = subset(P, _members(P, X)).members
    return _image(basis, P.restricted(members), n)


def _image(basis: HomologyBasis, Xp: PrecubicalSet, n: int) -> ImageSpace:
    orders = basis.orders(n)
    size = basis.rank(n) + len(orders)
    vectors = []
    for chain in _cycle_generators(Xp, n):
        coords = basis.coordinates(n, chain)
        if any(coords):
            vectors.append(coords)
    return ImageSpace(n, basis.ring, tuple(vectors), size, orders)


# pointing


@dataclass(frozen=True)
class PointingCertificate:
    X: PrecubicalSubset
    Y: PrecubicalSubset

    def to_text(self) -> str:
        return (
            "X " + " ".join(map(str, sorted(self.X.members)))
            + " | Y " + " ".join(map(str, sorted(self.Y.members)))
        )


def verify_pointing(
    P: PrecubicalSet,
    alpha: HomologyClassRef,
    beta: HomologyClassRef,
    cert: PointingCertificate,
    basis: Optional[HomologyBasis] = None,
) -> bool:
    """
    Whether the certificate shows that ``alpha`` points to ``beta``: both
    classes lie in the images of X and Y, and every vertex of X reaches
    every vertex of Y.
    """
    X = subset(P, cert.X.members)
    Y = subset(P, cert.Y.members)
    if basis is None:
        basis = HomologyBasis(P)
    reach = reachability(P)
    targets = Y.vertices
    for v in X.vertices:
        if not targets <= reach.reach[v]:
            return False
    return _image(basis, X.as_pcs(), alpha.degree).contains(
        alpha
    ) and _image(basis, Y.as_pcs(), beta.degree).contains(beta)


def _cube_vertices(P: PrecubicalSet) -> dict[int, frozenset[int]]:
    verts: dict[int, frozenset[int]] = {}
    for n in range(P.dimension + 1):
        for x in P.cubes(n):
            if n == 0:
                verts[x] = frozenset((x,))
            else:
                lo, hi = P.faces_of(x)[0]
                verts[x] = verts[lo] | verts[hi]
    return verts


class _Search:
    """Certificates built from perturbed representatives."""

    def __init__(self, P: PrecubicalSet, basis: HomologyBasis, depth: int,
                 max_candidates: int = 256):
        self.P = P
        self.basis = basis
        self.depth = depth
        self.max_candidates = max_candidates
        self.reach = reachability(P)
        self.full = PrecubicalSubset(P, frozenset(P.ids))
        self._cache: dict[HomologyClassRef, list[PrecubicalSubset]] = {}

    def _perturbed(self, alpha: HomologyClassRef) -> list[Chain]:
        P = self.P
        n = alpha.degree
        start = _normalized(alpha.chain)
        seen = {start}
        level = [start]
        for _ in range(self.depth):
            nxt = []
            for items in level:
                support = {x for x, _ in items}
                adjacent = sorted(
                    {
                        y
                        for x in support
                        for y, _, _ in P.cofaces(x)
                        if P.degree(y) == n + 1
                    }
                )
                for y in adjacent:
                    d = boundary_chain(P, y)
                    for sign in (1, -1):
                        chain = dict(items)
                        for x, c in d.items():
                            chain[x] = chain.get(x, 0) + sign * c
                        key = _normalized(chain)
                        if key and key not in seen:
                            seen.add(key)
                            nxt.append(key)
                if len(seen) >= self.max_candidates:
                    break
            level = nxt
        return [dict(k) for k in sorted(seen, key=lambda k: (len(k), k))]

    def candidates(self, alpha: HomologyClassRef) -> list[PrecubicalSubset]:
        if alpha in self._cache:
            return self._cache[alpha]
        P = self.P
        result = []
        if alpha.degree == 0:
            for x, _ in alpha.representative:
                for comp in _components(P):
                    if x in comp:
                        result += [closure(P, [v]) for v in comp]
        else:
            for chain in self._perturbed(alpha):
                result.append(closure(P, chain))
        result.append(self.full)
        unique = {}
        for X in result:
            unique.setdefault(X.members, X)
        self._cache[alpha] = list(unique.values())
        return self._cache[alpha]

    def decide(
        self, alpha: HomologyClassRef, beta: HomologyClassRef
    ) -> tuple[EdgeStatus, Optional[PointingCertificate]]:
        for X in self.candidates(alpha):
            after = self.reach.common_successors(X.vertices)
            for Y in self.candidates(beta):
                if Y.vertices and Y.vertices <= after:
                    cert = PointingCertificate(X, Y)
                    if verify_pointing(self.P, alpha, beta, cert, self.basis):
                        return EdgeStatus.YES, cert
        return EdgeStatus.UNKNOWN, None


class _Oracle:
    """
    Exact decision of the pointing relation.

    A certificate (X, Y) can always be enlarged to the full subcomplexes on
    ``S = Pred(T)`` and ``T = Succ(X_0)``; T ranges over intersections of
    vertex successor sets.
    """

    def __init__(self, P: PrecubicalSet, basis: HomologyBasis,
                 settings: Settings, pairs: int = 1):
        cells = len(P)
        if cells > settings.oracle_bound:
            raise ResourceError(
                f"bruteforce oracle limited to {settings.oracle_bound} cells, "
                f"model has {cells}",
                budget="oracle_bound",
                limit=settings.oracle_bound,
            )
        self.P = P
        self.basis = basis
        self.reach = reachability(P)
        self.verts = _cube_vertices(P)

        generators = {self.reach.reach[v] for v in P.vertices}
        family = set(generators)
        frontier = list(generators)
        while frontier:
            fresh = []
            for T in frontier:
                for G in generators:
                    meet = T & G
                    if meet and meet not in family:
                        family.add(meet)
                        fresh.append(meet)
            if len(family) * pairs > settings.oracle_pairs:
                raise ResourceError(
                    f"bruteforce oracle limited to {settings.oracle_pairs} "
                    "subset pairs",
                    budget="oracle_pairs",
                    limit=settings.oracle_pairs,
                )
            frontier = fresh
        self.family = sorted(family, key=lambda T: (len(T), sorted(T)))
        self._images: dict[tuple[frozenset, int], ImageSpace] = {}

    def full_subcomplex(self, S: frozenset[int]) -> PrecubicalSubset:
        return PrecubicalSubset(
            self.P, frozenset(x for x, vs in self.verts.items() if vs <= S)
        )

    def image(self, S: frozenset[int], n: int) -> ImageSpace:
        key = (S, n)
        if key not in self._images:
            X = self.full_subcomplex(S)
            self._images[key] = _image(self.basis, X.as_pcs(), n)
        return self._images[key]

    def decide(
        self, alpha: HomologyClassRef, beta: HomologyClassRef
    ) -> tuple[EdgeStatus, Optional[PointingCertificate]]:
        for T in self.family:
            S = self.reach.common_predecessors(T)
            if not S:
                continue
            if self.image(S, alpha.degree).contains(alpha) and self.image(
                T, beta.degree
            ).contains(beta):
                return EdgeStatus.YES, PointingCertificate(
                    self.full_subcomplex(S), self.full_subcomplex(T)
                )
        return EdgeStatus.NO, None


def points_to(
    P: PrecubicalSet,
    alpha: HomologyClassRef,
    beta: HomologyClassRef,
    mode: Union[str, GraphMode] = "search",
    basis: Optional[HomologyBasis] = None,
    settings: Optional[Settings] = None,
) -> tuple[EdgeStatus, Optional[PointingCertificate]]:
    """Decide one pair of classes; search mode never answers ``no``."""
    settings = settings or get_settings()
    basis = basis or HomologyBasis(P)
    engine = _engine(P, basis, _resolve_mode(P, mode, settings), settings, 1)
    return engine.decide(alpha, beta)


def _resolve_mode(
    P: PrecubicalSet, mode: Union[str, GraphMode], settings: Settings
) -> GraphMode:
    mode = GraphMode(mode) if not isinstance(mode, GraphMode) else mode
    if mode is GraphMode.AUTO:
        return (
            GraphMode.BRUTEFORCE
            if len(P) <= settings.oracle_bound
            else GraphMode.SEARCH
        )
    return mode


def _engine(P, basis, mode: GraphMode, settings: Settings, pairs: int):
    if mode is GraphMode.BRUTEFORCE:
        return _Oracle(P, basis, settings, pairs)
    return _Search(P, basis, settings.search_depth)


@dataclass
class HomologyGraph:
    """Pointing relation on the basis classes of all degrees."""

    mode: GraphMode
    ring: Coefficients
    nodes: tuple[HomologyClassRef, ...]
    edges: dict[tuple[str, str], tuple[EdgeStatus, Optional[PointingCertificate]]]

    def status(self, a: str, b: str) -> EdgeStatus:
        return self.edges[(a, b)][0]

    def certificate(self, a: str, b: str) -> Optional[PointingCertificate]:
        return self.edges[(a, b)][1]

    def with_status(self, status: EdgeStatus) -> list[tuple[str, str]]:
        return sorted(k for k, (s, _) in self.edges.items() if s is status)

    @property
    def yes_edges(self) -> list[tuple[str, str]]:
        return self.with_status(EdgeStatus.YES)

    def lines(self) -> list[str]:
        source = "oracle" if self.mode is GraphMode.BRUTEFORCE else "cert"
        out = [f"point {a} -> {b} {source}" for a, b in self.yes_edges]
        for status in (EdgeStatus.UNKNOWN, EdgeStatus.NO):
            pairs = self.with_status(status)
            if pairs:
                out.append(
                    f"{status.value} {len(pairs)}: "
                    + " ".join(f"{a}->{b}" for a, b in pairs)
                )
            else:
                out.append(f"{status.value} 0")
        return out

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame.from_records(
            [
                {"source": a, "target": b, "status": s.value}
                for (a, b), (s, _) in sorted(self.edges.items())
            ],
            columns=["source", "target", "status"],
        )


def homology_graph(
    P: PrecubicalSet,
    mode: Union[str, GraphMode] = "search",
    ring: Union[str, Ring, Coefficients, None] = "z",
    settings: Optional[Settings] = None,
    basis: Optional[HomologyBasis] = None,
) -> HomologyGraph:
    """
    Homology graph of P.

    Args:
        P: precubical set.
        mode: ``search`` (sound, may leave pairs unknown), ``bruteforce``
            (exact, bounded by ``oracle_bound`` cells) or ``auto``.
        ring: integers or rationals.
        settings: budgets; the global settings when None.
        basis: precomputed basis of P.
    """
    settings = settings or get_settings()
    basis = basis or HomologyBasis(P, ring)
    mode = _resolve_mode(P, mode, settings)
    nodes = basis.generators
    t0 = time.time()
    engine = _engine(P, basis, mode, settings, max(1, len(nodes) ** 2))

    edges = {}
    pairs = [(a, b) for a in nodes for b in nodes]
    for a, b in tqdm(
        pairs, desc="homology graph", disable=not settings.progress
    ):
        edges[(a.key, b.key)] = engine.decide(a, b)
    t1 = time.time()
    logger.info(
        f"Homology graph ({mode.value}) on {len(nodes)} classes "
        f"in {round((t1 - t0) / 60, 2)} mins"
    )
    return HomologyGraph(mode, basis.ring, nodes, edges)


# comparison


@dataclass(frozen=True)
class ChainPairing:
    """
    Chain map from a smaller complex into a larger one: cubes keep their ids
    except merged edges, which expand to the sum of the edges they replace.
    """

    expansion: Mapping[int, tuple[int, ...]] = field(default_factory=dict)

    def __call__(self, chain: Mapping[int, int]) -> Chain:
        out: Chain = {}
        for x, c in chain.items():
            for y in self.expansion.get(x, (x,)):
                out[y] = out.get(y, 0) + c
        return {y: c for y, c in out.items() if c}


Pairing = Union[str, Mapping[str, str], ChainPairing]


def _paired_classes(
    P: PrecubicalSet,
    basis_p: HomologyBasis,
    basis_q: HomologyBasis,
    pairing: Pairing,
) -> dict[str, HomologyClassRef]:
    nodes_p = {c.key: c for c in basis_p.generators}
    nodes_q = basis_q.generators

    if isinstance(pairing, Mapping) and not isinstance(pairing, ChainPairing):
        keys_q = {c.key for c in nodes_q}
        values = list(pairing.values())
        if (
            set(pairing) != keys_q
            or set(values) != set(nodes_p)
            or len(set(values)) != len(values)
        ):
            raise PreconditionError("pairing is not a bijection on bases")
        return {a: nodes_p[b] for a, b in pairing.items()}

    if pairing == "inclusion":
        chain_map = ChainPairing()
    elif isinstance(pairing, ChainPairing):
        chain_map = pairing
    else:
        raise ArgumentError(f"unknown pairing {pairing!r}")

    mapped = {
        c.key: basis_p.class_of(c.degree, chain_map(c.chain)) for c in nodes_q
    }
    # the induced map must be an isomorphism in every degree
    for n in range(max(basis_p.dimension, basis_q.dimension) + 1):
        images = [m for k, m in mapped.items() if m.degree == n]
        size = basis_p.rank(n) + len(basis_p.orders(n))
        if len(images) != size:
            raise PreconditionError(
                f"induced map is not an isomorphism in degree {n}"
            )
        if not size:
            continue
        span = ImageSpace(
            n,
            basis_p.ring,
            tuple(m.coordinates for m in images),
            size,
            basis_p.orders(n),
        )
        units = [
            tuple(1 if i == j else 0 for i in range(size)) for j in range(size)
        ]
        if not all(span.contains(u) for u in units):
            raise PreconditionError(
                f"induced map is not an isomorphism in degree {n}"
            )
    return mapped


def homology_iso_as_graphs(
    P: PrecubicalSet,
    Q: PrecubicalSet,
    pairing: Pairing = "inclusion",
    mode: Union[str, GraphMode] = "auto",
    settings: Optional[Settings] = None,
    ring: Union[str, Ring, Coefficients, None] = "z",
) -> Optional[bool]:
    """
    Whether the pairing of Q's basis classes with classes of P identifies the
    two homology graphs.

    Returns True or False when every compared pair is decided on both sides,
    None when an unknown status leaves the answer open.

    Args:
        P: the larger complex.
        Q: the smaller complex (a subcomplex, or an abstraction mapped in by
            a :class:`ChainPairing`).
        pairing: ``"inclusion"``, a :class:`ChainPairing`, or a dict from
            basis keys of Q to basis keys of P.
        mode: pointing decision mode for both sides.
    """
    settings = settings or get_settings()
    if not homology(P, ring).same_groups(homology(Q, ring)):
        return False
    basis_p, basis_q = HomologyBasis(P, ring), HomologyBasis(Q, ring)
    mapped = _paired_classes(P, basis_p, basis_q, pairing)

    nodes_q = basis_q.generators
    n_pairs = max(1, len(nodes_q) ** 2)
    engine_q = _engine(
        Q, basis_q, _resolve_mode(Q, mode, settings), settings, n_pairs
    )
    engine_p = _engine(
        P, basis_p, _resolve_mode(P, mode, settings), settings, n_pairs
    )

    undecided = False
    for a in nodes_q:
        for b in nodes_q:
            sq, _ = engine_q.decide(a, b)
            sp, _ = engine_p.decide(mapped[a.key], mapped[b.key])
            if EdgeStatus.UNKNOWN in (sq, sp):
                undecided = True
                continue
            if sq is not sp:
                logger.info(
                    f"Pointing differs on {a.key} -> {b.key}: "
                    f"{sq.value} vs {sp.value}"
                )
                return False
    return None if undecided else True
