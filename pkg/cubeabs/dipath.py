"""
Directed paths, dihomotopy and trace categories.

Dihomotopy classes are materialized as explicit path sets. Elementary moves
preserve length, so closures are finite; a path budget turns blowups into
:class:`~cubeabs.errors.ResourceError` instead of silent truncation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from collections import deque
from typing import (
    TYPE_CHECKING,
    Callable,
    Iterable,
    Iterator,
    Literal,
    Mapping,
    Optional,
    Sequence,
    Union,
)

from tqdm import tqdm
import networkx as nx

from ._logger import logger
from .config import get_settings
from .errors import (
    ArgumentError,
    CertificationError,
    PreconditionError,
    ResourceError,
)
from .precubical import PrecubicalSet, corner_edge, reachability, vertex_digraph

if TYPE_CHECKING:
    from .hda import Hda

logger.debug(f"Loading module {__name__}.")

__all__ = [
    "Cancellation",
    "DihomotopyClass",
    "Division",
    "Path",
    "TraceCategory",
    "TraceComparison",
    "adjacent_paths",
    "are_dihomotopic",
    "cancellation_sufficient",
    "compare_trace_categories",
    "concat",
    "dihomotopy_class",
    "divides",
    "is_path",
    "make_path",
    "paths_between",
    "paths_from",
    "paths_into",
    "trace_category",
    "transport_path",
]


@dataclass(frozen=True, order=True)
class Path:
    """
    A directed path: a start vertex and a chain of edges. Paths order
    lexicographically by (start, edges), which is the canonical order inside
    a dihomotopy class.
    """

    start: int
    edges: tuple[int, ...] = ()
    end: int = field(default=-1, compare=False)

    def __post_init__(self):
        if self.end == -1 and not self.edges:
            object.__setattr__(self, "end", self.start)

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def length(self) -> int:
        return len(self.edges)

    def to_text(self) -> str:
        return f"path {self.start} : " + " ".join(str(e) for e in self.edges)


def _pcs(A) -> PrecubicalSet:
    return getattr(A, "pcs", A)


def make_path(P: PrecubicalSet, start: int, edges: Sequence[int] = ()) -> Path:
    """Build a path, checking that consecutive edges chain."""
    P = _pcs(P)
    if P.degree(start) != 0:
        raise ArgumentError(f"path start {start} is not a vertex")
    current = start
    for e in edges:
        if P.degree(e) != 1:
            raise ArgumentError(f"path element {e} is not an edge")
        if P.source(e) != current:
            raise ArgumentError(
                f"edge {e} does not start at {current}, path does not chain"
            )
        current = P.target(e)
    return Path(start, tuple(edges), current)


def edge_path(P: PrecubicalSet, edges: Sequence[int]) -> Path:
    """Path given by a non-empty edge sequence."""
    P = _pcs(P)
    if not edges:
        raise ArgumentError("edge path needs at least one edge")
    return make_path(P, P.source(edges[0]), edges)


def is_path(P: PrecubicalSet, path: Path) -> bool:
    try:
        return make_path(P, path.start, path.edges).end == path.end
    except ArgumentError:
        return False


def concat(first: Path, second: Path) -> Path:
    if first.end != second.start:
        raise ArgumentError(
            f"cannot concatenate: {first.end} != {second.start}"
        )
    return Path(first.start, first.edges + second.edges, second.end)


# elementary dihomotopy


def _swaps(P: PrecubicalSet, e: int, f: int) -> Iterator[tuple[int, int]]:
    """Alternative factorizations of the edge pair (e, f) through a square."""
    for z, k, i in P.cofaces(e):
        if k != 0 or P.degree(z) != 2:
            continue
        if i == 1 and P.face(z, 1, 2) == f:
            yield P.face(z, 0, 2), P.face(z, 1, 1)
        elif i == 2 and P.face(z, 1, 1) == f:
            yield P.face(z, 0, 1), P.face(z, 1, 2)


def adjacent_paths(P: PrecubicalSet, path: Path) -> frozenset[Path]:
    """
    All paths obtained by one square move: a consecutive pair
    ``(d^0_1 z, d^1_2 z)`` is exchanged with ``(d^0_2 z, d^1_1 z)`` and
    conversely. The path itself is excluded.
    """
    P = _pcs(P)
    result = set()
    edges = path.edges
    for j in range(len(edges) - 1):
        for a, b in _swaps(P, edges[j], edges[j + 1]):
            if (a, b) != (edges[j], edges[j + 1]):
                result.add(
                    Path(path.start, edges[:j] + (a, b) + edges[j + 2:], path.end)
                )
    return frozenset(result)


@dataclass(frozen=True)
class DihomotopyClass:
    representatives: frozenset[Path]
    canonical: Path

    def __contains__(self, path: object) -> bool:
        return path in self.representatives

    def __len__(self) -> int:
        return len(self.representatives)

    @property
    def start(self) -> int:
        return self.canonical.start

    @property
    def end(self) -> int:
        return self.canonical.end

    @property
    def length(self) -> int:
        return self.canonical.length


def dihomotopy_class(
    P: PrecubicalSet, path: Path, budget: Optional[int] = None
) -> DihomotopyClass:
    """Breadth-first closure of a path under square moves."""
    P = _pcs(P)
    budget = budget or get_settings().budget_paths
    seen = {path}
    todo = deque([path])
    while todo:
        current = todo.popleft()
        for other in adjacent_paths(P, current):
            if other not in seen:
                seen.add(other)
                if len(seen) > budget:
                    raise ResourceError(
                        f"dihomotopy class exceeds {budget} paths",
                        budget="budget_paths",
                        limit=budget,
                    )
                todo.append(other)
    return DihomotopyClass(frozenset(seen), min(seen))


def are_dihomotopic(
    P: PrecubicalSet, first: Path, second: Path, budget: Optional[int] = None
) -> bool:
    if (first.start, first.end, len(first)) != (
        second.start,
        second.end,
        len(second),
    ):
        return False
    return second in dihomotopy_class(P, first, budget)


# path enumeration


def _enumerate(
    P: PrecubicalSet,
    origin: int,
    step: Callable[[int], Iterable[tuple[int, int]]],
    max_weight: float,
    weight: Callable[[int], int],
    budget: int,
) -> Iterator[tuple[tuple[int, ...], int]]:
    """Depth-first enumeration of edge sequences from ``origin``.

    Yields (edges in walk order, current vertex).
    """
    count = 0
    stack: list[tuple[int, tuple[int, ...], int]] = [(origin, (), 0)]
    while stack:
        v, walk, w = stack.pop()
        count += 1
        if count > budget:
            raise ResourceError(
                f"path enumeration exceeds {budget} paths",
                budget="budget_paths",
                limit=budget,
            )
        yield walk, v
        for e, nxt in reversed(list(step(v))):
            we = w + weight(e)
            if we <= max_weight:
                stack.append((nxt, walk + (e,), we))


def paths_from(
    P: PrecubicalSet,
    v: int,
    max_len: float,
    budget: Optional[int] = None,
    weight: Optional[Callable[[int], int]] = None,
) -> Iterator[Path]:
    """All paths starting at v of weight at most ``max_len``."""
    P = _pcs(P)
    budget = budget or get_settings().budget_paths
    weight = weight or (lambda e: 1)
    for walk, end in _enumerate(
        P,
        v,
        lambda u: ((e, P.target(e)) for e in P.out_edges(u)),
        max_len,
        weight,
        budget,
    ):
        yield Path(v, walk, end)


def paths_into(
    P: PrecubicalSet,
    v: int,
    max_len: float,
    budget: Optional[int] = None,
    weight: Optional[Callable[[int], int]] = None,
) -> Iterator[Path]:
    """All paths ending at v of weight at most ``max_len``."""
    P = _pcs(P)
    budget = budget or get_settings().budget_paths
    weight = weight or (lambda e: 1)
    for walk, start in _enumerate(
        P,
        v,
        lambda u: ((e, P.source(e)) for e in P.in_edges(u)),
        max_len,
        weight,
        budget,
    ):
        yield Path(start, tuple(reversed(walk)), v)


def paths_between(
    P: PrecubicalSet,
    v: int,
    w: int,
    max_len: float,
    budget: Optional[int] = None,
    weight: Optional[Callable[[int], int]] = None,
) -> list[Path]:
    """Paths from v to w of weight at most ``max_len``, in canonical order."""
    paths = paths_from(P, v, max_len, budget, weight)
    return sorted(p for p in paths if p.end == w)


# trace categories


@dataclass(frozen=True)
class TraceCategory:
    """
    Hom-sets between distinguished vertices, as dihomotopy classes.

    ``complete[(v, w)]`` is False when the hom-set was cut by a length bound
    on a cyclic model.
    """

    objects: tuple[int, ...]
    homs: Mapping[tuple[int, int], tuple[DihomotopyClass, ...]]
    complete: Mapping[tuple[int, int], bool]
    bound: Optional[int]
    weight: str = "edges"

    def hom(self, v: int, w: int) -> tuple[DihomotopyClass, ...]:
        return self.homs.get((v, w), ())

    def size(self, v: int, w: int) -> int:
        return len(self.hom(v, w))

    @property
    def is_complete(self) -> bool:
        return all(self.complete.values())

    def class_of(self, path: Path) -> Optional[DihomotopyClass]:
        for c in self.hom(path.start, path.end):
            if path in c:
                return c
        return None


def _weight_function(A, weight: str) -> Callable[[int], int]:
    if weight == "edges":
        return lambda e: 1
    if weight == "letters":
        return lambda e: max(1, len(A.label(e)))
    raise ArgumentError(f"unknown path weight {weight!r}")


def _longest_weight(P: PrecubicalSet, weight: Callable[[int], int]) -> int:
    G = vertex_digraph(P)
    best = {v: 0 for v in P.vertices}
    for v in nx.topological_sort(G):
        for e in P.out_edges(v):
            t = P.target(e)
            best[t] = max(best[t], best[v] + weight(e))
    return max(best.values(), default=0)


def is_acyclic(P: PrecubicalSet) -> bool:
    return nx.is_directed_acyclic_graph(vertex_digraph(_pcs(P)))


def trace_category(
    A: "Hda",
    max_len: Union[int, Literal["auto"]] = "auto",
    weight: str = "edges",
    budget: Optional[int] = None,
    progress: Optional[bool] = None,
) -> TraceCategory:
    """
    The trace category on ``I u F u m0 u m1``.

    Args:
        A: the HDA.
        max_len: path bound; "auto" is exact on acyclic models and the
            configured ``trace_bound`` on cyclic ones.
        weight: "edges" counts edges, "letters" counts label letters so that
            merged edges weigh as much as the chains they replace.
        budget: path enumeration budget.
    """
    P = A.pcs
    settings = get_settings()
    budget = budget or settings.budget_paths
    progress = settings.progress if progress is None else progress
    wfun = _weight_function(A, weight)

    reach = reachability(P)
    objects = tuple(sorted(A.init | A.final | reach.m0 | reach.m1))
    acyclic = is_acyclic(P)

    if acyclic:
        exact_bound = _longest_weight(P, wfun)
        bound = exact_bound if max_len == "auto" else int(max_len)
        complete = bound >= exact_bound
    else:
        bound = settings.trace_bound if max_len == "auto" else int(max_len)
        complete = False

    object_set = set(objects)
    buckets: dict[tuple[int, int], list[Path]] = {}
    for v in tqdm(objects, desc="trace category", disable=not progress):
        for path in paths_from(P, v, bound, budget, wfun):
            if path.end in object_set:
                buckets.setdefault((v, path.end), []).append(path)

    homs: dict[tuple[int, int], tuple[DihomotopyClass, ...]] = {}
    flags: dict[tuple[int, int], bool] = {}
    for v in objects:
        for w in objects:
            paths = sorted(buckets.get((v, w), ()))
            seen: set[Path] = set()
            classes = []
            for path in paths:
                if path in seen:
                    continue
                c = dihomotopy_class(P, path, budget)
                seen.update(c.representatives)
                classes.append(c)
            homs[(v, w)] = tuple(classes)
            flags[(v, w)] = complete

    logger.debug(
        f"Trace category: {len(objects)} objects, "
        f"{sum(len(h) for h in homs.values())} morphisms, bound {bound}"
    )
    return TraceCategory(objects, homs, flags, bound, weight)


@dataclass
class TraceComparison:
    iso: bool
    complete: bool
    counts: dict[tuple[int, int], tuple[int, int]]
    mismatches: list[str]


def compare_trace_categories(
    A: "Hda",
    B: "Hda",
    vertex_map: Mapping[int, int],
    edge_expansion: Mapping[int, Sequence[int]],
    max_len: Union[int, Literal["auto"]] = "auto",
    budget: Optional[int] = None,
) -> TraceComparison:
    """
    Compare the trace categories of an abstraction B and its original A.

    Paths of B are pushed to A by mapping vertices with ``vertex_map`` and
    replacing every edge by its expansion in A. Path weights count label
    letters on both sides, so bounded strata correspond. ``counts`` maps each
    object pair of B to (|Hom_B|, |Hom_A|).
    """
    mismatches: list[str] = []
    if max_len == "auto" and not (is_acyclic(A.pcs) and is_acyclic(B.pcs)):
        max_len = get_settings().trace_bound
    tc_b = trace_category(B, max_len, "letters", budget)
    tc_a = trace_category(A, max_len, "letters", budget)

    mapped_objects = {vertex_map.get(v) for v in tc_b.objects}
    if mapped_objects != set(tc_a.objects):
        mismatches.append(
            f"objects differ: {sorted(map(str, mapped_objects))} vs "
            f"{sorted(tc_a.objects)}"
        )

    def push(path: Path) -> Path:
        edges: list[int] = []
        for e in path.edges:
            edges.extend(edge_expansion.get(e, (e,)))
        return make_path(A.pcs, vertex_map[path.start], edges)

    counts = {}
    for (v, w), classes in tc_b.homs.items():
        fv, fw = vertex_map.get(v), vertex_map.get(w)
        if fv is None or fw is None:
            mismatches.append(f"object {v if fv is None else w} not mapped")
            continue
        targets = tc_a.hom(fv, fw)
        counts[(v, w)] = (len(classes), len(targets))
        hit: list[DihomotopyClass] = []
        for c in classes:
            images = {tc_a.class_of(push(p)) for p in c.representatives}
            if len(images) != 1 or None in images:
                mismatches.append(
                    f"class {c.canonical.to_text()} has no single image"
                )
                continue
            hit.append(images.pop())
        if len(set(hit)) != len(hit):
            mismatches.append(f"hom({v},{w}) not injective")
        if set(hit) != set(targets):
            mismatches.append(
                f"hom({v},{w}) not surjective: {len(set(hit))} of "
                f"{len(targets)}"
            )

    return TraceComparison(
        iso=not mismatches,
        complete=tc_a.is_complete and tc_b.is_complete,
        counts=counts,
        mismatches=mismatches,
    )


# divisibility and cancellation


@dataclass(frozen=True)
class Division:
    divisible: bool
    quotient: Optional[Path]
    unique: Optional[bool]


def divides(
    P: PrecubicalSet,
    gamma: Path,
    omega: Path,
    side: int,
    budget: Optional[int] = None,
) -> Division:
    """
    Whether ``[omega] = [gamma].[beta]`` (side 0) or ``[alpha].[gamma]``
    (side 1) for some path. ``unique`` tells whether all quotients are
    dihomotopic; it is None when omega is not divisible.
    """
    P = _pcs(P)
    if side == 0:
        if gamma.start != omega.start:
            raise PreconditionError("left divisor must start where path starts")
    elif side == 1:
        if gamma.end != omega.end:
            raise PreconditionError("right divisor must end where path ends")
    else:
        raise ArgumentError(f"side must be 0 or 1, got {side}")

    n, m = len(omega), len(gamma)
    if m > n:
        return Division(False, None, None)

    quotients = set()
    for rep in dihomotopy_class(P, omega, budget).representatives:
        if side == 0 and rep.edges[:m] == gamma.edges:
            rest = rep.edges[m:]
            quotients.add(Path(gamma.end, rest, omega.end))
        elif side == 1 and rep.edges[n - m:] == gamma.edges:
            rest = rep.edges[: n - m]
            quotients.add(Path(omega.start, rest, gamma.start))

    if not quotients:
        return Division(False, None, None)
    first = min(quotients)
    if len(quotients) == 1:
        return Division(True, first, True)
    klass = dihomotopy_class(P, first, budget)
    return Division(True, first, quotients <= klass.representatives)


@dataclass(frozen=True)
class Cancellation:
    holds: bool
    reason: str


def cancellation_sufficient(
    P: PrecubicalSet, gamma: Path, side: int, budget: Optional[int] = None
) -> Cancellation:
    """
    Sufficient conditions for cancelling gamma.

    Side 1 (``a.gamma ~ b.gamma`` implies ``a ~ b``): no path dihomotopic to
    gamma starts with a back face of a square, or no edge ending in gamma's
    start is a front face of a square. Side 0 is the mirror image.
    """
    P = _pcs(P)
    if side not in (0, 1):
        raise ArgumentError(f"side must be 0 or 1, got {side}")

    def is_face_of_square(e: int, k: int) -> bool:
        return any(
            kk == k and P.degree(z) == 2 for z, kk, _ in P.cofaces(e)
        )

    klass = dihomotopy_class(P, gamma, budget)
    if side == 1:
        if not any(
            rep.edges and is_face_of_square(rep.edges[0], 1)
            for rep in klass.representatives
        ):
            return Cancellation(True, "no-back-face-start")
        if not any(is_face_of_square(e, 0) for e in P.in_edges(gamma.start)):
            return Cancellation(True, "no-front-face-into-start")
    else:
        if not any(
            rep.edges and is_face_of_square(rep.edges[-1], 0)
            for rep in klass.representatives
        ):
            return Cancellation(True, "no-front-face-end")
        if not any(is_face_of_square(e, 1) for e in P.out_edges(gamma.end)):
            return Cancellation(True, "no-back-face-out-of-end")
    return Cancellation(False, "")


# transport across a 2-cube collapse


def transport_path(
    A,
    x: int,
    i: int,
    path: Path,
    k: int = 1,
    budget: Optional[int] = None,
) -> Path:
    """
    Reroute a path around the free face ``f = d^k_i x`` of a 2-cube.

    For k = 1 every occurrence of f is handled from the left: the prefix up to
    f is divided on the right by ``e^1_i x``, and ``prefix.f`` becomes
    ``quotient . d^0_i x . d^1_{3-i} x``. For k = 0 the suffix after f is
    divided on the left by ``e^0_i x`` and ``f.suffix`` becomes
    ``d^0_{3-i} x . d^1_i x . quotient``. The result avoids f and is
    dihomotopic to the input.
    """
    P = _pcs(A)
    if P.degree(x) != 2:
        raise PreconditionError(f"cube {x} is not a 2-cube")
    if i not in (1, 2):
        raise ArgumentError(f"face index {i} out of range 1..2")
    if k not in (0, 1):
        raise ArgumentError(f"face side must be 0 or 1, got {k}")
    if not is_path(P, path):
        raise ArgumentError("not a path of the model")

    f = P.face(x, k, i)
    e = corner_edge(P, x, k, i)
    current = path

    while f in current.edges:
        edges = current.edges
        if k == 1:
            pos = edges.index(f)
            prefix = Path(current.start, edges[:pos], P.source(f))
            candidates = sorted(
                rep
                for rep in dihomotopy_class(P, prefix, budget).representatives
                if rep.edges and rep.edges[-1] == e and f not in rep.edges
            )
            if not candidates:
                raise CertificationError(
                    f"prefix of length {pos} ending in {P.source(f)} is not "
                    f"right-divisible by edge {e} avoiding {f}"
                )
            rebuilt = candidates[0].edges[:-1] + (
                P.face(x, 0, i),
                P.face(x, 1, 3 - i),
            )
            current = Path(current.start, rebuilt + edges[pos + 1:], current.end)
        else:
            pos = len(edges) - 1 - edges[::-1].index(f)
            suffix = Path(P.target(f), edges[pos + 1:], current.end)
            candidates = sorted(
                rep
                for rep in dihomotopy_class(P, suffix, budget).representatives
                if rep.edges and rep.edges[0] == e and f not in rep.edges
            )
            if not candidates:
                raise CertificationError(
                    f"suffix of length {len(edges) - pos - 1} starting in "
                    f"{P.target(f)} is not left-divisible by edge {e} "
                    f"avoiding {f}"
                )
            rebuilt = (
                P.face(x, 0, 3 - i),
                P.face(x, 1, i),
            ) + candidates[0].edges[1:]
            current = Path(current.start, edges[:pos] + rebuilt, current.end)

    return current
