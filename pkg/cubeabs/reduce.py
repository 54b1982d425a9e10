"""
Safe reduction of HDAs.

Every step is gated by a check that returns a :class:`Judgment`: the list of
conditions evaluated with witnesses and, when all pass, the guarantees the
corresponding collapse theorem gives for the result. The greedy
:func:`reduce` loop applies the first applicable step in a fixed order and
records it in a replayable :class:`ReductionReport`; :func:`certify` checks
the defining clauses of a topological abstraction on desk-scale models.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, EnumMeta
from itertools import product
from typing import Iterable, Literal, Mapping, Optional, Sequence, Union
import os
import time

import networkx as nx
import pandas as pd
from pydantic import BaseModel, validate_call
from tqdm import tqdm

from ._logger import logger
from .config import Settings, get_settings
from .dipath import (
    cancellation_sufficient,
    compare_trace_categories,
    divides,
    is_acyclic,
    make_path,
    paths_from,
    paths_into,
)
from .errors import (
    ArgumentError,
    CubeAbsError,
    IntegrityError,
    LoadError,
    PreconditionError,
    RefusalError,
    ResourceError,
)
from .hda import Hda, export_inventory, restrict
from .homology import ChainPairing, homology, homology_iso_as_graphs
from .precubical import (
    PrecubicalSet,
    corner_edge,
    cube_image,
    is_free_face,
    is_regular,
    is_weakly_regular,
    reachability,
    star,
    vertex_digraph,
)

logger.debug(f"Loading module {__name__}.")

__all__ = [
    "AbstractionMap",
    "CertificationReport",
    "CertifyOptions",
    "Check",
    "ClauseStatus",
    "Guarantee",
    "Judgment",
    "ReduceOptions",
    "ReductionReport",
    "Step",
    "StepKind",
    "Theorem",
    "Verdict",
    "certify",
    "check_elementary",
    "check_manual_2cube",
    "check_merge",
    "check_vertex_star",
    "collapse_elementary",
    "collapse_manual_2cube",
    "collapse_vertex_star",
    "declared_map",
    "merge_edges",
    "reduce",
    "replay",
]


class ReduceEnumMeta(EnumMeta):
    def __contains__(cls, item):
        return item in cls.__members__.keys()


class _LowerMissing:
    @classmethod
    def _missing_(cls, value: str):
        value = value.lower()
        for member in cls.__members__.values():
            if member.value.lower() == value:
                return member
        return None


class Theorem(_LowerMissing, Enum, metaclass=ReduceEnumMeta):
    ELEM_DIM2 = "elem-dim2"
    ELEM_DIM3 = "elem-dim3"
    ELEM_HIGH = "elem-dim≥4"
    VERTEX_STAR = "vertex-star"
    MANUAL_2CUBE = "manual-2cube"
    EDGE_MERGE = "edge-merge"


class Guarantee(_LowerMissing, Enum, metaclass=ReduceEnumMeta):
    TRACE_ISO = "trace-iso"
    HOMOLOGY_GRAPH_ISO = "homology-graph-iso"
    HOMOTOPY_EQUIV = "homotopy-equiv"
    EXTREMAL_PRESERVED = "extremal-preserved"
    ACCESS_PRESERVED = "access-preserved"


class StepKind(_LowerMissing, Enum, metaclass=ReduceEnumMeta):
    ELEMENTARY = "elem"
    VERTEX_STAR = "vstar"
    MANUAL = "manual"
    MERGE = "merge"


class Verdict(_LowerMissing, Enum, metaclass=ReduceEnumMeta):
    CERTIFIED = "certified"
    CERTIFIED_BOUNDED = "certified-bounded"
    INCONCLUSIVE = "inconclusive"
    REFUTED = "refuted"


class ClauseStatus(_LowerMissing, Enum, metaclass=ReduceEnumMeta):
    HOLDS = "holds"
    BOUNDED = "bounded"
    UNKNOWN = "unknown"
    FAILS = "fails"


ALL_GUARANTEES = frozenset(Guarantee)
MANUAL_GUARANTEES = ALL_GUARANTEES - {Guarantee.ACCESS_PRESERVED}


@dataclass(frozen=True)
class Check:
    """One evaluated condition; ``passed`` is None when undecided."""

    name: str
    passed: Optional[bool]
    witness: str = ""

    def to_text(self) -> str:
        mark = {True: "pass", False: "fail", None: "unknown"}[self.passed]
        return f"{self.name}: {mark}" + (f" ({self.witness})" if self.witness else "")


@dataclass(frozen=True)
class Judgment:
    applicable: bool
    theorem: Theorem
    checks: tuple[Check, ...]
    guarantees: frozenset[Guarantee] = frozenset()
    bounded: bool = False

    @classmethod
    def of(
        cls,
        theorem: Theorem,
        checks: Sequence[Check],
        guarantees: Iterable[Guarantee] = ALL_GUARANTEES,
        bounded: bool = False,
    ) -> "Judgment":
        ok = bool(checks) and all(c.passed is True for c in checks)
        return cls(
            applicable=ok,
            theorem=theorem,
            checks=tuple(checks),
            guarantees=frozenset(guarantees) if ok else frozenset(),
            bounded=bounded,
        )

    @property
    def failed(self) -> tuple[Check, ...]:
        return tuple(c for c in self.checks if c.passed is not True)

    def lines(self) -> list[str]:
        head = "applicable" if self.applicable else "not applicable"
        out = [f"{self.theorem.value}: {head}"]
        out += ["  " + c.to_text() for c in self.checks]
        if self.guarantees:
            out.append(
                "  guarantees "
                + " ".join(sorted(g.value for g in self.guarantees))
            )
        if self.bounded:
            out.append("  bounded")
        return out


def _refuse(what: str, judgment: Judgment):
    names = ", ".join(c.name for c in judgment.failed)
    raise RefusalError(f"{what} refused, failing: {names}", judgment)


def _weak_regularity(P: PrecubicalSet) -> Check:
    ok, witness = is_weakly_regular(P)
    return Check("weakly-regular", ok, "" if ok else f"square {witness}")


def _distinguished(A: Hda) -> frozenset[int]:
    return A.init | A.final


def _corner_vertex(P: PrecubicalSet, x: int, k: int, i: int) -> int:
    """``d^{1-k}_1 ... d^{1-k}_1 d^k_i x``."""
    c = P.face(x, k, i)
    for _ in range(P.degree(x) - 1):
        c = P.face(c, 1 - k, 1)
    return c


def _check_indices(P: PrecubicalSet, x: int, k: int, i: int) -> int:
    n = P.degree(x)
    if k not in (0, 1):
        raise ArgumentError(f"face side must be 0 or 1, got {k}")
    if not 1 <= i <= max(n, 1) or n == 0:
        raise ArgumentError(f"face index {i} out of range for cube {x}")
    return n


# elementary collapses


def check_elementary(A: Hda, x: int, k: int, i: int) -> Judgment:
    """
    Conditions for removing the star of the free face ``d^k_i x``.

    Args:
        A: the HDA.
        x: a cube of degree n >= 2.
        k: side of the free face.
        i: index of the free face.
    """
    P = A.pcs
    n = _check_indices(P, x, k, i)
    theorem = (
        Theorem.ELEM_DIM2
        if n <= 2
        else Theorem.ELEM_DIM3 if n == 3 else Theorem.ELEM_HIGH
    )
    checks = [_weak_regularity(P)]

    if n < 2:
        checks.append(Check("regular-free-face", False, f"degree {n}"))
        return Judgment.of(theorem, checks)
    regular = is_regular(P, x)
    free = is_free_face(P, x, k, i)
    checks.append(
        Check(
            "regular-free-face",
            regular and free,
            "" if regular and free else ("not free" if regular else "not regular"),
        )
    )

    f = P.face(x, k, i)
    c = _corner_vertex(P, x, k, i)
    e = corner_edge(P, x, k, i)
    arriving = P.in_edges(c) if k == 1 else P.out_edges(c)
    others = [y for y in arriving if y != e]
    checks.append(
        Check(
            "unique-edge",
            not others,
            f"edge {others[0]} at vertex {c}" if others else "",
        )
    )
    if n <= 3:
        inside = c in _distinguished(A)
        checks.append(
            Check(
                "corner-not-distinguished",
                not inside,
                f"vertex {c}" if inside else "",
            )
        )
    if n == 2:
        checks.append(_alternative_edge(P, f, k))
    return Judgment.of(theorem, checks)


def _alternative_edge(P: PrecubicalSet, f: int, k: int) -> Check:
    """An edge other than f sharing its ``d^{1-k}_1`` endpoint."""
    anchor = P.face(f, 1 - k, 1)
    siblings = P.out_edges(anchor) if k == 1 else P.in_edges(anchor)
    alt = [y for y in siblings if y != f]
    return Check(
        "alternative-edge",
        bool(alt),
        f"edge {alt[0]}" if alt else f"no other edge at vertex {anchor}",
    )


def _remove_star(A: Hda, y: int) -> Hda:
    removed = star(A.pcs, y)
    return restrict(A, (z for z in A.pcs.ids if z not in removed))


def collapse_elementary(
    A: Hda, x: int, k: int, i: int, force: bool = False
) -> tuple[Hda, Judgment]:
    """
    Remove ``star(d^k_i x)``.

    Raises:
        RefusalError: the check fails and ``force`` is off.
    """
    judgment = check_elementary(A, x, k, i)
    if not judgment.applicable and not force:
        _refuse(f"elementary collapse of ({x}, {k}, {i})", judgment)
    return _remove_star(A, A.pcs.face(x, k, i)), judgment


# vertex-star collapses


def _star_vertex(P: PrecubicalSet, x: int, ks: Sequence[int]) -> int:
    v = x
    for k in ks:
        v = P.face(v, k, 1)
    return v


def _as_bits(ks: Union[str, Sequence[int]]) -> tuple[int, ...]:
    if isinstance(ks, str):
        ks = [int(ch) for ch in ks if not ch.isspace()]
    bits = tuple(int(k) for k in ks)
    if any(k not in (0, 1) for k in bits):
        raise ArgumentError(f"vertex selector must be bits, got {ks}")
    return bits


def check_vertex_star(
    A: Hda, x: int, ks: Union[str, Sequence[int]]
) -> Judgment:
    """
    Conditions for removing the star of the corner
    ``d^{k_n}_1 ... d^{k_1}_1 x`` of x.
    """
    P = A.pcs
    n = P.degree(x)
    ks = _as_bits(ks)
    if len(ks) != n:
        raise ArgumentError(
            f"vertex selector has length {len(ks)}, cube {x} has degree {n}"
        )
    checks = [_weak_regularity(P)]
    regular = n >= 2 and is_regular(P, x)
    checks.append(
        Check("regular", regular, "" if regular else f"degree {n}")
    )
    mixed = 0 in ks and 1 in ks
    checks.append(
        Check("mixed-corner", mixed, "" if mixed else "all bits equal")
    )
    if n == 0:
        return Judgment.of(Theorem.VERTEX_STAR, checks)

    v = _star_vertex(P, x, ks)
    inside = v in _distinguished(A)
    checks.append(
        Check("corner-not-distinguished", not inside, f"vertex {v}" if inside else "")
    )
    image = cube_image(P, x)[0].members
    outside = sorted(star(P, v) - image)
    checks.append(
        Check(
            "star-in-cube",
            not outside,
            f"cube {outside[0]} outside" if outside else "",
        )
    )
    return Judgment.of(Theorem.VERTEX_STAR, checks)


def collapse_vertex_star(
    A: Hda, x: int, ks: Union[str, Sequence[int]], force: bool = False
) -> tuple[Hda, Judgment]:
    judgment = check_vertex_star(A, x, ks)
    if not judgment.applicable and not force:
        _refuse(f"vertex-star collapse of ({x}, {ks})", judgment)
    return _remove_star(A, _star_vertex(A.pcs, x, _as_bits(ks))), judgment


# 2-cube collapses checked on paths and homology graphs


def _strongly_connected(P: PrecubicalSet) -> bool:
    G = nx.DiGraph(vertex_digraph(P))
    return G.number_of_nodes() > 0 and nx.is_strongly_connected(G)


def _divisibility(
    A: Hda,
    x: int,
    i: int,
    k: int,
    Q: PrecubicalSet,
    settings: Settings,
) -> tuple[Check, bool]:
    P = A.pcs
    reach = reachability(P)
    c = _corner_vertex(P, x, k, i)
    e = corner_edge(P, x, k, i)
    extreme = P.face(P.face(x, k, 1), k, 1)
    D = _distinguished(A) | reach.m0 | reach.m1 | {extreme}
    gamma = make_path(Q, P.source(e), [e])

    arriving = P.in_edges(c) if k == 1 else P.out_edges(c)
    if c not in D and tuple(arriving) == (e,):
        cancel = cancellation_sufficient(Q, gamma, k, settings.budget_paths)
        if cancel.holds:
            return Check("unique-divisibility", True, f"cancellation {cancel.reason}"), False

    bounded = not is_acyclic(Q)
    bound = len(Q.vertices)
    try:
        if k == 1:
            walks = (
                w
                for w in paths_into(Q, c, bound, settings.budget_paths)
                if w.start in D
            )
        else:
            walks = (
                w
                for w in paths_from(Q, c, bound, settings.budget_paths)
                if w.end in D
            )
        count = 0
        for omega in walks:
            count += 1
            division = divides(Q, gamma, omega, k, settings.budget_paths)
            if not (division.divisible and division.unique):
                reason = "not divisible" if not division.divisible else "not unique"
                return (
                    Check("unique-divisibility", False, f"{reason}: {omega.to_text()}"),
                    bounded,
                )
    except ResourceError as err:
        return Check("unique-divisibility", None, str(err)), bounded
    witness = f"{count} paths" + (f", length <= {bound}" if bounded else "")
    return Check("unique-divisibility", True, witness), bounded


def _graph_side(
    A: Hda, x: int, i: int, k: int, Q: PrecubicalSet, settings: Settings
) -> Check:
    P = A.pcs
    c = _corner_vertex(P, x, k, i)
    e = corner_edge(P, x, k, i)
    arriving = P.in_edges(c) if k == 1 else P.out_edges(c)
    if tuple(arriving) == (e,):
        return Check("homology-graph", True, "unique-edge")
    if _strongly_connected(P) and _strongly_connected(Q):
        return Check("homology-graph", True, "strongly-connected")
    if len(P) > settings.oracle_bound:
        return Check("homology-graph", None, "oracle bound exceeded")
    try:
        same = homology_iso_as_graphs(
            P, Q, "inclusion", mode="bruteforce", settings=settings
        )
    except ResourceError as err:
        return Check("homology-graph", None, str(err))
    except PreconditionError as err:
        return Check("homology-graph", False, str(err))
    if same is None:
        return Check("homology-graph", None, "oracle undecided")
    return Check("homology-graph", same, "oracle")


def check_manual_2cube(
    A: Hda,
    x: int,
    i: int,
    k: int = 1,
    settings: Optional[Settings] = None,
) -> Judgment:
    """
    Check the collapse of the free face ``d^k_i x`` of a 2-cube against the
    trace-category conditions (an alternative edge, and unique divisibility
    of the relevant paths by the corner edge) and the homology graph.

    Raises:
        PreconditionError: x is not a 2-cube.
    """
    settings = settings or get_settings()
    P = A.pcs
    if P.degree(x) != 2:
        raise PreconditionError(f"cube {x} is not a 2-cube")
    _check_indices(P, x, k, i)
    theorem = Theorem.MANUAL_2CUBE

    checks = [_weak_regularity(P)]
    regular = is_regular(P, x)
    free = is_free_face(P, x, k, i)
    checks.append(
        Check(
            "regular-free-face",
            regular and free,
            "" if regular and free else ("not free" if regular else "not regular"),
        )
    )
    if not (regular and free):
        return Judgment.of(theorem, checks, MANUAL_GUARANTEES)

    f = P.face(x, k, i)
    checks.append(_alternative_edge(P, f, k))
    removed = star(P, f)
    Q = P.restricted(z for z in P.ids if z not in removed)
    division, bounded = _divisibility(A, x, i, k, Q, settings)
    checks.append(division)
    checks.append(_graph_side(A, x, i, k, Q, settings))
    return Judgment.of(theorem, checks, MANUAL_GUARANTEES, bounded)


def collapse_manual_2cube(
    A: Hda,
    x: int,
    i: int,
    k: int = 1,
    force: bool = False,
    settings: Optional[Settings] = None,
) -> tuple[Hda, Judgment]:
    judgment = check_manual_2cube(A, x, i, k, settings)
    if not judgment.applicable and not force:
        _refuse(f"2-cube collapse of ({x}, {k}, {i})", judgment)
    return _remove_star(A, A.pcs.face(x, k, i)), judgment


# edge merges


def check_merge(A: Hda, v: int) -> Judgment:
    """Conditions for merging the only edges into and out of v."""
    P = A.pcs
    if P.degree(v) != 0:
        raise ArgumentError(f"cube {v} is not a vertex")
    checks = [_weak_regularity(P)]
    inside = v in _distinguished(A)
    checks.append(
        Check(
            "not-distinguished",
            not inside,
            ("initial" if v in A.init else "final") if inside else "",
        )
    )
    ins, outs = P.in_edges(v), P.out_edges(v)
    shape = len(ins) == 1 and len(outs) == 1 and ins[0] != outs[0]
    checks.append(
        Check(
            "one-in-one-out",
            shape,
            "" if shape else f"{len(ins)} in, {len(outs)} out",
        )
    )
    higher = sorted(star(P, v) - {v, *ins, *outs})
    checks.append(
        Check(
            "no-higher-cubes",
            not higher,
            f"cube {higher[0]}" if higher else "",
        )
    )
    return Judgment.of(Theorem.EDGE_MERGE, checks)


def _merge(A: Hda, v: int) -> tuple[Hda, int, int, int]:
    P = A.pcs
    (e_in,), (e_out,) = P.in_edges(v), P.out_edges(v)
    new = P.max_id + 1
    dims = {x: P.degree(x) for x in P.ids if x not in (v, e_in, e_out)}
    faces = {x: P.faces_of(x) for x in dims}
    dims[new] = 1
    faces[new] = ((P.source(e_in), P.target(e_out)),)
    names = {x: s for x, s in P.names.items() if x in dims}
    labels = {e: w for e, w in A.labels.items() if e in dims}
    labels[new] = A.label(e_in) + A.label(e_out)
    merged = Hda(PrecubicalSet(dims, faces, names), A.init, A.final, labels)
    return merged, new, e_in, e_out


def merge_edges(A: Hda, v: int) -> Hda:
    """
    Replace the chain ``e_in . e_out`` through v by one edge labelled with
    the concatenated word; the new edge gets id ``max_id + 1``.
    """
    judgment = check_merge(A, v)
    if not judgment.applicable:
        _refuse(f"merge at vertex {v}", judgment)
    return _merge(A, v)[0]


# the reduction loop


class ReduceModel(BaseModel):
    enable_elementary: bool = True
    enable_vertex_star: bool = True
    enable_manual: bool = False
    enable_merge: bool = True
    max_steps: Optional[int] = None


class ReduceOptions:
    """
    Switches of the reduction loop.

    Args:
        enable_elementary: try elementary collapses.
        enable_vertex_star: try vertex-star collapses.
        enable_manual: try 2-cube collapses checked on paths and homology
            graphs (slow on large models).
        enable_merge: merge edge chains at the end.
        max_steps: stop after this many steps.
    """

    def __init__(
        self,
        enable_elementary: Optional[bool] = True,
        enable_vertex_star: Optional[bool] = True,
        enable_manual: Optional[bool] = False,
        enable_merge: Optional[bool] = True,
        max_steps: Optional[int] = None,
    ):
        model = ReduceModel(
            enable_elementary=enable_elementary,
            enable_vertex_star=enable_vertex_star,
            enable_manual=enable_manual,
            enable_merge=enable_merge,
            max_steps=max_steps,
        ).model_dump()
        self.enable_elementary = model["enable_elementary"]
        self.enable_vertex_star = model["enable_vertex_star"]
        self.enable_manual = model["enable_manual"]
        self.enable_merge = model["enable_merge"]
        self.max_steps = model["max_steps"]


@dataclass(frozen=True)
class Step:
    kind: StepKind
    cube: int
    k: Union[int, tuple[int, ...], None] = None
    i: Optional[int] = None
    judgment: Optional[Judgment] = field(default=None, compare=False)
    merged: Optional[tuple[int, int, int]] = None

    def to_text(self) -> list[str]:
        if self.kind is StepKind.MERGE:
            lines = [f"step merge {self.cube} - -"]
            if self.merged:
                new, e_in, e_out = self.merged
                lines.append(f"merged {new} = {e_in};{e_out}")
            return lines
        if self.kind is StepKind.VERTEX_STAR:
            bits = "".join(str(b) for b in self.k)
            return [f"step vstar {self.cube} {bits} -"]
        return [f"step {self.kind.value} {self.cube} {self.k} {self.i}"]


@dataclass
class ReductionReport:
    counts_before: tuple[int, ...]
    counts_after: tuple[int, ...]
    steps: list[Step] = field(default_factory=list)

    @property
    def merged(self) -> dict[int, tuple[int, int]]:
        return {
            s.merged[0]: (s.merged[1], s.merged[2])
            for s in self.steps
            if s.merged
        }

    def edge_expansion(self) -> dict[int, tuple[int, ...]]:
        """Every merged edge expanded into the original edges it replaces."""
        table = self.merged

        def expand(e: int) -> tuple[int, ...]:
            if e not in table:
                return (e,)
            a, b = table[e]
            return expand(a) + expand(b)

        return {e: expand(e) for e in table}

    def abstraction_map(self, B: Hda) -> "AbstractionMap":
        return AbstractionMap(
            {v: v for v in B.pcs.vertices}, self.edge_expansion()
        )

    def lines(self) -> list[str]:
        out = ["reduction v1"]
        out.append("counts-before " + " ".join(map(str, self.counts_before)))
        for step in self.steps:
            out += step.to_text()
        out.append("counts-after " + " ".join(map(str, self.counts_after)))
        return out

    def to_text(self) -> str:
        return "\n".join(self.lines()) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ReductionReport":
        """Parse the text form; judgments are not part of it."""
        lines = [
            (n, ln.strip())
            for n, ln in enumerate(text.splitlines(), start=1)
            if ln.strip() and not ln.strip().startswith("#")
        ]
        if not lines or lines[0][1] != "reduction v1":
            raise LoadError("missing header 'reduction v1'", 1)
        before: Optional[tuple[int, ...]] = None
        after: Optional[tuple[int, ...]] = None
        steps: list[Step] = []
        try:
            for n, line in lines[1:]:
                parts = line.split()
                head = parts[0]
                if head == "counts-before":
                    before = tuple(int(p) for p in parts[1:])
                elif head == "counts-after":
                    after = tuple(int(p) for p in parts[1:])
                elif head == "step":
                    if len(parts) != 5:
                        raise LoadError("step needs kind, cube, k, i", n)
                    kind = StepKind(parts[1])
                    cube = int(parts[2])
                    if kind is StepKind.MERGE:
                        steps.append(Step(kind, cube))
                    elif kind is StepKind.VERTEX_STAR:
                        steps.append(Step(kind, cube, _as_bits(parts[3])))
                    else:
                        steps.append(
                            Step(kind, cube, int(parts[3]), int(parts[4]))
                        )
                elif head == "merged":
                    if len(parts) != 4 or parts[2] != "=" or not steps:
                        raise LoadError("malformed merged record", n)
                    e_in, e_out = (int(p) for p in parts[3].split(";"))
                    last = steps.pop()
                    if last.kind is not StepKind.MERGE:
                        raise LoadError("merged record without merge step", n)
                    steps.append(
                        Step(
                            last.kind,
                            last.cube,
                            merged=(int(parts[1]), e_in, e_out),
                        )
                    )
                else:
                    raise LoadError(f"unknown record {head!r}", n)
        except (ValueError, ArgumentError) as e:
            if isinstance(e, LoadError):
                raise
            raise LoadError(str(e)) from e
        if before is None or after is None:
            raise LoadError("missing counts-before or counts-after")
        return cls(before, after, steps)

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for j, s in enumerate(self.steps):
            rows.append(
                {
                    "step": j,
                    "kind": s.kind.value,
                    "cube": s.cube,
                    "k": (
                        "".join(map(str, s.k))
                        if isinstance(s.k, tuple)
                        else ("" if s.k is None else s.k)
                    ),
                    "i": "" if s.i is None else s.i,
                    "theorem": s.judgment.theorem.value if s.judgment else "",
                    "guarantees": (
                        " ".join(sorted(g.value for g in s.judgment.guarantees))
                        if s.judgment
                        else ""
                    ),
                    "merged": (
                        f"{s.merged[0]}={s.merged[1]};{s.merged[2]}"
                        if s.merged
                        else ""
                    ),
                }
            )
        return pd.DataFrame.from_records(
            rows,
            columns=["step", "kind", "cube", "k", "i", "theorem", "guarantees", "merged"],
        )

    def export_csv(self, output_dir: Optional[str] = None) -> str:
        full_path = os.path.join(output_dir or os.getcwd(), "steps.csv")
        self.to_frame().to_csv(full_path, index=False)
        logger.info(f"Reduction steps are written: {full_path}")
        return full_path


def _next_step(
    A: Hda, options: ReduceOptions, settings: Settings
) -> Optional[tuple[Step, Hda]]:
    P = A.pcs
    high = [x for x in P.ids if P.degree(x) >= 2]

    if options.enable_elementary:
        for x in high:
            n = P.degree(x)
            for k in (0, 1):
                for i in range(1, n + 1):
                    if not is_free_face(P, x, k, i):
                        continue
                    judgment = check_elementary(A, x, k, i)
                    if judgment.applicable:
                        B = _remove_star(A, P.face(x, k, i))
                        return Step(StepKind.ELEMENTARY, x, k, i, judgment), B

    if options.enable_vertex_star:
        for x in high:
            n = P.degree(x)
            for ks in product((0, 1), repeat=n):
                if 0 not in ks or 1 not in ks:
                    continue
                judgment = check_vertex_star(A, x, ks)
                if judgment.applicable:
                    B = _remove_star(A, _star_vertex(P, x, ks))
                    return Step(StepKind.VERTEX_STAR, x, ks, None, judgment), B

    if options.enable_manual:
        for x in P.squares:
            for k in (0, 1):
                for i in (1, 2):
                    if not is_free_face(P, x, k, i):
                        continue
                    judgment = check_manual_2cube(A, x, i, k, settings)
                    if judgment.applicable:
                        B = _remove_star(A, P.face(x, k, i))
                        return Step(StepKind.MANUAL, x, k, i, judgment), B

    if options.enable_merge:
        for v in P.vertices:
            judgment = check_merge(A, v)
            if judgment.applicable:
                B, new, e_in, e_out = _merge(A, v)
                return (
                    Step(StepKind.MERGE, v, None, None, judgment, (new, e_in, e_out)),
                    B,
                )
    return None


def reduce(
    A: Hda,
    options: Optional[ReduceOptions] = None,
    settings: Optional[Settings] = None,
) -> tuple[Hda, ReductionReport]:
    """
    Greedy reduction to a fixpoint.

    Candidates are tried in id order: elementary collapses, vertex-star
    collapses, 2-cube collapses (when enabled) and finally edge merges. The
    search restarts after every applied step.

    Args:
        A: a weakly regular HDA.
        options: switches, see :class:`ReduceOptions`.
        settings: budgets; the global settings when None.
    """
    options = options or ReduceOptions()
    settings = settings or get_settings()
    t0 = time.time()
    report = ReductionReport(A.pcs.counts(), A.pcs.counts())
    current = A

    with tqdm(
        total=len(A.pcs), desc="reduce", disable=not settings.progress
    ) as bar:
        while options.max_steps is None or len(report.steps) < options.max_steps:
            found = _next_step(current, options, settings)
            if found is None:
                break
            step, nxt = found
            logger.debug(" ".join(step.to_text()))
            bar.update(len(current.pcs) - len(nxt.pcs))
            report.steps.append(step)
            current = nxt

    report.counts_after = current.pcs.counts()
    t1 = time.time()
    logger.info(
        f"Reduced {report.counts_before} to {report.counts_after} with "
        f"{len(report.steps)} steps in {round((t1 - t0) / 60, 2)} mins"
    )
    if settings.export_csv:
        out = str(settings.output_dir) if settings.output_dir else None
        report.export_csv(out)
        export_inventory(current, out)
    return current, report


def _apply(
    A: Hda, report: ReductionReport, recheck: bool, settings: Settings
) -> tuple[Hda, list[Judgment]]:
    if A.pcs.counts() != report.counts_before:
        raise IntegrityError(
            f"input counts {A.pcs.counts()} differ from report "
            f"{report.counts_before}"
        )
    current = A
    judgments: list[Judgment] = []
    for j, step in enumerate(report.steps):
        P = current.pcs
        try:
            if step.kind is StepKind.MERGE:
                if recheck:
                    judgments.append(check_merge(current, step.cube))
                if len(P.in_edges(step.cube)) != 1 or len(P.out_edges(step.cube)) != 1:
                    raise IntegrityError(f"step {j}: vertex {step.cube} cannot merge")
                current, new, e_in, e_out = _merge(current, step.cube)
                if step.merged and step.merged != (new, e_in, e_out):
                    raise IntegrityError(
                        f"step {j}: merge gives {new} = {e_in};{e_out}, "
                        f"report says {step.merged[0]} = "
                        f"{step.merged[1]};{step.merged[2]}"
                    )
            elif step.kind is StepKind.VERTEX_STAR:
                if recheck:
                    judgments.append(check_vertex_star(current, step.cube, step.k))
                current = _remove_star(current, _star_vertex(P, step.cube, step.k))
            else:
                if recheck:
                    judgments.append(
                        check_manual_2cube(current, step.cube, step.i, step.k, settings)
                        if step.kind is StepKind.MANUAL
                        else check_elementary(current, step.cube, step.k, step.i)
                    )
                current = _remove_star(current, P.face(step.cube, step.k, step.i))
        except IntegrityError:
            raise
        except CubeAbsError as e:
            raise IntegrityError(f"step {j} does not replay: {e}") from e
    if current.pcs.counts() != report.counts_after:
        raise IntegrityError(
            f"replay gives counts {current.pcs.counts()}, report says "
            f"{report.counts_after}"
        )
    return current, judgments


def replay(
    A: Hda,
    report: ReductionReport,
    recheck: bool = False,
    settings: Optional[Settings] = None,
) -> Hda:
    """
    Reapply the steps of a report.

    Args:
        recheck: also rerun every step's check and fail when one is not
            applicable.

    Raises:
        IntegrityError: a step does not apply or the counts differ.
    """
    settings = settings or get_settings()
    result, judgments = _apply(A, report, recheck, settings)
    for j, judgment in enumerate(judgments):
        if not judgment.applicable:
            raise IntegrityError(
                f"step {j} is not licensed: "
                + ", ".join(c.name for c in judgment.failed)
            )
    return result


# certification


@dataclass(frozen=True)
class AbstractionMap:
    """
    Vertex map from the abstraction B into A and the expansion of B's edges
    into edge chains of A; edges not listed keep their id.
    """

    vertex_map: Mapping[int, int]
    edge_expansion: Mapping[int, tuple[int, ...]] = field(default_factory=dict)
    declared: bool = False

    def chain_pairing(self) -> ChainPairing:
        expansion = {
            v: (w,) for v, w in self.vertex_map.items() if v != w
        }
        expansion.update(
            {e: tuple(chain) for e, chain in self.edge_expansion.items()}
        )
        return ChainPairing(expansion)


class CertifyModel(BaseModel):
    max_len: Union[int, Literal["auto"]] = "auto"
    graph_mode: Literal["auto", "search", "bruteforce"] = "auto"
    recheck: bool = True


class CertifyOptions:
    """
    Args:
        max_len: trace comparison bound in label letters; "auto" is exact on
            acyclic models and ``trace_bound`` otherwise.
        graph_mode: homology graph decision mode.
        recheck: rerun the checks of every reported step.
    """

    def __init__(
        self,
        max_len: Union[int, Literal["auto"]] = "auto",
        graph_mode: Literal["auto", "search", "bruteforce"] = "auto",
        recheck: bool = True,
    ):
        model = CertifyModel(
            max_len=max_len, graph_mode=graph_mode, recheck=recheck
        ).model_dump()
        self.max_len = model["max_len"]
        self.graph_mode = model["graph_mode"]
        self.recheck = model["recheck"]


@dataclass(frozen=True)
class Clause:
    name: str
    status: ClauseStatus
    detail: str = ""


@dataclass
class CertificationReport:
    verdict: Verdict
    clauses: list[Clause]

    def lines(self) -> list[str]:
        out = [f"verdict {self.verdict.value}"]
        for c in self.clauses:
            out.append(
                f"clause {c.name} {c.status.value}"
                + (f" {c.detail}" if c.detail else "")
            )
        return out

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame.from_records(
            [
                {"clause": c.name, "status": c.status.value, "detail": c.detail}
                for c in self.clauses
            ],
            columns=["clause", "status", "detail"],
        )


def _distinguished_clause(A: Hda, B: Hda, amap: AbstractionMap) -> Clause:
    vm = amap.vertex_map
    missing = [v for v in B.pcs.vertices if v not in vm]
    if missing:
        return Clause("distinguished", ClauseStatus.FAILS, f"vertex {missing[0]} unmapped")
    ra, rb = reachability(A.pcs), reachability(B.pcs)
    pairs = (
        ("init", B.init, A.init),
        ("final", B.final, A.final),
        ("m0", rb.m0, ra.m0),
        ("m1", rb.m1, ra.m1),
    )
    for name, source, target in pairs:
        image = frozenset(vm[v] for v in source)
        if image != target:
            return Clause(
                "distinguished",
                ClauseStatus.FAILS,
                f"{name}: {sorted(image)} vs {sorted(target)}",
            )
    return Clause("distinguished", ClauseStatus.HOLDS)


def _homotopy_clause(
    A: Hda, B: Hda, judgments: Optional[list[Judgment]]
) -> Clause:
    pa, pb = homology(A.pcs), homology(B.pcs)
    if not pa.same_groups(pb):
        return Clause("homotopy", ClauseStatus.FAILS, f"{pa} vs {pb}")
    if judgments is not None and all(
        Guarantee.HOMOTOPY_EQUIV in j.guarantees for j in judgments
    ):
        return Clause("homotopy", ClauseStatus.HOLDS, "step guarantees")
    return Clause("homotopy", ClauseStatus.BOUNDED, "equal homology only")


def _trace_clause(
    A: Hda, B: Hda, amap: AbstractionMap, options: CertifyOptions, settings: Settings
) -> Clause:
    try:
        cmp = compare_trace_categories(
            A,
            B,
            amap.vertex_map,
            amap.edge_expansion,
            options.max_len,
            settings.budget_paths,
        )
    except ResourceError as err:
        return Clause("trace", ClauseStatus.UNKNOWN, str(err))
    except ArgumentError as err:
        return Clause("trace", ClauseStatus.FAILS, str(err))
    sizes = " ".join(
        f"{v}->{w}:{nb}/{na}" for (v, w), (nb, na) in sorted(cmp.counts.items())
    )
    if not cmp.iso:
        return Clause("trace", ClauseStatus.FAILS, cmp.mismatches[0])
    if cmp.complete:
        return Clause("trace", ClauseStatus.HOLDS, sizes)
    return Clause("trace", ClauseStatus.BOUNDED, sizes)


def _graph_clause(
    A: Hda, B: Hda, amap: AbstractionMap, options: CertifyOptions, settings: Settings
) -> Clause:
    try:
        same = homology_iso_as_graphs(
            A.pcs,
            B.pcs,
            amap.chain_pairing(),
            mode=options.graph_mode,
            settings=settings,
        )
    except ResourceError as err:
        return Clause("homology-graph", ClauseStatus.UNKNOWN, str(err))
    except (PreconditionError, ArgumentError) as err:
        return Clause("homology-graph", ClauseStatus.FAILS, str(err))
    if same is None:
        return Clause("homology-graph", ClauseStatus.UNKNOWN, "unknown pairs")
    return Clause(
        "homology-graph", ClauseStatus.HOLDS if same else ClauseStatus.FAILS
    )


def certify(
    A: Hda,
    B: Hda,
    report: Optional[ReductionReport] = None,
    amap: Optional[AbstractionMap] = None,
    options: Optional[CertifyOptions] = None,
    settings: Optional[Settings] = None,
) -> CertificationReport:
    """
    Check that B is a topological abstraction of A.

    With a report, B must be the replay of the report on A and the map is
    the identity on surviving cubes plus the expansion of merged edges.
    Without one, ``amap`` declares the map by hand and the verdict is at
    most ``certified-bounded``. Without either, B is compared with A under
    the identity.

    Raises:
        IntegrityError: the report does not replay to B.
    """
    options = options or CertifyOptions()
    settings = settings or get_settings()
    t0 = time.time()

    judgments: Optional[list[Judgment]] = None
    declared = amap is not None and (amap.declared or report is None)
    if report is not None or amap is None:
        if report is None:
            report = ReductionReport(A.pcs.counts(), A.pcs.counts())
        replayed, judgments = _apply(A, report, options.recheck, settings)
        if replayed != B:
            raise IntegrityError("report does not replay to the given model")
        if not options.recheck:
            judgments = None
        amap = amap or report.abstraction_map(B)

    clauses = [_distinguished_clause(A, B, amap), _homotopy_clause(A, B, judgments)]
    clauses.append(_trace_clause(A, B, amap, options, settings))
    clauses.append(_graph_clause(A, B, amap, options, settings))

    statuses = {c.status for c in clauses}
    if ClauseStatus.FAILS in statuses:
        verdict = Verdict.REFUTED
    elif ClauseStatus.UNKNOWN in statuses:
        verdict = Verdict.INCONCLUSIVE
    elif ClauseStatus.BOUNDED in statuses or declared:
        verdict = Verdict.CERTIFIED_BOUNDED
    else:
        verdict = Verdict.CERTIFIED
    t1 = time.time()
    logger.info(
        f"Certification {verdict.value} in {round((t1 - t0) / 60, 2)} mins"
    )
    return CertificationReport(verdict, clauses)


@validate_call
def declared_map(
    vertex_map: dict[int, int],
    edge_expansion: Optional[dict[int, list[int]]] = None,
) -> AbstractionMap:
    """An abstraction map given by hand."""
    return AbstractionMap(
        dict(vertex_map),
        {e: tuple(chain) for e, chain in (edge_expansion or {}).items()},
        declared=True,
    )
