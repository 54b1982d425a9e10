"""
Labelled higher-dimensional automata.

An HDA is a precubical set with initial and final vertices and a labelling of
its edges. Labels are words over a finite alphabet: plain edges carry one
letter, edges produced by merging carry the concatenation of their parts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from collections import Counter
from typing import Iterable, Mapping, Optional, Sequence, Union
import os

import pandas as pd

from ._logger import logger
from .automata import Nfa
from .dipath import Path, is_path
from .errors import ArgumentError, PreconditionError
from .precubical import (
    PrecubicalSet,
    PrecubicalSubset,
    ValidationReport,
    Violation,
    reachability,
    validate_precubical,
)

logger.debug(f"Loading module {__name__}.")

Word = tuple[str, ...]

__all__ = [
    "Accessibility",
    "Hda",
    "Word",
    "accessibility",
    "as_word",
    "extended_label",
    "inventory_frame",
    "isomorphic",
    "language_automaton",
    "letter_automaton",
    "restrict",
    "validate_hda",
]


def as_word(label: Union[str, Sequence[str]]) -> Word:
    """Normalize a label; strings are split on ``;``."""
    if isinstance(label, str):
        return tuple(part.strip() for part in label.split(";") if part.strip())
    return tuple(label)


def word_text(word: Word) -> str:
    return ";".join(word)


@dataclass(frozen=True)
class Hda:
    pcs: PrecubicalSet
    init: frozenset[int] = frozenset()
    final: frozenset[int] = frozenset()
    labels: Mapping[int, Word] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "init", frozenset(self.init))
        object.__setattr__(self, "final", frozenset(self.final))
        object.__setattr__(
            self, "labels", {int(e): as_word(w) for e, w in self.labels.items()}
        )

    def __repr__(self) -> str:
        return (
            f"Hda(counts={self.pcs.counts()}, init={sorted(self.init)}, "
            f"final={sorted(self.final)})"
        )

    def label(self, e: int) -> Word:
        try:
            return self.labels[e]
        except KeyError:
            raise ArgumentError(f"edge {e} has no label") from None

    @property
    def alphabet(self) -> frozenset[Word]:
        """Occurring edge labels, composite labels included."""
        return frozenset(self.labels.values())

    @property
    def letters(self) -> frozenset[str]:
        return frozenset(a for w in self.labels.values() for a in w)

    def with_pcs(self, pcs: PrecubicalSet) -> "Hda":
        """Same distinguished vertices and labels on a sub- or superset."""
        return Hda(
            pcs,
            self.init,
            self.final,
            {e: w for e, w in self.labels.items() if e in pcs},
        )


def validate_hda(A: Hda, max_degree: Optional[int] = None) -> ValidationReport:
    """Precubical validity, I and F inside the vertices, label coherence."""
    P = A.pcs
    report = validate_precubical(P, max_degree)
    violations: list[Violation] = []

    for name, marked in (("init", A.init), ("final", A.final)):
        for v in sorted(marked):
            if v not in P or P.degree(v) != 0:
                violations.append(Violation(f"{name}-not-vertex", v, ()))

    for e in P.edges:
        if e not in A.labels:
            violations.append(Violation("unlabeled-edge", e, ()))
    for e in sorted(A.labels):
        if e not in P or P.degree(e) != 1:
            violations.append(Violation("label-not-edge", e, ()))

    if report.ok:
        for x in P.squares:
            for i in (1, 2):
                lo, hi = P.face(x, 0, i), P.face(x, 1, i)
                if A.labels.get(lo) != A.labels.get(hi):
                    violations.append(Violation("label-coherence", x, (i,)))

    return report.merged(ValidationReport.from_violations(violations))


def extended_label(A: Hda, path: Path) -> Word:
    """Concatenated labels along a path; the empty word for length 0."""
    if not is_path(A.pcs, path):
        raise ArgumentError("not a path of the model")
    word: list[str] = []
    for e in path.edges:
        word.extend(A.label(e))
    return tuple(word)


def language_automaton(A: Hda) -> Nfa:
    """The 1-skeleton read as an automaton over edge labels."""
    P = A.pcs
    return Nfa(
        P.vertices,
        A.alphabet,
        [(P.source(e), A.label(e), P.target(e)) for e in P.edges],
        A.init,
        A.final,
    )


def letter_automaton(A: Hda) -> Nfa:
    """
    Automaton over single letters: an edge labelled ``a1;...;am`` becomes a
    chain of m transitions through fresh states.
    """
    P = A.pcs
    transitions = []
    epsilon = []
    for e in P.edges:
        word = A.label(e)
        src, tgt = ("v", P.source(e)), ("v", P.target(e))
        if not word:
            epsilon.append((src, tgt))
            continue
        chain = [src] + [("e", e, j) for j in range(1, len(word))] + [tgt]
        for j, a in enumerate(word):
            transitions.append((chain[j], a, chain[j + 1]))
    return Nfa(
        [("v", v) for v in P.vertices],
        A.letters,
        transitions,
        [("v", v) for v in A.init],
        [("v", v) for v in A.final],
        epsilon,
    )


@dataclass(frozen=True)
class Accessibility:
    accessible: bool
    coaccessible: bool
    offenders: frozenset[int]
    unreachable: frozenset[int] = frozenset()
    dead: frozenset[int] = frozenset()


def accessibility(A: Hda) -> Accessibility:
    """Whether every vertex is reachable from I and reaches F."""
    P = A.pcs
    reach = reachability(P)
    reached = frozenset().union(*(reach.reach[v] for v in A.init))
    unreachable = frozenset(v for v in P.vertices if v not in reached)
    dead = frozenset(
        v for v in P.vertices if not (reach.reach[v] & A.final)
    )
    return Accessibility(
        accessible=not unreachable,
        coaccessible=not dead,
        offenders=unreachable | dead,
        unreachable=unreachable,
        dead=dead,
    )


def restrict(A: Hda, Q: Union[PrecubicalSubset, Iterable[int]]) -> Hda:
    """The HDA on a precubical subset, keeping I, F and labels."""
    members = Q.members if isinstance(Q, PrecubicalSubset) else frozenset(Q)
    missing = sorted((A.init | A.final) - members)
    if missing:
        raise PreconditionError(
            f"initial or final vertices {missing} are not in the subset"
        )
    return A.with_pcs(A.pcs.restricted(members))


# comparison and export


def _vertex_signature(A: Hda, v: int) -> tuple:
    P = A.pcs
    return (
        v in A.init,
        v in A.final,
        tuple(sorted(A.label(e) for e in P.out_edges(v))),
        tuple(sorted(A.label(e) for e in P.in_edges(v))),
    )


def _edge_table(A: Hda) -> Counter:
    P = A.pcs
    return Counter((P.source(e), P.target(e), A.label(e)) for e in P.edges)


def _square_table(A: Hda, vmap: Mapping[int, int]) -> Counter:
    P = A.pcs
    table: Counter = Counter()
    for x in P.squares:
        table[
            tuple(
                (vmap[P.source(f)], vmap[P.target(f)], A.label(f))
                for pair in P.faces_of(x)
                for f in pair
            )
        ] += 1
    return table


def isomorphic(A: Hda, B: Hda) -> bool:
    """
    Isomorphism up to vertex renaming for low-dimensional HDAs: a vertex
    bijection preserving I, F, labelled edge multisets and the boundary
    edges of squares. Intended for small models.
    """
    P, Q = A.pcs, B.pcs
    if P.counts() != Q.counts() or len(A.init) != len(B.init):
        return False
    if len(A.final) != len(B.final):
        return False
    if P.dimension > 2:
        raise ArgumentError("isomorphism test supports dimension up to 2")

    sig_a = {v: _vertex_signature(A, v) for v in P.vertices}
    sig_b = {w: _vertex_signature(B, w) for w in Q.vertices}
    if Counter(sig_a.values()) != Counter(sig_b.values()):
        return False

    edges_a, edges_b = _edge_table(A), _edge_table(B)
    order = sorted(P.vertices, key=lambda v: (sig_a[v], v))
    candidates = {v: [w for w in Q.vertices if sig_b[w] == sig_a[v]] for v in order}
    target_squares = _square_table(B, {w: w for w in Q.vertices})

    def consistent(vmap: dict[int, int]) -> bool:
        for (s, t, w), n in edges_a.items():
            if s in vmap and t in vmap:
                if edges_b.get((vmap[s], vmap[t], w), 0) != n:
                    return False
        return True

    def extend(j: int, vmap: dict[int, int], used: set[int]) -> bool:
        if j == len(order):
            return _square_table(A, vmap) == target_squares
        v = order[j]
        for w in candidates[v]:
            if w in used:
                continue
            vmap[v] = w
            used.add(w)
            if consistent(vmap) and extend(j + 1, vmap, used):
                return True
            del vmap[v]
            used.discard(w)
        return False

    return extend(0, {}, set())


def inventory_frame(A: Hda) -> pd.DataFrame:
    """One row per cube: id, degree, name, label, faces, init/final flags."""
    P = A.pcs
    rows = []
    for x in P.ids:
        rows.append(
            {
                "id": x,
                "degree": P.degree(x),
                "name": P.name(x) or "",
                "label": word_text(A.labels[x]) if x in A.labels else "",
                "faces": " ".join(
                    f"{a}/{b}" for a, b in P.faces_of(x)
                ),
                "init": x in A.init,
                "final": x in A.final,
            }
        )
    return pd.DataFrame.from_records(
        rows,
        columns=["id", "degree", "name", "label", "faces", "init", "final"],
    )


def export_inventory(A: Hda, output_dir: Optional[str] = None) -> str:
    """Write the cube inventory as ``inventory.csv``; returns the path."""
    full_path = os.path.join(output_dir or os.getcwd(), "inventory.csv")
    inventory_frame(A).to_csv(full_path, index=False)
    logger.info(f"Cube inventory is written: {full_path}")
    return full_path
