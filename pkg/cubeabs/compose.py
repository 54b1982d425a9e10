"""
Parallel composition of program graphs into an HDA.

Vertices are the accessible global states (a location per process and a
valuation of the shared variables), edges are enabled instructions labelled
with the process id, and a k-cube fills every set of k enabled instructions
of distinct processes whose k! interleavings are all executable and reach
the same state.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations, permutations, product
from typing import Iterable, Optional, Sequence
import time

from pydantic import BaseModel
from tqdm import tqdm

from ._logger import logger
from .config import Settings, get_settings
from .errors import ArgumentError, PreconditionError, ResourceError
from .hda import Hda
from .precubical import PrecubicalSet
from .program_graph import Instruction, ProgramGraph, Variable

logger.debug(f"Loading module {__name__}.")

__all__ = ["ComposeOptions", "GlobalState", "compose", "merge_variables"]


@dataclass(frozen=True, order=True)
class GlobalState:
    locations: tuple[int, ...]
    values: tuple[int, ...]


Move = tuple[int, int]  # (process id, instruction index)


class ComposeModel(BaseModel):
    shared: Optional[list[str]] = None
    finals: Optional[list[list[str]]] = None
    max_degree: Optional[int] = None
    budget_states: Optional[int] = None


class ComposeOptions:
    """
    Args:
        shared: variables expected to be shared; when given, every variable
            declared by more than one process must be listed.
        finals: final location tuples; by default the product of the
            processes' ``final`` locations.
        max_degree: largest cube dimension to fill; ``settings.max_degree``
            when None.
        budget_states: state budget; ``settings.budget_states`` when None.
    """

    def __init__(
        self,
        shared: Optional[Sequence[str]] = None,
        finals: Optional[Sequence[Sequence[str]]] = None,
        max_degree: Optional[int] = None,
        budget_states: Optional[int] = None,
    ):
        model = ComposeModel(
            shared=list(shared) if shared is not None else None,
            finals=[list(f) for f in finals] if finals is not None else None,
            max_degree=max_degree,
            budget_states=budget_states,
        ).model_dump()
        self.shared = model["shared"]
        self.finals = model["finals"]
        self.max_degree = model["max_degree"]
        self.budget_states = model["budget_states"]


def merge_variables(
    pgs: Sequence[ProgramGraph], shared: Optional[Iterable[str]] = None
) -> dict[str, Variable]:
    """Union of the declarations; a variable declared twice must agree."""
    merged: dict[str, Variable] = {}
    owners: dict[str, int] = {}
    for pg in pgs:
        for name, var in pg.variables.items():
            if name in merged and merged[name] != var:
                raise ArgumentError(
                    f"variable {name} declared inconsistently across processes"
                )
            merged[name] = var
            owners[name] = owners.get(name, 0) + 1
    if shared is not None:
        shared = set(shared)
        unknown = sorted(shared - set(merged))
        if unknown:
            raise ArgumentError(f"shared variables {unknown} are not declared")
        undeclared = sorted(n for n, c in owners.items() if c > 1 and n not in shared)
        if undeclared:
            raise ArgumentError(
                f"variables {undeclared} appear in several processes but are "
                f"not declared shared"
            )
    return dict(sorted(merged.items()))


class _System:
    def __init__(self, pgs: Sequence[ProgramGraph], variables: dict[str, Variable]):
        self.pgs = list(pgs)
        self.variables = variables
        self.names = list(variables)

    def valuation(self, s: GlobalState) -> dict[str, int]:
        return dict(zip(self.names, s.values))

    def instruction(self, move: Move) -> Instruction:
        pid, j = move
        return self.pgs[pid].instructions[j]

    def moves(self, s: GlobalState) -> list[Move]:
        val = self.valuation(s)
        out = []
        for pid, pg in enumerate(self.pgs):
            here = pg.locations[s.locations[pid]]
            for j, ins in pg.outgoing(here):
                if ins.enabled(val):
                    out.append((pid, j))
        return out

    def execute(self, s: GlobalState, move: Move) -> Optional[GlobalState]:
        """The successor, or None when the move is not enabled at s."""
        pid, j = move
        pg = self.pgs[pid]
        ins = pg.instructions[j]
        if pg.locations[s.locations[pid]] != ins.source:
            return None
        val = self.valuation(s)
        if not ins.enabled(val):
            return None
        new = ins.effect(val)
        for name, value in new.items():
            if value not in self.variables[name].domain:
                raise PreconditionError(
                    f"instruction '{ins}' of process {pid} assigns {value} to "
                    f"{name}, outside its domain"
                )
        locations = list(s.locations)
        locations[pid] = pg.location_index(ins.target)
        return GlobalState(tuple(locations), tuple(new[n] for n in self.names))

    def label(self, s: GlobalState, move: Move) -> str:
        pid, _ = move
        ins = self.instruction(move)
        if ins.action is not None:
            return f"{ins.action}_{pid}"
        val = self.valuation(s)
        return ",".join(
            f"{a.variable}:=_{pid} {a.value.evaluate(val)}" for a in ins.assignments
        )

    def name(self, s: GlobalState) -> str:
        locs = ",".join(
            pg.locations[k] for pg, k in zip(self.pgs, s.locations)
        )
        vals = ",".join(f"{n}={v}" for n, v in zip(self.names, s.values))
        return f"{locs}|{vals}" if vals else locs

    def diamond(self, s: GlobalState, moves: Sequence[Move]) -> bool:
        """All interleavings executable and confluent."""
        ends = set()
        for order in permutations(moves):
            current = s
            for move in order:
                current = self.execute(current, move)
                if current is None:
                    return False
            ends.add(current)
        return len(ends) == 1


def _initial_states(system: _System) -> list[GlobalState]:
    for pid, pg in enumerate(system.pgs):
        if pg.initial is None:
            raise ArgumentError(f"process {pid} has no initial location")
    locations = tuple(pg.location_index(pg.initial) for pg in system.pgs)
    choices = [system.variables[n].initial for n in system.names]
    return sorted(GlobalState(locations, values) for values in product(*choices))


def _explore(
    system: _System, starts: list[GlobalState], budget: int, progress: bool
) -> set[GlobalState]:
    seen = set(starts)
    todo = deque(starts)
    with tqdm(desc="compose", unit=" states", disable=not progress) as bar:
        while todo:
            s = todo.popleft()
            bar.update(1)
            for move in system.moves(s):
                t = system.execute(s, move)
                if t not in seen:
                    seen.add(t)
                    if len(seen) > budget:
                        raise ResourceError(
                            f"state space exceeds {budget} states",
                            budget="budget_states",
                            limit=budget,
                        )
                    todo.append(t)
    return seen


def compose(
    pgs: Sequence[ProgramGraph],
    options: Optional[ComposeOptions] = None,
    settings: Optional[Settings] = None,
) -> Hda:
    """
    Compose processes; process ids follow list order.

    Raises:
        ArgumentError: inconsistent variable declarations or no processes.
        ResourceError: more accessible states than the state budget.
    """
    if not pgs:
        raise ArgumentError("compose needs at least one program graph")
    options = options or ComposeOptions()
    settings = settings or get_settings()
    budget = options.budget_states or settings.budget_states
    max_degree = (
        options.max_degree if options.max_degree is not None else settings.max_degree
    )
    t0 = time.time()

    system = _System(pgs, merge_variables(pgs, options.shared))
    starts = _initial_states(system)
    states = sorted(_explore(system, starts, budget, settings.progress))
    vid = {s: j for j, s in enumerate(states)}

    dims: dict[int, int] = {j: 0 for j in range(len(states))}
    faces: dict[int, tuple] = {}
    labels: dict[int, tuple[str, ...]] = {}
    next_id = len(states)

    # edges and cubes keyed by (base state, sorted moves)
    cube_ids: dict[tuple[GlobalState, tuple[Move, ...]], int] = {}
    for s in states:
        for move in system.moves(s):
            t = system.execute(s, move)
            cube_ids[(s, (move,))] = next_id
            dims[next_id] = 1
            faces[next_id] = ((vid[s], vid[t]),)
            labels[next_id] = (system.label(s, move),)
            next_id += 1

    for k in range(2, max_degree + 1):
        found = []
        for s in states:
            enabled = system.moves(s)
            for combo in combinations(enabled, k):
                if len({pid for pid, _ in combo}) != k:
                    continue
                if not system.diamond(s, combo):
                    continue
                cube_faces = []
                for i, move in enumerate(combo):
                    rest = combo[:i] + combo[i + 1:]
                    front = cube_ids.get((s, rest))
                    back = cube_ids.get((system.execute(s, move), rest))
                    if front is None or back is None:
                        break
                    cube_faces.append((front, back))
                else:
                    found.append(((vid[s], combo), s, tuple(cube_faces)))
        if not found:
            break
        for key, s, cube_faces in sorted(found, key=lambda f: f[0]):
            cube_ids[(s, key[1])] = next_id
            dims[next_id] = k
            faces[next_id] = cube_faces
            next_id += 1

    if options.finals is not None:
        final_tuples = {tuple(f) for f in options.finals}
    else:
        final_tuples = set(product(*(pg.finals for pg in pgs)))
    for f in final_tuples:
        if len(f) != len(pgs):
            raise ArgumentError(f"final tuple {f} does not name every process")
    final = [
        vid[s]
        for s in states
        if tuple(pg.locations[k] for pg, k in zip(pgs, s.locations)) in final_tuples
    ]

    pcs = PrecubicalSet(dims, faces, {vid[s]: system.name(s) for s in states})
    A = Hda(pcs, [vid[s] for s in starts], final, labels)
    t1 = time.time()
    logger.info(
        f"Composed {len(pgs)} processes into {pcs.counts()} cubes "
        f"in {round((t1 - t0) / 60, 2)} mins"
    )
    return A
