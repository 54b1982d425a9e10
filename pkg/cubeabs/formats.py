"""
Plain-text exchange formats.

``pcs v1``::

    pcs v1
    cube 0 dim 0
    cube 2 dim 1
    face 2 0 1 0
    face 2 1 1 1
    name 0 "l0,l0|x=0,y=0"

``hda v1`` adds ``init <id>``, ``final <id>`` and ``label <edge> "<word>"``
records, composite labels joining letters with ``;``. Records are split
with shell quoting rules, so names and labels containing blanks are quoted.
Paths are written one per line as ``path <start> : <edge> ...``; property
files start with ``prop v1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path as FilePath
from typing import Iterable, Union
import shlex

from ._logger import logger
from .automata import Nfa
from .dipath import Path
from .errors import ArgumentError, LoadError
from .hda import Hda, word_text
from .precubical import PrecubicalSet
from .properties import PropertyAutomaton, build_property, combine
from .reduce import ReductionReport

logger.debug(f"Loading module {__name__}.")

__all__ = [
    "PropertySpec",
    "dumps_hda",
    "dumps_paths",
    "dumps_pcs",
    "dumps_property",
    "load_model",
    "loads_hda",
    "loads_paths",
    "loads_pcs",
    "loads_property",
    "read_hda",
    "read_paths",
    "read_property",
    "read_report",
    "write_hda",
    "write_paths",
    "write_report",
]

BUILTIN_PREFIX = "builtin:"


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _records(text: str) -> Iterable[tuple[int, list[str]]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            yield lineno, shlex.split(line)
        except ValueError as e:
            raise LoadError(f"unreadable record: {e}", lineno) from e


def _int(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise LoadError(f"expected an integer, got {token!r}", lineno) from None


# precubical sets and HDAs


def _pcs_lines(P: PrecubicalSet) -> list[str]:
    lines = [f"cube {x} dim {P.degree(x)}" for x in P.ids]
    for x in P.ids:
        for i, pair in enumerate(P.faces_of(x), start=1):
            for k in (0, 1):
                lines.append(f"face {x} {k} {i} {pair[k]}")
    for x, name in sorted(P.names.items()):
        lines.append(f"name {x} {_quote(name)}")
    return lines


def dumps_pcs(P: PrecubicalSet) -> str:
    return "\n".join(["pcs v1"] + _pcs_lines(P)) + "\n"


def dumps_hda(A: Hda) -> str:
    lines = ["hda v1"] + _pcs_lines(A.pcs)
    lines += [f"init {v}" for v in sorted(A.init)]
    lines += [f"final {v}" for v in sorted(A.final)]
    lines += [
        f"label {e} {_quote(word_text(w))}" for e, w in sorted(A.labels.items())
    ]
    return "\n".join(lines) + "\n"


@dataclass
class _Loaded:
    header: str
    dims: dict[int, int] = field(default_factory=dict)
    faces: dict[tuple[int, int, int], int] = field(default_factory=dict)
    names: dict[int, str] = field(default_factory=dict)
    init: list[int] = field(default_factory=list)
    final: list[int] = field(default_factory=list)
    labels: dict[int, str] = field(default_factory=dict)


def _parse(text: str, headers: tuple[str, ...]) -> _Loaded:
    records = iter(_records(text))
    first = next(records, None)
    if first is None or " ".join(first[1]) not in headers:
        raise LoadError(f"expected header {' or '.join(headers)}", first[0] if first else 1)
    out = _Loaded(" ".join(first[1]))
    hda_records = out.header == "hda v1"

    for lineno, parts in records:
        head, args = parts[0], parts[1:]
        if head == "cube":
            if len(args) != 3 or args[1] != "dim":
                raise LoadError("cube record is 'cube <id> dim <n>'", lineno)
            x, n = _int(args[0], lineno), _int(args[2], lineno)
            if x in out.dims:
                raise LoadError(f"cube {x} declared twice", lineno)
            out.dims[x] = n
        elif head == "face":
            if len(args) != 4:
                raise LoadError("face record is 'face <id> <k> <i> <id2>'", lineno)
            x, k, i, y = (_int(a, lineno) for a in args)
            if k not in (0, 1):
                raise LoadError(f"face side must be 0 or 1, got {k}", lineno)
            if out.faces.get((x, k, i), y) != y:
                raise LoadError(f"conflicting face records for ({x}, {k}, {i})", lineno)
            out.faces[(x, k, i)] = y
        elif head == "name" and len(args) == 2:
            out.names[_int(args[0], lineno)] = args[1]
        elif hda_records and head in ("init", "final") and len(args) == 1:
            getattr(out, head).append(_int(args[0], lineno))
        elif hda_records and head == "label" and len(args) == 2:
            out.labels[_int(args[0], lineno)] = args[1]
        else:
            raise LoadError(f"unknown or malformed record {head!r}", lineno)
    return out


def _build_pcs(loaded: _Loaded) -> PrecubicalSet:
    faces: dict[int, list[tuple[int, int]]] = {}
    for x, n in loaded.dims.items():
        pairs = []
        for i in range(1, n + 1):
            try:
                pairs.append((loaded.faces[(x, 0, i)], loaded.faces[(x, 1, i)]))
            except KeyError:
                raise LoadError(f"cube {x} misses its faces at index {i}") from None
        faces[x] = pairs
    for (x, k, i), y in loaded.faces.items():
        if x not in loaded.dims or y not in loaded.dims:
            raise LoadError(f"face record ({x}, {k}, {i}) names an unknown cube")
        if not 1 <= i <= loaded.dims[x]:
            raise LoadError(f"face index {i} out of range for cube {x}")
    try:
        return PrecubicalSet(loaded.dims, faces, loaded.names)
    except ArgumentError as e:
        raise LoadError(str(e)) from e


def loads_pcs(text: str) -> PrecubicalSet:
    return _build_pcs(_parse(text, ("pcs v1",)))


def loads_hda(text: str) -> Hda:
    """Read an HDA; a ``pcs v1`` file gives an HDA without I, F or labels."""
    loaded = _parse(text, ("hda v1", "pcs v1"))
    P = _build_pcs(loaded)
    for v in loaded.init + loaded.final:
        if v not in P:
            raise LoadError(f"distinguished vertex {v} is not a cube")
    for e in loaded.labels:
        if e not in P:
            raise LoadError(f"label given for unknown cube {e}")
    return Hda(P, loaded.init, loaded.final, loaded.labels)


def read_hda(path: Union[str, FilePath]) -> Hda:
    with open(path, "r") as f:
        return loads_hda(f.read())


def write_hda(A: Hda, path: Union[str, FilePath]) -> None:
    with open(path, "w") as f:
        f.write(dumps_hda(A))
    logger.info(f"Model is written: {path}")


def load_model(spec: str) -> Hda:
    """A file path, or ``builtin:NAME`` for a built-in model."""
    if spec.startswith(BUILTIN_PREFIX):
        from .fixtures import builtin

        return builtin(spec[len(BUILTIN_PREFIX):])
    try:
        return read_hda(spec)
    except FileNotFoundError:
        raise ArgumentError(f"model file not found: {spec}") from None


# paths


def dumps_paths(paths: Iterable[Path]) -> str:
    return "".join(p.to_text() + "\n" for p in paths)


def loads_paths(text: str) -> list[Path]:
    """Paths are not checked against a model here; see ``make_path``."""
    out = []
    for lineno, parts in _records(text):
        if parts[0] != "path" or len(parts) < 3 or parts[2] != ":":
            raise LoadError("path record is 'path <start> : <edge> ...'", lineno)
        out.append(
            Path(
                _int(parts[1], lineno),
                tuple(_int(e, lineno) for e in parts[3:]),
                -1 if parts[3:] else _int(parts[1], lineno),
            )
        )
    return out


def read_paths(path: Union[str, FilePath]) -> list[Path]:
    with open(path, "r") as f:
        return loads_paths(f.read())


def write_paths(paths: Iterable[Path], path: Union[str, FilePath]) -> None:
    with open(path, "w") as f:
        f.write(dumps_paths(paths))


# reduction reports


def read_report(path: Union[str, FilePath]) -> ReductionReport:
    with open(path, "r") as f:
        return ReductionReport.from_text(f.read())


def write_report(report: ReductionReport, path: Union[str, FilePath]) -> None:
    with open(path, "w") as f:
        f.write(report.to_text())
    logger.info(f"Reduction report is written: {path}")


# properties


@dataclass
class PropertySpec:
    """
    A parsed property file: template instances and at most one explicit
    automaton, all conjoined. The alphabet is fixed when building.
    """

    templates: list[tuple[str, list[str]]] = field(default_factory=list)
    states: list[str] = field(default_factory=list)
    initial: list[str] = field(default_factory=list)
    accepting: list[str] = field(default_factory=list)
    transitions: list[tuple[str, str, str]] = field(default_factory=list)

    @property
    def has_automaton(self) -> bool:
        return bool(self.states or self.initial or self.transitions)

    def build(self, alphabet: Iterable[str]) -> PropertyAutomaton:
        """Explicit transition symbols extend the alphabet of every part."""
        sigma = frozenset(alphabet) | {a for _, a, _ in self.transitions}
        parts = [build_property(name, args, sigma) for name, args in self.templates]
        if self.has_automaton:
            nfa = Nfa(
                self.states, sigma, self.transitions, self.initial, self.accepting
            )
            parts.append(PropertyAutomaton(nfa, "explicit automaton"))
        if not parts:
            raise ArgumentError("property file defines no property")
        return parts[0] if len(parts) == 1 else combine("intersect", *parts)


def loads_property(text: str) -> PropertySpec:
    records = iter(_records(text))
    first = next(records, None)
    if first is None or first[1] != ["prop", "v1"]:
        raise LoadError("expected header prop v1", first[0] if first else 1)
    spec = PropertySpec()
    for lineno, parts in records:
        head, args = parts[0], parts[1:]
        if head == "template" and args:
            spec.templates.append((args[0], args[1:]))
        elif head == "state" and args:
            spec.states.extend(args)
        elif head == "init" and args:
            spec.initial.extend(args)
        elif head == "acc" and args:
            spec.accepting.extend(args)
        elif head == "trans" and len(args) == 3:
            spec.transitions.append((args[0], args[1], args[2]))
        else:
            raise LoadError(f"unknown or malformed record {head!r}", lineno)
    return spec


def dumps_property(spec: PropertySpec) -> str:
    lines = ["prop v1"]
    for name, args in spec.templates:
        lines.append(" ".join(["template", name] + [_quote(a) for a in args]))
    if spec.states:
        lines.append("state " + " ".join(_quote(s) for s in spec.states))
    if spec.initial:
        lines.append("init " + " ".join(_quote(s) for s in spec.initial))
    if spec.accepting:
        lines.append("acc " + " ".join(_quote(s) for s in spec.accepting))
    lines += [
        f"trans {_quote(p)} {_quote(a)} {_quote(q)}" for p, a, q in spec.transitions
    ]
    return "\n".join(lines) + "\n"


def read_property(path: Union[str, FilePath]) -> PropertySpec:
    with open(path, "r") as f:
        return loads_property(f.read())
