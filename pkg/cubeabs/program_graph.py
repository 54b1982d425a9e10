"""
Program graphs: processes over shared variables with finite domains.

A program graph is written in a small line-oriented language::

    # process i of a two-process protocol
    var b_0 : 0..1 = 0
    var t : 0..1 = 0|1
    loc l0
    loc l1
    init l0
    final l0
    edge l0 -> l1 b_0:=1
    edge l1 -> l0 [b_1=0 | t=0] crit

Guards combine ``=`` and ``!=`` atoms with ``&``, ``|`` and parentheses.
An action is a name or a comma separated list of assignments whose right
hand sides are a variable, a literal or a sum/difference of two of them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Union
import re

from ._logger import logger
from .errors import ParseError

logger.debug(f"Loading module {__name__}.")

__all__ = [
    "Assignment",
    "Compare",
    "Connective",
    "Instruction",
    "ProgramGraph",
    "Term",
    "Variable",
    "load_program_graph",
    "parse_program_graph",
]

Valuation = Mapping[str, int]


# syntax tree


@dataclass(frozen=True)
class Term:
    """A variable, a literal, or ``left op right``."""

    left: Union[str, int]
    op: Optional[str] = None
    right: Union[str, int, None] = None

    @staticmethod
    def _atom(a: Union[str, int], valuation: Valuation) -> int:
        return a if isinstance(a, int) else valuation[a]

    def evaluate(self, valuation: Valuation) -> int:
        value = self._atom(self.left, valuation)
        if self.op == "+":
            return value + self._atom(self.right, valuation)
        if self.op == "-":
            return value - self._atom(self.right, valuation)
        return value

    def variables(self) -> set[str]:
        return {a for a in (self.left, self.right) if isinstance(a, str)}

    def __str__(self) -> str:
        if self.op is None:
            return str(self.left)
        return f"{self.left}{self.op}{self.right}"


@dataclass(frozen=True)
class Compare:
    left: Term
    op: str
    right: Term

    def evaluate(self, valuation: Valuation) -> bool:
        equal = self.left.evaluate(valuation) == self.right.evaluate(valuation)
        return equal if self.op == "=" else not equal

    def variables(self) -> set[str]:
        return self.left.variables() | self.right.variables()

    def __str__(self) -> str:
        return f"{self.left}{self.op}{self.right}"


@dataclass(frozen=True)
class Connective:
    op: str
    parts: tuple["Guard", ...]

    def evaluate(self, valuation: Valuation) -> bool:
        if self.op == "&":
            return all(p.evaluate(valuation) for p in self.parts)
        return any(p.evaluate(valuation) for p in self.parts)

    def variables(self) -> set[str]:
        return set().union(*(p.variables() for p in self.parts))

    def __str__(self) -> str:
        return "(" + f" {self.op} ".join(str(p) for p in self.parts) + ")"


Guard = Union[Compare, Connective]


@dataclass(frozen=True)
class Assignment:
    variable: str
    value: Term

    def __str__(self) -> str:
        return f"{self.variable}:={self.value}"


@dataclass(frozen=True)
class Variable:
    name: str
    low: int
    high: int
    initial: tuple[int, ...]

    @property
    def domain(self) -> range:
        return range(self.low, self.high + 1)


@dataclass(frozen=True)
class Instruction:
    source: str
    target: str
    guard: Optional[Guard] = None
    action: Optional[str] = None
    assignments: tuple[Assignment, ...] = ()

    def enabled(self, valuation: Valuation) -> bool:
        return self.guard is None or self.guard.evaluate(valuation)

    def effect(self, valuation: Valuation) -> dict[str, int]:
        """Simultaneous assignment; right hand sides read the old values."""
        out = dict(valuation)
        for a in self.assignments:
            out[a.variable] = a.value.evaluate(valuation)
        return out

    def __str__(self) -> str:
        guard = f"[{self.guard}] " if self.guard is not None else ""
        body = self.action or ", ".join(str(a) for a in self.assignments)
        return f"{self.source} -> {self.target} {guard}{body}"


@dataclass
class ProgramGraph:
    variables: dict[str, Variable] = field(default_factory=dict)
    locations: list[str] = field(default_factory=list)
    initial: Optional[str] = None
    finals: list[str] = field(default_factory=list)
    instructions: list[Instruction] = field(default_factory=list)
    name: str = ""

    def outgoing(self, location: str) -> list[tuple[int, Instruction]]:
        return [
            (j, ins)
            for j, ins in enumerate(self.instructions)
            if ins.source == location
        ]

    def location_index(self, location: str) -> int:
        return self.locations.index(location)


# lexer


_TOKENS = re.compile(
    r"""
    (?P<ws>[ \t]+)
  | (?P<arrow>->)
  | (?P<assign>:=)
  | (?P<range>\.\.)
  | (?P<ne>!=)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>[=:&|()\[\],+\-])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    column: int


def _tokenize(line: str, lineno: int) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(line):
        m = _TOKENS.match(line, pos)
        if m is None:
            raise ParseError(f"unexpected character {line[pos]!r}", lineno, pos + 1)
        kind = m.lastgroup
        if kind != "ws":
            text = m.group()
            tokens.append(_Token(text if kind == "sym" else kind, text, pos + 1))
        pos = m.end()
    return tokens


class _Line:
    """Cursor over the tokens of one source line."""

    def __init__(self, tokens: list[_Token], lineno: int, width: int):
        self.tokens = tokens
        self.lineno = lineno
        self.width = width
        self.pos = 0

    def peek(self) -> Optional[_Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def error(self, message: str, token: Optional[_Token] = None) -> ParseError:
        token = token or self.peek()
        column = token.column if token else self.width + 1
        return ParseError(message, self.lineno, column)

    def take(self, kind: str) -> _Token:
        token = self.peek()
        if token is None or token.kind != kind:
            found = "end of line" if token is None else repr(token.text)
            raise self.error(f"expected {kind}, found {found}", token)
        self.pos += 1
        return token

    def accept(self, kind: str) -> Optional[_Token]:
        token = self.peek()
        if token is not None and token.kind == kind:
            self.pos += 1
            return token
        return None

    def end(self) -> None:
        token = self.peek()
        if token is not None:
            raise self.error(f"unexpected {token.text!r}", token)


# parser


class _Parser:
    def __init__(self, name: str):
        self.graph = ProgramGraph(name=name)

    # expressions

    def atom(self, line: _Line) -> Union[str, int]:
        token = line.peek()
        if line.accept("int"):
            return int(token.text)
        if line.accept("ident"):
            if token.text not in self.graph.variables:
                raise line.error(f"undeclared variable {token.text!r}", token)
            return token.text
        raise line.error("expected a variable or a number", token)

    def term(self, line: _Line) -> Term:
        left = self.atom(line)
        for op in ("+", "-"):
            if line.accept(op):
                return Term(left, op, self.atom(line))
        return Term(left)

    def compare(self, line: _Line) -> Guard:
        if line.accept("("):
            inner = self.disjunction(line)
            line.take(")")
            return inner
        left = self.term(line)
        if line.accept("="):
            op = "="
        elif line.accept("ne"):
            op = "!="
        else:
            raise line.error("expected '=' or '!='")
        return Compare(left, op, self.term(line))

    def conjunction(self, line: _Line) -> Guard:
        parts = [self.compare(line)]
        while line.accept("&"):
            parts.append(self.compare(line))
        return parts[0] if len(parts) == 1 else Connective("&", tuple(parts))

    def disjunction(self, line: _Line) -> Guard:
        parts = [self.conjunction(line)]
        while line.accept("|"):
            parts.append(self.conjunction(line))
        return parts[0] if len(parts) == 1 else Connective("|", tuple(parts))

    # records

    def location(self, line: _Line) -> str:
        token = line.take("ident")
        if token.text not in self.graph.locations:
            raise line.error(f"undeclared location {token.text!r}", token)
        return token.text

    def var(self, line: _Line) -> None:
        token = line.take("ident")
        if token.text in self.graph.variables:
            raise line.error(f"variable {token.text!r} declared twice", token)
        line.take(":")
        low = int(line.take("int").text)
        line.take("range")
        high = int(line.take("int").text)
        if high < low:
            raise line.error("empty domain")
        line.take("=")
        initial = [line.take("int")]
        while line.accept("|"):
            initial.append(line.take("int"))
        line.end()
        for t in initial:
            if not low <= int(t.text) <= high:
                raise line.error(f"initial value {t.text} outside {low}..{high}", t)
        self.graph.variables[token.text] = Variable(
            token.text, low, high, tuple(int(t.text) for t in initial)
        )

    def loc(self, line: _Line) -> None:
        token = line.take("ident")
        if token.text in self.graph.locations:
            raise line.error(f"location {token.text!r} declared twice", token)
        line.end()
        self.graph.locations.append(token.text)

    def init(self, line: _Line) -> None:
        if self.graph.initial is not None:
            raise line.error("initial location given twice")
        self.graph.initial = self.location(line)
        line.end()

    def final(self, line: _Line) -> None:
        self.graph.finals.append(self.location(line))
        line.end()

    def edge(self, line: _Line) -> None:
        source = self.location(line)
        line.take("arrow")
        target = self.location(line)
        guard = None
        if line.accept("["):
            guard = self.disjunction(line)
            line.take("]")

        token = line.peek()
        if token is None:
            raise line.error("missing action")
        if token.kind == "ident" and (
            line.pos + 1 >= len(line.tokens)
            or line.tokens[line.pos + 1].kind != "assign"
        ):
            line.pos += 1
            line.end()
            self.graph.instructions.append(
                Instruction(source, target, guard, action=token.text)
            )
            return

        assignments = []
        seen = set()
        while True:
            var_token = line.take("ident")
            if var_token.text not in self.graph.variables:
                raise line.error(
                    f"undeclared variable {var_token.text!r}", var_token
                )
            if var_token.text in seen:
                raise line.error(f"{var_token.text!r} assigned twice", var_token)
            seen.add(var_token.text)
            line.take("assign")
            value_token = line.peek()
            value = self.term(line)
            if value.op is None and isinstance(value.left, int):
                variable = self.graph.variables[var_token.text]
                if value.left not in variable.domain:
                    raise line.error(
                        f"value {value.left} outside the domain of "
                        f"{var_token.text}",
                        value_token,
                    )
            assignments.append(Assignment(var_token.text, value))
            if not line.accept(","):
                break
        line.end()
        self.graph.instructions.append(
            Instruction(source, target, guard, assignments=tuple(assignments))
        )

    def parse(self, text: str) -> ProgramGraph:
        keywords = {
            "var": self.var,
            "loc": self.loc,
            "init": self.init,
            "final": self.final,
            "edge": self.edge,
        }
        for lineno, raw in enumerate(text.splitlines(), start=1):
            body = raw.split("#", 1)[0].rstrip()
            if not body.strip():
                continue
            line = _Line(_tokenize(body, lineno), lineno, len(body))
            head = line.take("ident")
            handler = keywords.get(head.text)
            if handler is None:
                raise line.error(f"unknown record {head.text!r}", head)
            handler(line)

        if not self.graph.locations:
            raise ParseError("program graph declares no location", 1)
        if self.graph.initial is None:
            raise ParseError("program graph has no initial location", 1)
        return self.graph


def parse_program_graph(text: str, name: str = "") -> ProgramGraph:
    """
    Parse a program graph.

    Raises:
        ParseError: syntax or type error, with line and column.
    """
    graph = _Parser(name).parse(text)
    logger.debug(
        f"Parsed program graph {name or '<text>'}: {len(graph.locations)} "
        f"locations, {len(graph.instructions)} instructions"
    )
    return graph


def load_program_graph(path) -> ProgramGraph:
    with open(path, "r") as f:
        return parse_program_graph(f.read(), name=str(path))

