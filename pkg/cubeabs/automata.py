"""
Finite automata over hashable symbols.

Used for HDA languages (symbols are edge labels) and for property languages
(symbols are single actions). Boolean operations go through subset
construction; emptiness tests return a shortest witness, ties broken
lexicographically.
"""

from __future__ import annotations

from collections import deque
from typing import Hashable, Iterable, Optional, Sequence

from ._logger import logger
from .errors import ArgumentError

logger.debug(f"Loading module {__name__}.")

State = Hashable
Symbol = Hashable

__all__ = [
    "Nfa",
    "concat",
    "empty_language",
    "star_of",
    "symbol_key",
    "symbol_set",
    "universal",
    "word_automaton",
]


def symbol_key(a: Symbol) -> str:
    """Sort key making letters and composite labels comparable."""
    if isinstance(a, tuple):
        return ";".join(str(s) for s in a)
    return str(a)


class Nfa:
    """
    Nondeterministic automaton with optional epsilon moves.

    Args:
        states: declared states; endpoints of transitions are added.
        alphabet: the input alphabet.
        transitions: triples ``(p, a, q)``.
        initial: initial states.
        accepting: accepting states.
        epsilon: pairs ``(p, q)`` of silent moves.
    """

    def __init__(
        self,
        states: Iterable[State],
        alphabet: Iterable[Symbol],
        transitions: Iterable[tuple[State, Symbol, State]],
        initial: Iterable[State],
        accepting: Iterable[State],
        epsilon: Iterable[tuple[State, State]] = (),
    ):
        self.alphabet = frozenset(alphabet)
        self.initial = frozenset(initial)
        self.accepting = frozenset(accepting)

        delta: dict[tuple[State, Symbol], set[State]] = {}
        found = set(states) | set(self.initial) | set(self.accepting)
        for p, a, q in transitions:
            if a not in self.alphabet:
                raise ArgumentError(f"transition symbol {a!r} not in alphabet")
            delta.setdefault((p, a), set()).add(q)
            found.update((p, q))

        eps: dict[State, set[State]] = {}
        for p, q in epsilon:
            eps.setdefault(p, set()).add(q)
            found.update((p, q))

        self.states = frozenset(found)
        self.delta = {key: frozenset(v) for key, v in delta.items()}
        self.eps = {key: frozenset(v) for key, v in eps.items()}

    def __repr__(self) -> str:
        return (
            f"Nfa(states={len(self.states)}, "
            f"alphabet={len(self.alphabet)}, "
            f"transitions={sum(len(v) for v in self.delta.values())})"
        )

    def transitions(self) -> list[tuple[State, Symbol, State]]:
        return [(p, a, q) for (p, a), qs in self.delta.items() for q in qs]

    @property
    def sorted_alphabet(self) -> list[Symbol]:
        return sorted(self.alphabet, key=symbol_key)

    # runs

    def closure(self, states: Iterable[State]) -> frozenset[State]:
        """Epsilon closure."""
        seen = set(states)
        todo = list(seen)
        while todo:
            p = todo.pop()
            for q in self.eps.get(p, ()):
                if q not in seen:
                    seen.add(q)
                    todo.append(q)
        return frozenset(seen)

    def step(self, states: Iterable[State], a: Symbol) -> frozenset[State]:
        nxt: set[State] = set()
        for p in states:
            nxt.update(self.delta.get((p, a), ()))
        return self.closure(nxt)

    def accepts(self, word: Sequence[Symbol]) -> bool:
        current = self.closure(self.initial)
        for a in word:
            current = self.step(current, a)
            if not current:
                return False
        return bool(current & self.accepting)

    # constructions

    def determinize(
        self, alphabet: Optional[Iterable[Symbol]] = None, complete: bool = True
    ) -> "Nfa":
        """
        Subset construction; states of the result are integers in discovery
        order. With ``complete`` the result has a transition on every symbol
        of ``alphabet`` (defaults to the own alphabet).
        """
        sigma = sorted(
            self.alphabet if alphabet is None else frozenset(alphabet),
            key=symbol_key,
        )
        start = self.closure(self.initial)
        index = {start: 0}
        order = [start]
        transitions = []
        todo = deque([start])
        while todo:
            S = todo.popleft()
            for a in sigma:
                T = self.step(S, a)
                if not T and not complete:
                    continue
                if T not in index:
                    index[T] = len(order)
                    order.append(T)
                    todo.append(T)
                transitions.append((index[S], a, index[T]))
        accepting = [index[S] for S in order if S & self.accepting]
        return Nfa(range(len(order)), sigma, transitions, [0], accepting)

    def complement(self, alphabet: Optional[Iterable[Symbol]] = None) -> "Nfa":
        """Complement relative to ``alphabet*``."""
        sigma = self.alphabet if alphabet is None else frozenset(alphabet)
        if not sigma >= self.alphabet:
            raise ArgumentError("complement alphabet misses symbols")
        dfa = self.determinize(sigma, complete=True)
        return Nfa(
            dfa.states,
            sigma,
            dfa.transitions(),
            dfa.initial,
            dfa.states - dfa.accepting,
        )

    def remove_epsilon(self) -> "Nfa":
        transitions = []
        for p in self.states:
            reach = self.closure([p])
            for a in self.alphabet:
                for q in self.step(reach, a):
                    transitions.append((p, a, q))
        accepting = [p for p in self.states if self.closure([p]) & self.accepting]
        return Nfa(
            self.states, self.alphabet, transitions, self.initial, accepting
        )

    def intersect(self, other: "Nfa") -> "Nfa":
        """Product automaton restricted to reachable pairs."""
        left, right = self.remove_epsilon(), other.remove_epsilon()
        sigma = left.alphabet | right.alphabet
        common = sorted(left.alphabet & right.alphabet, key=symbol_key)
        starts = sorted(
            ((p, q) for p in left.initial for q in right.initial), key=repr
        )
        index = {pq: j for j, pq in enumerate(starts)}
        todo = deque(starts)
        transitions = []
        while todo:
            p, q = todo.popleft()
            for a in common:
                for p2 in left.delta.get((p, a), ()):
                    for q2 in right.delta.get((q, a), ()):
                        if (p2, q2) not in index:
                            index[(p2, q2)] = len(index)
                            todo.append((p2, q2))
                        transitions.append((index[(p, q)], a, index[(p2, q2)]))
        accepting = [
            j
            for (p, q), j in index.items()
            if p in left.accepting and q in right.accepting
        ]
        return Nfa(
            index.values(),
            sigma,
            transitions,
            [index[pq] for pq in starts],
            accepting,
        )

    def union(self, other: "Nfa") -> "Nfa":
        return Nfa(
            [(0, p) for p in self.states] + [(1, q) for q in other.states],
            self.alphabet | other.alphabet,
            [((0, p), a, (0, q)) for p, a, q in self.transitions()]
            + [((1, p), a, (1, q)) for p, a, q in other.transitions()],
            [(0, p) for p in self.initial] + [(1, q) for q in other.initial],
            [(0, p) for p in self.accepting]
            + [(1, q) for q in other.accepting],
            [((0, p), (0, q)) for p, qs in self.eps.items() for q in qs]
            + [((1, p), (1, q)) for p, qs in other.eps.items() for q in qs],
        )

    # decisions

    def shortest_word(self) -> Optional[tuple[Symbol, ...]]:
        """
        A shortest accepted word, lexicographically least among the
        shortest ones; None when the language is empty.
        """
        dfa = self.determinize(complete=False)
        sigma = dfa.sorted_alphabet
        parent: dict[State, Optional[tuple[State, Symbol]]] = {0: None}
        todo = deque([0])
        while todo:
            p = todo.popleft()
            if p in dfa.accepting:
                word = []
                while parent[p] is not None:
                    p, a = parent[p]
                    word.append(a)
                return tuple(reversed(word))
            for a in sigma:
                for q in dfa.delta.get((p, a), ()):
                    if q not in parent:
                        parent[q] = (p, a)
                        todo.append(q)
        return None

    def is_empty(self) -> bool:
        return self.shortest_word() is None

    def includes(self, other: "Nfa") -> bool:
        """Whether ``L(other)`` is a subset of ``L(self)``."""
        return self.counterexample(other) is None

    def counterexample(self, other: "Nfa") -> Optional[tuple[Symbol, ...]]:
        """Shortest word of ``L(other)`` outside ``L(self)``."""
        sigma = self.alphabet | other.alphabet
        return other.intersect(self.complement(sigma)).shortest_word()

    def equivalent(self, other: "Nfa") -> bool:
        return self.includes(other) and other.includes(self)


# small building blocks


def symbol_set(symbols: Iterable[Symbol], alphabet: Iterable[Symbol]) -> Nfa:
    """Words of length one over ``symbols``."""
    symbols = list(symbols)
    return Nfa([0, 1], alphabet, [(0, a, 1) for a in symbols], [0], [1])


def star_of(symbols: Iterable[Symbol], alphabet: Iterable[Symbol]) -> Nfa:
    """``S*`` for a set of symbols S."""
    return Nfa([0], alphabet, [(0, a, 0) for a in symbols], [0], [0])


def universal(alphabet: Iterable[Symbol]) -> Nfa:
    alphabet = frozenset(alphabet)
    return star_of(alphabet, alphabet)


def empty_language(alphabet: Iterable[Symbol]) -> Nfa:
    return Nfa([0], alphabet, [], [0], [])


def word_automaton(word: Sequence[Symbol], alphabet: Iterable[Symbol]) -> Nfa:
    n = len(word)
    return Nfa(
        range(n + 1),
        alphabet,
        [(j, a, j + 1) for j, a in enumerate(word)],
        [0],
        [n],
    )


def concat(*parts: Nfa) -> Nfa:
    """Concatenation of languages via epsilon moves."""
    if not parts:
        raise ArgumentError("concat needs at least one automaton")
    states, transitions, epsilon = [], [], []
    alphabet: frozenset = frozenset()
    for j, A in enumerate(parts):
        alphabet |= A.alphabet
        states += [(j, p) for p in A.states]
        transitions += [((j, p), a, (j, q)) for p, a, q in A.transitions()]
        epsilon += [((j, p), (j, q)) for p, qs in A.eps.items() for q in qs]
        if j > 0:
            epsilon += [
                ((j - 1, p), (j, q))
                for p in parts[j - 1].accepting
                for q in A.initial
            ]
    last = len(parts) - 1
    return Nfa(
        states,
        alphabet,
        transitions,
        [(0, p) for p in parts[0].initial],
        [(last, p) for p in parts[last].accepting],
        epsilon,
    )
