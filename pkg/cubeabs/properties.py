"""
Dihomotopy-invariant properties as regular languages.

A property is a language over single actions; an HDA has the property when
every word it accepts (edge labels read letter by letter) lies in it.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, EnumMeta
from typing import Iterable, Iterator, Optional, Sequence, Union

from ._logger import logger
from .automata import (
    Nfa,
    concat,
    star_of,
    symbol_set,
    universal,
)
from .errors import ArgumentError
from .hda import Hda, Word, as_word, letter_automaton, word_text

logger.debug(f"Loading module {__name__}.")

__all__ = [
    "Combinator",
    "IndependenceRelation",
    "PropertyAutomaton",
    "Template",
    "build_property",
    "combine",
    "has_property",
    "is_trace_closed",
    "is_trace_closed_relative",
    "local_independence",
]


class PropertyEnumMeta(EnumMeta):
    def __contains__(cls, item):
        return item in cls.__members__.keys()


class Template(Enum, metaclass=PropertyEnumMeta):
    ORDER_PATTERN = "order-pattern"
    MUTUAL_EXCLUSION = "mutual-exclusion"
    STARVATION_FINITE = "starvation-finite"
    PROGRESS = "progress"
    BOUNDED_OVERTAKING = "bounded-overtaking"

    @classmethod
    def _missing_(cls, value: str):
        value = value.lower().replace("_", "-")
        for member in cls.__members__.values():
            if member.value == value:
                return member
        return None


class Combinator(Enum, metaclass=PropertyEnumMeta):
    COMPLEMENT = "complement"
    INTERSECT = "intersect"
    UNION = "union"

    @classmethod
    def _missing_(cls, value: str):
        value = value.lower()
        for member in cls.__members__.values():
            if member.value == value:
                return member
        return None


# independence


@dataclass(frozen=True)
class IndependenceRelation:
    """Symmetric relation on labels, stored as unordered pairs."""

    pairs: frozenset[frozenset[Word]] = frozenset()

    @classmethod
    def of(cls, pairs: Iterable[tuple]) -> "IndependenceRelation":
        return cls(
            frozenset(frozenset((as_word(a), as_word(b))) for a, b in pairs)
        )

    def __contains__(self, pair: object) -> bool:
        a, b = pair
        return frozenset((as_word(a), as_word(b))) in self.pairs

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[tuple[Word, Word]]:
        for pair in sorted(self.pairs, key=lambda s: sorted(map(word_text, s))):
            members = sorted(pair, key=word_text)
            yield (members[0], members[-1])

    def ordered(self) -> list[tuple[Word, Word]]:
        """Both orientations of every pair."""
        out = []
        for a, b in self:
            out.append((a, b))
            if a != b:
                out.append((b, a))
        return out

    def lines(self) -> list[str]:
        return [f"{word_text(a)} | {word_text(b)}" for a, b in self]


def local_independence(A: Hda) -> IndependenceRelation:
    """Label pairs carried by the two front faces of some square."""
    P = A.pcs
    pairs = set()
    for z in P.squares:
        e1, e2 = P.face(z, 0, 1), P.face(z, 0, 2)
        pairs.add(frozenset((A.label(e1), A.label(e2))))
    return IndependenceRelation(frozenset(pairs))


# property automata


@dataclass(frozen=True)
class PropertyAutomaton:
    nfa: Nfa
    description: str = ""

    @property
    def alphabet(self) -> frozenset:
        return self.nfa.alphabet

    def accepts(self, word: Union[str, Sequence[str]]) -> bool:
        return self.nfa.accepts(as_word(word))

    def equivalent(self, other: "PropertyAutomaton") -> bool:
        return self.nfa.equivalent(other.nfa)


def _known(symbols: Sequence[str], alphabet: frozenset[str]) -> None:
    for a in symbols:
        if a not in alphabet:
            raise ArgumentError(f"symbol {a!r} is not in the alphabet")


def _without(sigma: frozenset[str], *excluded: str) -> Nfa:
    return star_of(sigma - set(excluded), sigma)


def _avoid(bad: Nfa, sigma: frozenset[str]) -> Nfa:
    """``Σ* ∖ bad``."""
    return bad.complement(sigma)


_ARITY = {
    Template.ORDER_PATTERN: 2,
    Template.MUTUAL_EXCLUSION: 4,
    Template.STARVATION_FINITE: 2,
    Template.PROGRESS: 3,
    Template.BOUNDED_OVERTAKING: 3,
}


def build_property(
    template: Union[str, Template],
    params: Sequence[str],
    alphabet: Iterable[str],
) -> PropertyAutomaton:
    """
    Instantiate a property template over an alphabet of actions.

    Args:
        template: one of

            - ``order-pattern a b``: some a is followed later by some b.
            - ``mutual-exclusion crit_0 crit_1 reset_0 reset_1``: no
              ``crit_i`` is followed by ``crit_{1-i}`` before ``reset_i``,
              for both i.
            - ``starvation-finite request crit``: no request is left without
              a later crit.
            - ``progress a crit_0 crit_1``: a never occurs twice without a
              crit in between.
            - ``bounded-overtaking enter crit other``: after enter, other
              does not enter its critical section twice before crit.
        params: the template's symbols.
        alphabet: the action alphabet Σ.
    """
    template = Template(template)
    sigma = frozenset(alphabet)
    params = list(params)
    if len(params) != _ARITY[template]:
        raise ArgumentError(
            f"{template.value} takes {_ARITY[template]} symbols, got {len(params)}"
        )
    _known(params, sigma)
    any_ = universal(sigma)

    def one(a: str) -> Nfa:
        return symbol_set([a], sigma)

    if template is Template.ORDER_PATTERN:
        a, b = params
        nfa = concat(any_, one(a), any_, one(b), any_)
    elif template is Template.MUTUAL_EXCLUSION:
        crit, reset = params[:2], params[2:]
        nfa = None
        for i in (0, 1):
            bad = concat(
                any_, one(crit[i]), _without(sigma, reset[i]), one(crit[1 - i]), any_
            )
            good = _avoid(bad, sigma)
            nfa = good if nfa is None else nfa.intersect(good)
    elif template is Template.STARVATION_FINITE:
        request, crit = params
        nfa = _avoid(concat(any_, one(request), _without(sigma, crit)), sigma)
    elif template is Template.PROGRESS:
        a, c0, c1 = params
        between = _without(sigma, c0, c1)
        nfa = _avoid(concat(any_, one(a), between, one(a), any_), sigma)
    else:
        enter, crit, other = params
        between = _without(sigma, crit)
        nfa = _avoid(
            concat(any_, one(enter), between, one(other), between, one(other), any_),
            sigma,
        )
    return PropertyAutomaton(nfa, f"{template.value} " + " ".join(params))


def combine(
    op: Union[str, Combinator], *args: PropertyAutomaton
) -> PropertyAutomaton:
    """Boolean combination of properties over one alphabet."""
    op = Combinator(op)
    if not args:
        raise ArgumentError(f"{op.value} needs an argument")
    sigma = args[0].alphabet
    if any(L.alphabet != sigma for L in args[1:]):
        raise ArgumentError("properties have different alphabets")

    if op is Combinator.COMPLEMENT:
        if len(args) != 1:
            raise ArgumentError("complement takes one property")
        return PropertyAutomaton(
            args[0].nfa.complement(sigma), f"not ({args[0].description})"
        )
    nfa = args[0].nfa
    for L in args[1:]:
        nfa = nfa.intersect(L.nfa) if op is Combinator.INTERSECT else nfa.union(L.nfa)
    joiner = " and " if op is Combinator.INTERSECT else " or "
    return PropertyAutomaton(
        nfa, joiner.join(f"({L.description})" for L in args)
    )


def has_property(
    A: Hda, L: PropertyAutomaton
) -> tuple[bool, Optional[tuple[str, ...]]]:
    """
    Whether every word of A lies in L.

    Returns:
        (holds, counterexample): the counterexample is a shortest word of A
        outside L, lexicographically least among those.
    """
    missing = A.letters - L.alphabet
    if missing:
        raise ArgumentError(
            f"actions {sorted(missing)} are not in the property alphabet"
        )
    witness = L.nfa.counterexample(letter_automaton(A))
    if witness is not None:
        logger.info(f"Property violated by {word_text(witness)}")
    return witness is None, witness


# trace closure


def _run(nfa: Nfa, p, word: Word) -> frozenset:
    current = frozenset([p])
    for a in word:
        current = nfa.step(current, a)
        if not current:
            break
    return current


def _swap_image(nfa: Nfa, a: Word, b: Word) -> Nfa:
    """Image of L under one swap ``u.a.b.v -> u.b.a.v``."""
    base = nfa.remove_epsilon()
    transitions = []
    for p, c, q in base.transitions():
        transitions.append((("pre", p), c, ("pre", q)))
        transitions.append((("post", p), c, ("post", q)))
    swapped = tuple(b) + tuple(a)
    for p in base.states:
        ends = set()
        for q in _run(base, p, a):
            ends |= _run(base, q, b)
        for r in ends:
            chain = (
                [("pre", p)]
                + [("mid", p, r, j) for j in range(1, len(swapped))]
                + [("post", r)]
            )
            for j, c in enumerate(swapped):
                transitions.append((chain[j], c, chain[j + 1]))
    return Nfa(
        [("pre", p) for p in base.states],
        base.alphabet,
        transitions,
        [("pre", p) for p in base.initial],
        [("post", p) for p in base.accepting],
    )


def is_trace_closed(L: PropertyAutomaton, R: IndependenceRelation) -> bool:
    """
    Whether swapping adjacent independent labels never leaves L. This is
    sufficient for L to be dihomotopy invariant on every HDA whose local
    independence is contained in R.
    """
    for a, b in R.ordered():
        if a == b:
            continue
        if not set(a) | set(b) <= L.alphabet:
            logger.debug(
                f"Swap {word_text(a)}|{word_text(b)} skipped: letters outside "
                "the property alphabet"
            )
            continue
        escape = L.nfa.counterexample(_swap_image(L.nfa, a, b))
        if escape is not None:
            logger.debug(
                f"Swap {word_text(a)}|{word_text(b)} leaves the property "
                f"with {word_text(escape)}"
            )
            return False
    return True


def is_trace_closed_relative(L: PropertyAutomaton, A: Hda) -> bool:
    return is_trace_closed(L, local_independence(A))
