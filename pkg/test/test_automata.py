"""
Tests for the finite automata used by languages and properties.
Run with: pytest test/test_automata.py
"""

import sys
from pathlib import Path

project_root = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root))

import pytest

from cubeabs.automata import (
    Nfa,
    concat,
    empty_language,
    star_of,
    symbol_key,
    symbol_set,
    universal,
    word_automaton,
)
from cubeabs.errors import ArgumentError

SIGMA = ["a", "b", "c"]


def ends_with_a() -> Nfa:
    return Nfa([0, 1], SIGMA, [(0, "a", 0), (0, "b", 0), (0, "c", 0), (0, "a", 1)], [0], [1])


def test_symbol_key_joins_composite_labels():
    assert symbol_key(("a", "b")) == "a;b"
    assert symbol_key("a") == "a"


def test_transition_outside_alphabet():
    with pytest.raises(ArgumentError):
        Nfa([0], ["a"], [(0, "z", 0)], [0], [0])


def test_accepts_and_epsilon_closure():
    A = Nfa([0, 1, 2], SIGMA, [(1, "b", 2)], [0], [2], epsilon=[(0, 1)])
    assert A.accepts(["b"])
    assert not A.accepts([])
    assert not A.accepts(["a"])
    assert A.closure([0]) == frozenset({0, 1})


def test_determinize_is_complete():
    D = ends_with_a().determinize()
    for p in D.states:
        for a in SIGMA:
            assert len(D.delta[(p, a)]) == 1
    assert D.accepts(["b", "a"])
    assert not D.accepts(["a", "b"])


def test_complement():
    C = ends_with_a().complement()
    assert C.accepts([])
    assert C.accepts(["a", "c"])
    assert not C.accepts(["c", "a"])
    with pytest.raises(ArgumentError):
        ends_with_a().complement(["a"])


def test_shortest_word_is_least_among_shortest():
    A = Nfa([0, 1], SIGMA, [(0, "c", 1), (0, "b", 1)], [0], [1])
    assert A.shortest_word() == ("b",)
    assert empty_language(SIGMA).shortest_word() is None
    assert empty_language(SIGMA).is_empty()


def test_intersect_and_union():
    two_letters = concat(symbol_set(SIGMA, SIGMA), symbol_set(SIGMA, SIGMA))
    both = ends_with_a().intersect(two_letters)
    assert both.accepts(["c", "a"])
    assert not both.accepts(["a"])
    assert not both.accepts(["a", "c"])
    either = word_automaton(["b"], SIGMA).union(word_automaton(["c", "c"], SIGMA))
    assert either.accepts(["b"])
    assert either.accepts(["c", "c"])
    assert not either.accepts(["c"])


def test_inclusion_and_counterexample():
    U = universal(SIGMA)
    A = ends_with_a()
    assert U.includes(A)
    assert not A.includes(U)
    assert A.counterexample(U) == ()
    assert star_of(["a"], SIGMA).counterexample(A) == ("b", "a")


def test_equivalence():
    A = star_of(["a"], SIGMA)
    B = concat(star_of(["a"], SIGMA), star_of(["a"], SIGMA))
    assert A.equivalent(B)
    assert not A.equivalent(universal(SIGMA))


def test_concat_needs_parts():
    with pytest.raises(ArgumentError):
        concat()


def test_composite_symbols():
    A = word_automaton([("a", "b"), ("c",)], [("a", "b"), ("c",)])
    assert A.accepts([("a", "b"), ("c",)])
    assert A.shortest_word() == (("a", "b"), ("c",))


if __name__ == "__main__":
    pytest.main([__file__])
