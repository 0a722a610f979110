import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sympy.combinatorics import Permutation, PermutationGroup

from otl.chain import UnknownGenerator, Word, enumerate_words, parse_word
from otl.perm import StabilizerChain, as_perm, closure_order, compose, cycle_type, group_order, inverse, perm_order, power

perms = st.integers(2, 9).flatmap(lambda n: st.permutations(list(range(n))))


@given(perms)
def test_perm_order_matches_sympy(p):
    assert int(perm_order(as_perm(p))) == Permutation(p).order()
    expected = sorted(k for k, count in Permutation(p).cycle_structure.items() for _ in range(count))
    assert sorted(cycle_type(as_perm(p))) == expected


@given(perms, st.integers(-5, 12))
def test_power_and_inverse(p, k):
    a = as_perm(p)
    assert list(power(a, k)) == list((Permutation(p) ** k).array_form)
    assert list(compose(a, inverse(a))) == list(range(len(p)))


@given(st.integers(3, 8).flatmap(lambda n: st.lists(st.permutations(list(range(n))), min_size=1, max_size=3)))
def test_schreier_sims_matches_sympy(gens):
    n = len(gens[0])
    ours = group_order([as_perm(g) for g in gens], n)
    theirs = PermutationGroup([Permutation(g) for g in gens]).order()
    assert int(ours) == theirs
    if theirs <= 5040:
        assert closure_order([as_perm(g) for g in gens], n) == theirs


def test_schreier_sims_membership():
    gens = [as_perm([1, 0, 2, 3]), as_perm([0, 1, 3, 2])]
    chain = StabilizerChain(gens, 4)
    assert int(chain.order()) == 4
    assert chain.contains(as_perm([1, 0, 3, 2]))
    assert not chain.contains(as_perm([1, 2, 0, 3]))


def test_schreier_sims_is_deterministic():
    gens = [as_perm([1, 2, 3, 4, 5, 0]), as_perm([1, 0, 2, 3, 4, 5])]
    a, b = StabilizerChain(gens, 6), StabilizerChain(gens, 6)
    assert a.base == b.base and a.orbit_sizes() == b.orbit_sizes()
    assert int(a.order()) == 720


def test_cycle_type_examples():
    assert sorted(cycle_type(as_perm([1, 2, 0, 4, 3, 5]))) == [1, 2, 3]


# --- words ------------------------------------------------------------------


def test_parse_word_forms():
    gens = ["a", "b"]
    assert parse_word("ab'", gens) == Word((("a", 1), ("b", -1)))
    assert parse_word("a b^-2 a^3", gens) == Word((("a", 1), ("b", -2), ("a", 3)))
    assert parse_word("a*a'", gens).is_empty()
    assert parse_word("1", gens).is_empty() and parse_word("", gens).is_empty()
    assert parse_word("x1 x2'", ["x1", "x2"]) == Word((("x1", 1), ("x2", -1)))


def test_parse_word_unknown_generator():
    with pytest.raises(UnknownGenerator, match="'z'"):
        parse_word("az", ["a", "b"])


def test_word_algebra():
    a, b = Word.gen("a"), Word.gen("b")
    w = a * b
    assert (w * w.inverse()).is_empty()
    assert str(w ** 2) == "abab" and len(w ** -2) == 4
    assert w.conjugate_by(b) == b * a * b * b.inverse()
    assert str(Word.gen("a", -1)) == "a'"


@given(st.text("ab'", max_size=12))
def test_parse_print_round_trip(text):
    try:
        w = parse_word(text, ["a", "b"])
    except UnknownGenerator:
        return
    assert parse_word(str(w), ["a", "b"]) == w


def test_enumerate_words_counts():
    # free group: 1 + 4 + 12 + 36 words up to length 3
    assert len(list(enumerate_words(["a", "b"], 3))) == 1 + 4 + 12 + 36
    # two involutions: alternating words only
    inv = list(enumerate_words(["a", "b"], 3, frozenset("ab")))
    assert [str(w) for w in inv] == ["", "a", "b", "ab", "ba", "aba", "bab"]
    words = list(enumerate_words(["a", "b"], 2))
    assert len(set(words)) == len(words)
    assert all(len(w) <= 2 for w in words)
