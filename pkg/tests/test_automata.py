import itertools
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sympy.combinatorics import Permutation

from otl import engine
from otl.automata import (
    AutomatonError,
    AutomatonFamily,
    Finite,
    InfiniteCertified,
    UnknownAtBudget,
    WreathRecursion,
    catalog_family,
    element_type,
    prime_divisors_upto,
    typeset_bound,
)
from otl.chain import UnknownGenerator, Word, enumerate_words
from otl.factored import Factored

# the same recursions written out by hand, for an independent tree action
HAND = {
    "adding-machine": (2, {"a": ((1, 0), ("", "a"))}),
    "grigorchuk": (2, {"a": ((1, 0), ("", "")), "b": ((0, 1), ("a", "c")),
                       "c": ((0, 1), ("a", "d")), "d": ((0, 1), ("", "b"))}),
    "basilica": (2, {"a": ((0, 1), ("", "b")), "b": ((1, 0), ("", "a"))}),
    "gupta-sidki": (3, {"s": ((1, 2, 0), ("", "", "")), "t": ((0, 1, 2), ("s", "s'", "t"))}),
}


def hand_apply(states, letters, vertex):
    """Image of a vertex (tuple of symbols) under a word; the rightmost letter acts first."""
    for name, inverse in reversed(letters):
        vertex = hand_letter(states, name, inverse, vertex)
    return vertex


def hand_letter(states, name, inverse, vertex):
    if not vertex:
        return vertex
    perm, secs = states[name]
    if inverse:
        # s^-1 (x w) = y s|_y^-1 (w) with perm[y] = x
        y = perm.index(vertex[0])
        undo = [(n, not inv) for n, inv in reversed(_parse(secs[y]))]
        return (y,) + hand_apply(states, undo, vertex[1:])
    x = vertex[0]
    return (perm[x],) + hand_apply(states, _parse(secs[x]), vertex[1:])


def _parse(text):
    out, i = [], 0
    while i < len(text):
        name = text[i]
        inv = i + 1 < len(text) and text[i + 1] == "'"
        out.append((name, inv))
        i += 2 if inv else 1
    return out


def hand_perm(name, text, level):
    d, states = HAND[name]
    verts = list(itertools.product(range(d), repeat=level))
    index = {v: i for i, v in enumerate(verts)}
    return [index[hand_apply(states, _parse(text), v)] for v in verts]


@pytest.mark.parametrize("name,word", [
    ("adding-machine", "a"), ("adding-machine", "a'"), ("grigorchuk", "ab"), ("grigorchuk", "abcd"),
    ("basilica", "ab'"), ("basilica", "ba'b"), ("gupta-sidki", "st"), ("gupta-sidki", "s't'st"),
])
def test_level_action_matches_hand_recursion(name, word):
    fam = catalog_family(name)
    w = fam.parse(word)
    for level in range(1, 5):
        ours = fam.wreath.act_on_level(w, level).tolist()
        assert ours == hand_perm(name, word, level)
        assert int(engine.element_order_mod_core(w, level, fam)) == Permutation(ours).order()


def test_adding_machine_eight_cycle():
    fam = catalog_family("adding-machine")
    perm = fam.wreath.act_on_level(Word.gen("a"), 3)
    assert Permutation(perm.tolist()).cycle_structure == {8: 1}
    assert fam.wreath.act_on_level(Word(), 3).tolist() == list(range(8))


def test_sections():
    am = catalog_family("adding-machine").wreath
    assert am.section(Word.gen("a"), 1) == Word.gen("a")
    assert am.section(Word.gen("a"), 0).is_empty()
    assert am.section(Word(), (0, 1, 1)).is_empty()
    gs = catalog_family("gupta-sidki", p=3).wreath
    assert gs.section(Word.gen("t"), 2) == Word.gen("t")
    assert gs.section(Word.gen("t"), 0) == Word.gen("s")


words_am = st.lists(st.sampled_from([("a", 1), ("a", -1)]), max_size=6).map(lambda l: Word(tuple(l)))
words_g = st.lists(st.sampled_from([(n, 1) for n in "abcd"]), max_size=6).map(lambda l: Word(tuple(l)))
words_b = st.lists(st.sampled_from([(n, e) for n in "ab" for e in (1, -1)]), max_size=6).map(lambda l: Word(tuple(l)))


@pytest.mark.parametrize("name,strategy", [("adding-machine", words_am), ("grigorchuk", words_g), ("basilica", words_b)])
def test_cocycle_law(name, strategy):
    wreath = catalog_family(name).wreath

    @given(strategy, strategy, st.integers(0, 1))
    def check(g, h, x):
        # (gh)|_x = g|_{h(x)} h|_x
        lhs = wreath.section(g * h, x)
        rhs = wreath.section(g, wreath.apply(h, x)) * wreath.section(h, x)
        for level in (1, 2, 3):
            assert np.array_equal(wreath.act_on_level(lhs, level), wreath.act_on_level(rhs, level))

    check()


@given(words_b, st.integers(1, 4))
def test_projection_equivariant(w, level):
    fam = catalog_family("basilica")
    act, below = fam.level_action(level), fam.level_action(level - 1)
    p = engine.permutation_of(w, act)
    q = engine.permutation_of(w, below)
    assert np.array_equal(act.project[p], q[act.project])


def test_grigorchuk_generators_are_involutions():
    g = catalog_family("grigorchuk")
    for s in "abcd":
        assert g.element_order(Word.gen(s)) == Finite(2, g.element_order(Word.gen(s)).stable_level)
    # against the level action: order 2 from level 1, 2 or 3 on
    for s in "abcd":
        orders = [int(engine.element_order_mod_core(Word.gen(s), l, g)) for l in range(1, 7)]
        assert orders[-1] == 2 and set(orders) <= {1, 2}


def test_adding_machine_infinite():
    res = catalog_family("adding-machine").element_order(Word.gen("a"))
    assert isinstance(res, InfiniteCertified) and res.primes == (2,)


def test_gupta_sidki_st_order():
    gs = catalog_family("gupta-sidki", p=3)
    w = gs.parse("st")
    res = gs.element_order(w)
    levels = [int(engine.element_order_mod_core(w, l, gs)) for l in range(1, 7)]
    assert isinstance(res, Finite)
    assert res.order == levels[-1]
    assert res.stable_level == levels.index(res.order) + 1
    assert (res.order, res.stable_level) == (9, 3)


def test_gupta_sidki_rotation_cycles():
    gs = catalog_family("gupta-sidki", p=3)
    perm = gs.wreath.act_on_level(Word.gen("s"), 2)
    assert Permutation(perm.tolist()).cycle_structure == {3: 3}


def test_budget_exhaustion_is_unknown():
    bas = catalog_family("basilica")
    tiny = bas.wreath.element_order(bas.parse("ab'ab"), budget=0)
    assert isinstance(tiny, UnknownAtBudget)
    assert isinstance(bas.wreath.element_order(bas.parse("ab'ab")), InfiniteCertified)


def test_finite_words_match_level_orders():
    g = catalog_family("grigorchuk")
    for w in enumerate_words(g.generators, 4, g.involutions):
        res = g.element_order(w)
        assert isinstance(res, Finite)
        top = int(engine.element_order_mod_core(w, 8, g))
        assert top == res.order


def test_element_types():
    am = catalog_family("adding-machine")
    approx, t = element_type(am, Word.gen("a"), 10)
    assert approx.value == Factored.of(2**10) and t.label() == "[2^inf]" and t.certified
    g = catalog_family("grigorchuk")
    assert element_type(g, g.parse("abc"), 8)[1].label() == "[1]"
    gs = catalog_family("gupta-sidki", p=3)
    assert element_type(gs, gs.parse("st'"), 5)[1].label() == "[1]"


def test_typeset_bound_values():
    assert [typeset_bound(d) for d in (2, 3, 4)] == [2, 4, 4]
    assert prime_divisors_upto(4) == (2, 3) and prime_divisors_upto(6) == (2, 3, 5)
    with pytest.raises(ValueError):
        typeset_bound(1)


@pytest.mark.parametrize("name,params,depth", [("adding-machine", {}, 8), ("basilica", {}, 8), ("gupta-sidki", {"p": 3}, 5)])
def test_level_orders_only_see_small_primes(name, params, depth):
    fam = catalog_family(name, **params)
    allowed = set(prime_divisors_upto(fam.arity))
    for w in enumerate_words(fam.generators, 3, fam.involutions):
        for l in range(1, depth + 1):
            assert set(engine.element_order_mod_core(w, l, fam).primes) <= allowed


@pytest.mark.parametrize("name,params,depth", [("grigorchuk", {}, 10), ("gupta-sidki", {"p": 3}, 6), ("basilica", {}, 8)])
def test_level_transitive(name, params, depth):
    fam = catalog_family(name, **params)
    undeclared = AutomatonFamily(fam.wreath, level_transitive=False)
    for l in range(1, depth + 1):
        assert len(undeclared.orbit_points(l)) == fam.arity**l
    assert fam.level_size(depth) == fam.arity**depth


def test_intransitive_path_orbit():
    # a only swaps the root; everything below is fixed, so the orbit of 00 has two points
    w = WreathRecursion(2, {"a": ((1, 0), ("", ""))}, "swap")
    fam = AutomatonFamily(w, (0,), level_transitive=None)
    assert fam.level_size(1) == 2 and fam.level_size(3) == 2
    fam.level_action(3).check(fam.level_action(2))


def test_wreath_validation():
    with pytest.raises(AutomatonError):
        WreathRecursion(2, {"a": ((0, 0), ("", ""))})
    with pytest.raises(AutomatonError):
        WreathRecursion(2, {"a": ((1, 0), ("", "z"))})
    with pytest.raises(AutomatonError):
        catalog_family("gupta-sidki", p=4)
    with pytest.raises(UnknownGenerator):
        catalog_family("basilica").parse("ax")


def test_wreath_json_round_trip():
    fam = catalog_family("grigorchuk")
    again = WreathRecursion.from_json(json.loads(json.dumps(fam.wreath.to_json())))
    for text in ("abcd", "dab"):
        w = fam.parse(text)
        assert np.array_equal(again.act_on_level(w, 4), fam.wreath.act_on_level(w, 4))


def test_basilica_has_two_types():
    ts = engine.typeset_sample(catalog_family("basilica"), 2, 8)
    assert set(ts.base_labels()) == {"[1]", "[2^inf]"}
