import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from otl import engine
from otl.chain import AnalyticUnavailable, NotInSubgroup, RestrictedContext, Word, enumerate_words
from otl.config import build_family
from otl.factored import Factored
from otl.families import (
    FamilyError,
    HeisenbergFamily,
    Schedule,
    SemidirectPermutationFamily,
    ZnDiagonalFamily,
    ZScheduleFamily,
    heis_inv,
    heis_mul,
    heis_pow,
)
from otl.perm import group_order, perm_order
from otl.steinitz import INF, CertifiedInfinite, ExactSteinitz, Stable

TWO_THREE = [Schedule(infinite=(2,)), Schedule(infinite=(3,))]


# --- an independent Heisenberg oracle on integer matrices ---------------------


def heis_matrix(a, b, c):
    return np.array([[1, a, c], [0, 1, b], [0, 0, 1]], dtype=object)


def coset_order_oracle(g, moduli):
    """Least k with g^k fixing every coset h Gamma_l, i.e. h^-1 g^k h in Gamma_l."""
    A, B, C = moduli
    reps = [heis_matrix(x, y, z) for x in range(A) for y in range(B) for z in range(C)]
    inv = [np.array([[1, -m[0, 1], m[0, 1] * m[1, 2] - m[0, 2]], [0, 1, -m[1, 2]], [0, 0, 1]], dtype=object) for m in reps]
    G = heis_matrix(*g)
    power = np.identity(3, dtype=object)
    for k in itertools.count(1):
        power = power.dot(G)
        if all(
            c[0, 1] % A == 0 and c[1, 2] % B == 0 and c[0, 2] % C == 0
            for c in (hi.dot(power).dot(h) for h, hi in zip(reps, inv))
        ):
            return k


def test_matrix_oracle_agrees_with_group_law():
    x, y = (2, -1, 5), (3, 4, -7)
    m = heis_matrix(*x).dot(heis_matrix(*y))
    assert (m[0, 1], m[1, 2], m[0, 2]) == heis_mul(x, y)
    assert heis_mul(x, heis_inv(x)) == (0, 0, 0)
    assert heis_pow(x, 3) == heis_mul(x, heis_mul(x, x))


@given(st.tuples(st.integers(-9, 9), st.integers(-9, 9), st.integers(-9, 9)),
       st.tuples(st.integers(-9, 9), st.integers(-9, 9), st.integers(-9, 9)),
       st.tuples(st.integers(-9, 9), st.integers(-9, 9), st.integers(-9, 9)))
def test_heisenberg_associative(x, y, z):
    assert heis_mul(heis_mul(x, y), z) == heis_mul(x, heis_mul(y, z))


def test_heisenberg_a_order_at_level_one():
    fam = HeisenbergFamily(2)
    perm = engine.permutation_of(Word.gen("a"), fam.level_action(1))
    assert len(perm) == 16
    assert coset_order_oracle((1, 0, 0), fam.moduli(1)) == 4
    assert int(perm_order(perm)) == 4


@pytest.mark.parametrize("word,level", [("a", 2), ("c", 1), ("c", 2), ("ab", 1), ("ab", 2), ("ab'c", 2)])
def test_heisenberg_orders_match_oracle(word, level):
    fam = HeisenbergFamily(2)
    w = fam.parse(word)
    expected = coset_order_oracle(fam.evaluate(w), fam.moduli(level))
    assert int(engine.element_order_mod_core(w, level, fam)) == expected
    assert int(fam.analytic_element_order(w, level)) == expected


def test_heisenberg_c_order_grows_like_p_squared():
    fam = HeisenbergFamily(2)
    for l in range(1, 4):
        assert engine.element_order_mod_core(Word.gen("c"), l, fam) == Factored.of(4**l)
    xi = engine.element_steinitz_order(Word.gen("c"), 4, fam)
    assert xi.value == Factored.of(2**8) and isinstance(xi.status_map[2], CertifiedInfinite)


def test_heisenberg_a_certificate_valuation():
    fam = HeisenbergFamily(2)
    cert = fam.profile(Word.gen("a")).infinite[2]
    for l in range(1, 4):
        m = engine.element_order_mod_core(Word.gen("a"), l, fam)
        assert m == Factored.of(2 ** (2 * l))
        assert m.exponent(2) >= cert.bound(l)


def _two_prime_power_oracle(l):
    # (1,1,0)^k = (k, k, k(k-1)/2); the core is every coordinate divisible by 6^l
    N = 6**l
    return next(k for k in itertools.count(N, N) if (k * (k - 1) // 2) % N == 0)


def test_heisenberg_two_primes_core_matches_oracle():
    fam = HeisenbergFamily(2, 3)
    for l in (1, 2):
        for text in ("abc'", "a", "c", "a^2b^3c"):
            word = fam.parse(text)
            g = fam.evaluate(word)
            assert int(engine.element_order_mod_core(word, l, fam)) == coset_order_oracle(g, fam.moduli(l))


def test_heisenberg_two_primes_ab_orders():
    fam = HeisenbergFamily(2, 3)
    ab = fam.parse("abc'")
    assert fam.evaluate(ab) == (1, 1, 0)
    for l in range(1, 5):
        assert int(engine.element_order_mod_core(ab, l, fam)) == _two_prime_power_oracle(l)
    assert [_two_prime_power_oracle(l) for l in range(1, 5)] == [12, 72, 432, 2592]
    xi = engine.element_steinitz_order(ab, 4, fam)
    assert xi.value == Factored.from_map({2: 5, 3: 4})
    assert all(isinstance(xi.status_map[p], CertifiedInfinite) for p in (2, 3))
    assert engine.element_order_result(ab, 4, fam).type.label() == "[(2*3)^inf]"


def test_heisenberg_indices_and_core_orders():
    one, two = HeisenbergFamily(2), HeisenbergFamily(2, 3)
    for l in range(1, 4):
        assert one.analytic_index(l) == Factored.of(2 ** (4 * l))
        assert one.analytic_core_order(l) == Factored.of(2 ** (6 * l))
        assert two.analytic_core_order(l) == Factored.of(6 ** (3 * l))
        assert two.analytic_index(l) == Factored.of(2**l * 3**l * 6**l)
    assert engine.group_image_order(1, one) == Factored.of(2**6)
    assert engine.group_image_order(1, two) == two.analytic_core_order(1)


def test_heisenberg_chain_property():
    fam = HeisenbergFamily(2)
    prev = None
    for l in range(0, 4):
        act = fam.level_action(l)
        act.check(prev)
        prev = act


# --- lattice and semidirect families ----------------------------------------------


def test_z_schedule_cycle():
    fam = ZScheduleFamily(Schedule(infinite=(2,)))
    perm = engine.permutation_of(Word.gen("a"), fam.level_action(3))
    assert sorted(perm.tolist()) == list(range(8))
    assert int(perm_order(perm)) == 8 and len(np.unique(perm)) == 8
    assert engine.permutation_of(Word.gen("a", 8), fam.level_action(3)).tolist() == list(range(8))
    assert engine.element_order_mod_core(Word.gen("a"), 5, fam) == Factored.of(32)
    assert engine.group_image_order(3, fam) == Factored.of(8)
    assert engine.group_image_order(0, fam).is_one()
    assert engine.element_order_mod_core(Word.gen("a"), 0, fam).is_one()


def test_z_schedule_steinitz_and_tail():
    s = Schedule(finite=((3, 2),), infinite=(2,))
    assert [s.modulus(l) for l in (1, 2, 3)] == [18, 36, 72]
    assert s.steinitz() == ExactSteinitz.build({2: INF, 3: 2})
    t = Schedule(infinite=(2,), tail_start=5)
    assert t.q_prefix(3) == ((5, 1), (7, 1), (11, 1))
    assert t.steinitz().tail is not None


def test_z_schedule_certificate_and_stable():
    fam = ZScheduleFamily(Schedule(finite=((3, 2),), infinite=(2,)))
    xi = engine.element_steinitz_order(Word.gen("a"), 6, fam)
    assert xi.status_map == {2: xi.status_map[2], 3: Stable(2)}
    assert isinstance(xi.status_map[2], CertifiedInfinite)
    assert fam.growth_certificate(Word.gen("a"), 2) is not None
    assert fam.growth_certificate(Word(), 2) is None


def test_semidirect_level_one_size():
    fam = SemidirectPermutationFamily(TWO_THREE, [[1, 0]])
    assert fam.level_size(1) == 12
    assert fam.level_action(1).size == 12
    assert engine.index_at(1, fam) == Factored.of(12)


def test_semidirect_translation_order():
    fam = SemidirectPermutationFamily(TWO_THREE, [[1, 0]])
    for l in range(1, 4):
        expected = 6**l
        assert int(engine.element_order_mod_core(Word.gen("a"), l, fam)) == expected
        assert fam.analytic_element_order(Word.gen("a"), l) == Factored.of(expected)


def test_semidirect_core_orders():
    fam = SemidirectPermutationFamily(TWO_THREE, [[1, 0]])
    for l in (1, 2):
        gens = [fam.level_action(l).perm(g) for g in fam.generators]
        assert group_order(gens, fam.level_size(l)) == fam.analytic_core_order(l)
    assert fam.analytic_core_order(1) == Factored.from_map({2: 3, 3: 2})
    assert fam.analytic_core_order(2) == Factored.from_map({2: 5, 3: 4})


def test_trivial_delta_matches_lattice():
    lattice = ZnDiagonalFamily(TWO_THREE)
    semi = SemidirectPermutationFamily(TWO_THREE, [])
    for w in enumerate_words(lattice.generators, 3):
        for l in range(1, 4):
            assert engine.element_order_mod_core(w, l, lattice) == engine.element_order_mod_core(w, l, semi)
    assert engine.typeset_sample(lattice, 3, 4).labels() == engine.typeset_sample(semi, 3, 4).labels()


@pytest.mark.parametrize("abelian_prefix", [False, True])
def test_semidirect_backends_agree(abelian_prefix):
    fam = SemidirectPermutationFamily(TWO_THREE, [[1, 0]], abelian_prefix)
    for l in range(1, 4):
        if fam.level_size(l) > 4096:
            break
        assert fam.analytic_index(l) == Factored.of(fam.level_action(l).size)
        for w in enumerate_words(fam.generators, 3, fam.involutions):
            try:
                a = fam.analytic_element_order(w, l)
            except AnalyticUnavailable:
                continue
            assert a == perm_order(engine.permutation_of(w, fam.level_action(l)))


def test_restricted_closed_form_matches_brute_force():
    fam = SemidirectPermutationFamily(TWO_THREE, [[1, 0]], abelian_prefix=True)
    lattice = ZnDiagonalFamily([Schedule(infinite=(2,)), Schedule(finite=((5, 1),), infinite=(3,))])
    for f, k in ((fam, 1), (lattice, 1), (lattice, 2)):
        ctx = RestrictedContext(k)
        for w in enumerate_words(f.generators, 3, f.involutions):
            for l in range(1, 4):
                if f.level_size(l) > 4096:
                    continue
                try:
                    closed = f.analytic_restricted_order(w, ctx, l)
                except AnalyticUnavailable:
                    continue
                points = engine.restricted_points(ctx, l, f)
                brute = perm_order(engine.permutation_of(w, f.level_action(l)), points)
                assert closed == brute, (f, k, str(w), l)


def test_restricted_at_zero_is_unrestricted():
    fam = SemidirectPermutationFamily(TWO_THREE, [[1, 0]])
    for w in enumerate_words(fam.generators, 2, fam.involutions):
        a = engine.restricted_order_result(w, RestrictedContext(0), 4, fam)
        b = engine.element_order_result(w, 4, fam)
        assert a.per_level == b.per_level and a.approx == b.approx and a.type == b.type


def test_restricted_rejects_words_outside():
    fam = SemidirectPermutationFamily(TWO_THREE, [[1, 0]], abelian_prefix=True)
    with pytest.raises(NotInSubgroup):
        engine.restricted_order_result(Word.gen("s"), RestrictedContext(1), 3, fam)
    # accepted inside typesets
    engine.restricted_order_result(Word.gen("s"), RestrictedContext(1), 3, fam, allow_outside=True)


def test_lagrange_with_ratio():
    fam = HeisenbergFamily(2)
    res = engine.lagrange_divisibility_check(Word.gen("a"), 3, fam)
    assert res.passed and res.failed_level is None
    assert [int(r.ratio) for r in res.rows] == [2**6 // 4, 2**12 // 16, 2**18 // 64]
    ident = engine.lagrange_divisibility_check(Word(), 3, ZScheduleFamily(Schedule(infinite=(2,))))
    assert ident.passed and all(r.element_order.is_one() for r in ident.rows)


def test_typeset_empty_generators():
    fam = ZScheduleFamily(Schedule(infinite=(2,)))
    fam.generators = ()
    ts = engine.typeset_sample(fam, 3, 3)
    assert ts.labels() == ["[1]"]


def test_heisenberg_typeset_is_two_types():
    ts = engine.typeset_sample(HeisenbergFamily(2), 3, 4)
    assert set(ts.labels()) == {"[1]", "[2^inf]"}
    assert not any(c.inconclusive_merge for c in ts.classes)


def test_heisenberg_and_z_schedule_commensurable():
    a = engine.typeset_sample(HeisenbergFamily(2), 3, 4)
    b = engine.typeset_sample(ZScheduleFamily(Schedule(infinite=(2,))), 3, 4)
    c = engine.commensurable(a, b)
    assert c.verdict == "equal_up_to_depth" and c.certified
    same = engine.commensurable(a, a)
    assert same.verdict == "equal_up_to_depth"


def test_commensurable_distinct_has_witness():
    a = engine.typeset_sample(SemidirectPermutationFamily(TWO_THREE, [[1, 0]]), 3, 4)
    b = engine.typeset_sample(ZnDiagonalFamily(TWO_THREE), 3, 4)
    c = engine.commensurable(a, b)
    assert c.verdict == "distinct" and c.certified and c.witness_side == "B"
    assert c.witness.label() in {"[2^inf]", "[3^inf]"}


def test_typeset_dedup_is_graded():
    ts = engine.typeset_sample(ZnDiagonalFamily(TWO_THREE), 2, 4)
    assert ts.labels()[0] == "[1]"
    assert sum(len(c.words) for c in ts.classes) == len(ts.results)


# --- parameter errors -----------------------------------------------------------


@pytest.mark.parametrize("name,params,match", [
    ("z-schedule", {"infinite_primes": [4]}, "infinite_primes\\[0\\]"),
    ("z-schedule", {"infinite_primes": []}, "infinite_primes"),
    ("z-schedule", {"infinite_primes": [2], "finite_primes": [[2, 1]]}, "disjoint"),
    ("z-schedule", {"infinite_primes": [2], "finite_primes": [[3, 0]]}, "multiplicity"),
    ("semidirect", {"schedules": [{"infinite_primes": [2]}], "delta": [[0, 0]]}, "delta\\[0\\]"),
    ("heisenberg", {"p": 2, "q": 2}, "q"),
    ("heisenberg", {}, "params.p"),
    ("zn-diagonal", {"schedules": []}, "schedules"),
])
def test_family_errors_name_the_field(name, params, match):
    with pytest.raises(FamilyError, match=match):
        build_family(name, params)


def test_lattice_type_set_brute():
    # every translation (x, y) with x, y in {-1, 0, 1} has type read off its nonzero coordinates
    fam = ZnDiagonalFamily(TWO_THREE)
    for x, y in itertools.product((-1, 0, 1), repeat=2):
        w = Word((("a", x), ("b", y)))
        lab = engine.element_order_result(w, 5, fam).type.label()
        primes = [p for p, c in ((2, x), (3, y)) if c]
        expected = {0: "[1]", 1: f"[{primes[0]}^inf]" if primes else "", 2: "[(2*3)^inf]"}[len(primes)]
        assert lab == expected
