import math
from functools import reduce

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from otl.factored import Factored, factorint, is_prime, valuation
from otl.steinitz import (
    INF,
    CertifiedInfinite,
    ExactSteinitz,
    InvalidSequence,
    Stable,
    SteinitzApprox,
    TailRule,
    Verdict,
    approx_from_json,
    approx_to_json,
    asymptotically_equivalent,
    spectra,
    steinitz_from_sequence,
)
from otl.types import (
    TRIVIAL_TYPE,
    descriptor_from_json,
    descriptor_to_json,
    equal_up_to_depth,
    provably_distinct,
    type_equal,
    type_from_approx,
    type_join,
    type_leq,
    type_meet,
    type_mul,
    type_of,
)

SMALL_PRIMES = [2, 3, 5, 7, 11, 13]
exponents = st.one_of(st.integers(1, 4), st.just(INF))
explicit = st.dictionaries(st.sampled_from(SMALL_PRIMES), exponents, max_size=4)


def S(d, tail=None):
    return ExactSteinitz.build(d, tail)


# --- factored integers -----------------------------------------------------


@given(st.integers(1, 10**9))
def test_factorint_matches_sympy(n):
    assert factorint(n) == dict(sympy.factorint(n))


@given(st.integers(1, 10**6), st.integers(1, 10**6))
def test_factored_lcm_gcd(a, b):
    fa, fb = Factored.of(a), Factored.of(b)
    assert int(fa.lcm(fb)) == math.lcm(a, b)
    assert int(fa.gcd(fb)) == math.gcd(a, b)
    assert int(fa * fb) == a * b
    assert fa.divides(fa.lcm(fb))


@given(st.integers(2, 10**5))
def test_is_prime_matches_sympy(n):
    assert is_prime(n) == sympy.isprime(n)


def test_valuation_and_json():
    assert valuation(48, 2) == 4 and valuation(48, 3) == 1
    f = Factored.of(2**5 * 3**2)
    assert f.to_json() == {"2": "5", "3": "2"}
    assert Factored.from_json(f.to_json()) == f


# --- sequences ---------------------------------------------------------------


def test_sequence_examples():
    assert steinitz_from_sequence([2, 3, 4], 3).value == Factored.of(24)
    assert steinitz_from_sequence([1, 1, 1], 3).value.is_one()
    # lcm of the partial products 6, 60, 900 computed with plain integers
    partials = [6, 6 * 10, 6 * 10 * 15]
    assert steinitz_from_sequence([6, 10, 15], 3).value == Factored.of(reduce(math.lcm, partials))
    assert steinitz_from_sequence([6, 10, 15], 3).value == Factored.from_map({2: 2, 3: 2, 5: 2})


def test_sequence_statuses():
    open_ = steinitz_from_sequence([2, 3, 4], 3)
    assert open_.status == ()
    closed = steinitz_from_sequence([2, 3, 4], 3, complete=True)
    assert closed.status_map == {2: Stable(3), 3: Stable(1)}


@pytest.mark.parametrize("bad", [[0, 1], [2, -3], [1.5]])
def test_sequence_rejects_bad_entries(bad):
    with pytest.raises(InvalidSequence):
        steinitz_from_sequence(bad, len(bad))


def test_sequence_depth_too_long():
    with pytest.raises(InvalidSequence):
        steinitz_from_sequence([2], 2)


@given(st.lists(st.integers(1, 50), min_size=2, max_size=8))
def test_sequence_monotone(m):
    for L in range(1, len(m)):
        assert steinitz_from_sequence(m, L).value.divides(steinitz_from_sequence(m, L + 1).value)


def test_stable_status_must_match_value():
    with pytest.raises(ValueError):
        SteinitzApprox(1, Factored.of(4), ((2, Stable(1)),))


def test_approx_json_round_trip():
    a = SteinitzApprox(3, Factored.of(72), ((2, CertifiedInfinite()), (3, Stable(2))))
    b = approx_from_json(approx_to_json(a))
    assert b == a
    assert approx_to_json(a)["status"]["2"] == {"kind": "certified_infinite", "exponent": "inf"}


# --- spectra and equivalence ------------------------------------------------------


def test_spectra_examples():
    sp = spectra(S({2: INF, 3: 2}))
    assert sp.pi == {2, 3} and sp.pi_f == {3} and sp.pi_inf == {2}
    one = spectra(ExactSteinitz.one())
    assert not one.pi and not one.pi_f and not one.pi_inf and one.pi_f_is_infinite is Verdict.NO
    tail = TailRule.primes_from(5, 1, exclude=[7])
    assert spectra(S({2: INF}, tail)).pi_f_is_infinite is Verdict.YES


def test_equivalence_examples():
    assert asymptotically_equivalent(S({2: 1, 5: INF}), S({3: 1, 5: INF})) is Verdict.YES
    assert asymptotically_equivalent(S({2: INF}), S({3: INF})) is Verdict.NO
    rule = TailRule.primes_from(5, 2)
    assert asymptotically_equivalent(S({2: INF}, rule), S({2: INF, 7: 1}, rule)) is Verdict.YES
    other = TailRule.primes_from(5, 3)
    assert asymptotically_equivalent(S({2: INF}, rule), S({2: INF}, other)) is Verdict.INCONCLUSIVE
    assert asymptotically_equivalent(S({2: INF}, rule), S({2: INF})) is Verdict.NO


def test_tail_rules_enumerate_in_order():
    rule = TailRule.primes_from(3, 2, exclude=[5])
    assert rule.prefix(4) == [(3, 2), (7, 2), (11, 2), (13, 2)]
    assert rule.exponent(5) == 0 and rule.exponent(7) == 2
    merged = TailRule.combine("sum", TailRule.primes_from(3, 1), TailRule.primes_from(5, 2))
    assert merged.prefix(3) == [(3, 1), (5, 3), (7, 3)]


def test_explicit_primes_are_checked():
    with pytest.raises(ValueError):
        S({4: 1})


@given(explicit, explicit, explicit)
def test_equivalence_is_an_equivalence(a, b, c):
    x, y, z = S(a), S(b), S(c)
    assert asymptotically_equivalent(x, x) is Verdict.YES
    assert asymptotically_equivalent(x, y) == asymptotically_equivalent(y, x)
    if asymptotically_equivalent(x, y) is Verdict.YES and asymptotically_equivalent(y, z) is Verdict.YES:
        assert asymptotically_equivalent(x, z) is Verdict.YES


@given(explicit, st.integers(1, 10_000))
def test_type_of_multiple(a, n):
    x = S(a)
    assert type_equal(type_of(x * n), type_of(x)) is Verdict.YES


@given(explicit, explicit)
def test_lcm_gcd_pointwise(a, b):
    x, y = S(a), S(b)
    for p in SMALL_PRIMES:
        assert x.lcm(y).chi(p) == max(x.chi(p), y.chi(p))
        assert x.gcd(y).chi(p) == min(x.chi(p), y.chi(p))
        assert (x * y).chi(p) == x.chi(p) + y.chi(p)


# --- type algebra -------------------------------------------------------------


def T(*primes):
    return type_of(S({p: INF for p in primes}))


def test_type_examples():
    assert type_equal(type_mul(T(2), T(3)), T(2, 3)) is Verdict.YES
    assert type_equal(type_meet(T(2), T(3)), TRIVIAL_TYPE) is Verdict.YES
    assert type_equal(type_join(type_of(S({2: INF, 3: 1})), T(3)), T(2, 3)) is Verdict.YES
    assert T(2, 3).label() == "[(2*3)^inf]" and TRIVIAL_TYPE.label() == "[1]"


types = st.builds(type_of, st.builds(S, explicit))


@given(types, types, types)
def test_type_laws(a, b, c):
    eq = lambda x, y: type_equal(x, y) is Verdict.YES  # noqa: E731
    assert eq(type_mul(a, b), type_mul(b, a))
    assert eq(type_mul(type_mul(a, b), c), type_mul(a, type_mul(b, c)))
    for op in (type_join, type_meet):
        assert eq(op(a, a), a)
        assert eq(op(a, b), op(b, a))
        assert eq(op(op(a, b), c), op(a, op(b, c)))
    assert eq(type_join(a, type_meet(a, b)), a)
    assert eq(type_meet(a, type_join(a, b)), a)
    # meet <= join <= product
    assert type_leq(type_meet(a, b), type_join(a, b)) is Verdict.YES
    assert type_leq(type_join(a, b), type_mul(a, b)) is Verdict.YES


def test_tail_types_are_never_guessed():
    r1, r2 = TailRule.primes_from(5, 1), TailRule.primes_from(5, 2)
    a, b = type_of(S({}, r1)), type_of(S({}, r2))
    assert type_equal(a, b) is Verdict.INCONCLUSIVE
    assert type_equal(a, type_of(S({3: 1}, r1))) is Verdict.YES


def test_truncated_descriptors():
    grow = SteinitzApprox(4, Factored.of(16), (), tuple(Factored.of(2**i) for i in range(1, 5)))
    flat = SteinitzApprox(4, Factored.of(2), (), tuple(Factored.of(2) for _ in range(4)))
    tg, tf = type_from_approx(grow), type_from_approx(flat)
    assert tg.label() == "[2^inf]@4" and tf.label() == "[1]@4"
    assert type_equal(tg, T(2)) is Verdict.INCONCLUSIVE
    assert equal_up_to_depth(tg, T(2))
    certified = SteinitzApprox(4, Factored.of(16), ((2, CertifiedInfinite()),), grow.history)
    assert provably_distinct(type_from_approx(certified), TRIVIAL_TYPE)
    assert type_from_approx(certified, complete=True) == T(2)


def test_descriptor_json_round_trip():
    for t in (TRIVIAL_TYPE, T(2, 3), type_from_approx(SteinitzApprox(3, Factored.of(8)))):
        assert descriptor_from_json(descriptor_to_json(t)) == t
