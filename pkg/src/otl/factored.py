"""Integers kept in factored form.

Every order, index and cycle length handled by the library passes through
:class:`Factored`, so lcm and divisibility stay exact without touching bignum
factorization.  Inputs are bounded by coset-space sizes, so a sieve plus trial
division is enough.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Iterable, Iterator, Mapping

_SIEVE_LIMIT = 1 << 16


@lru_cache(maxsize=None)
def _sieve(limit: int) -> tuple[int, ...]:
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(limit) + 1):
        if flags[i]:
            flags[i * i :: i] = bytearray(len(range(i * i, limit + 1, i)))
    return tuple(i for i, f in enumerate(flags) if f)


def small_primes(limit: int = _SIEVE_LIMIT) -> tuple[int, ...]:
    return _sieve(max(limit, 2))


def is_prime(n: int) -> bool:
    """Deterministic primality test."""
    if n < 2:
        return False
    if n <= _SIEVE_LIMIT:
        primes = _sieve(_SIEVE_LIMIT)
        i = bisect_right(primes, n)
        return primes[i - 1] == n
    if n < _SIEVE_LIMIT * _SIEVE_LIMIT:
        return all(n % p for p in _sieve(math.isqrt(n)))
    from sympy import isprime

    return bool(isprime(n))


def primes_from(start: int) -> Iterator[int]:
    """Primes >= start, in increasing order, without an upper bound."""
    n = max(start, 2)
    while True:
        if is_prime(n):
            yield n
        n += 1


def factorint(n: int) -> dict[int, int]:
    if n < 1:
        raise ValueError(f"can only factor positive integers, got {n}")
    out: dict[int, int] = {}
    for p in _sieve(_SIEVE_LIMIT):
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
    if n > 1:
        if n > _SIEVE_LIMIT * _SIEVE_LIMIT and not is_prime(n):
            # cofactor of two large primes; only reachable far beyond desk scale
            from sympy import factorint as _sympy_factorint

            for p, e in _sympy_factorint(n).items():
                out[int(p)] = out.get(int(p), 0) + int(e)
        else:
            out[n] = out.get(n, 0) + 1
    return dict(sorted(out.items()))


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class Factored:
    """A positive integer stored as sorted (prime, exponent) pairs."""

    items: tuple[tuple[int, int], ...] = ()

    @classmethod
    def of(cls, n: int) -> Factored:
        return cls(tuple(factorint(n).items()))

    @classmethod
    def from_map(cls, m: Mapping[int, int]) -> Factored:
        return cls(tuple(sorted((p, e) for p, e in m.items() if e)))

    @classmethod
    def one(cls) -> Factored:
        return cls()

    def as_dict(self) -> dict[int, int]:
        return dict(self.items)

    def __int__(self) -> int:
        return math.prod(p**e for p, e in self.items)

    def __mul__(self, other: Factored) -> Factored:
        d = self.as_dict()
        for p, e in other.items:
            d[p] = d.get(p, 0) + e
        return Factored.from_map(d)

    def lcm(self, other: Factored) -> Factored:
        d = self.as_dict()
        for p, e in other.items:
            d[p] = max(d.get(p, 0), e)
        return Factored.from_map(d)

    def gcd(self, other: Factored) -> Factored:
        o = other.as_dict()
        return Factored.from_map({p: min(e, o.get(p, 0)) for p, e in self.items})

    def divides(self, other: Factored) -> bool:
        o = other.as_dict()
        return all(o.get(p, 0) >= e for p, e in self.items)

    def __floordiv__(self, other: Factored) -> Factored:
        if not other.divides(self):
            raise ValueError(f"{other} does not divide {self}")
        d = self.as_dict()
        for p, e in other.items:
            d[p] -= e
        return Factored.from_map(d)

    def exponent(self, p: int) -> int:
        for q, e in self.items:
            if q == p:
                return e
        return 0

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.items)

    def is_one(self) -> bool:
        return not self.items

    def __str__(self) -> str:
        if not self.items:
            return "1"
        return "*".join(f"{p}^{e}" if e > 1 else str(p) for p, e in self.items)

    def to_json(self) -> dict[str, str]:
        return {str(p): str(e) for p, e in self.items}

    @classmethod
    def from_json(cls, data: Mapping[str, str]) -> Factored:
        return cls.from_map({int(p): int(e) for p, e in data.items()})


def lcm_all(values: Iterable[Factored]) -> Factored:
    return reduce(Factored.lcm, values, Factored.one())


def lcm_of_ints(values: Iterable[int]) -> Factored:
    """Factored lcm of machine integers; factors each distinct value once."""
    return lcm_all(Factored.of(v) for v in set(values))
