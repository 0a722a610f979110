"""Group chains as seen by the engine: words, level actions and families."""

from __future__ import annotations

import abc
import os
import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

import numpy as np

from .factored import Factored
from .perm import inverse, orbit
from .steinitz import TailRule

DEFAULT_MAX_POINTS = 2_000_000


class OtlError(Exception):
    pass


class UnknownGenerator(OtlError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return str(self.args[0])


class DepthTooLarge(OtlError):
    pass


class BackendDisagreement(OtlError, AssertionError):
    pass


class AnalyticUnavailable(OtlError):
    pass


class NotInSubgroup(OtlError, ValueError):
    pass


def max_points() -> int:
    return int(os.environ.get("OTL_MAX_POINTS", DEFAULT_MAX_POINTS))


# ---------------------------------------------------------------------------
# words


@dataclass(frozen=True)
class Word:
    """A group element as a product of generator powers, read left to right."""

    letters: tuple[tuple[str, int], ...] = ()

    def __post_init__(self) -> None:
        merged: list[list] = []
        for name, e in self.letters:
            if e == 0:
                continue
            if merged and merged[-1][0] == name:
                merged[-1][1] += e
                if merged[-1][1] == 0:
                    merged.pop()
            else:
                merged.append([name, e])
        object.__setattr__(self, "letters", tuple((n, e) for n, e in merged))

    @classmethod
    def gen(cls, name: str, e: int = 1) -> Word:
        return cls(((name, e),))

    @classmethod
    def identity(cls) -> Word:
        return cls()

    def is_empty(self) -> bool:
        return not self.letters

    def __len__(self) -> int:
        return sum(abs(e) for _, e in self.letters)

    def __mul__(self, other: Word) -> Word:
        return Word(self.letters + other.letters)

    def inverse(self) -> Word:
        return Word(tuple((n, -e) for n, e in reversed(self.letters)))

    def __pow__(self, m: int) -> Word:
        if m < 0:
            return self.inverse() ** (-m)
        return Word(self.letters * m)

    def conjugate_by(self, delta: Word) -> Word:
        """delta * self * delta^-1."""
        return delta * self * delta.inverse()

    def names(self) -> set[str]:
        return {n for n, _ in self.letters}

    def __str__(self) -> str:
        if not self.letters:
            return ""
        compact = all(len(n) == 1 for n, _ in self.letters)
        out = []
        for n, e in self.letters:
            if e == 1:
                out.append(n)
            elif e == -1:
                out.append(n + "'")
            else:
                out.append(f"{n}^{e}")
        return ("" if compact else " ").join(out)


_EXP = re.compile(r"\^(-?\d+)")


def parse_word(text: str, generators: Sequence[str]) -> Word:
    """Parse "ab'", "a b^-2 c", "a*b" style words; "" and "1" are the identity."""
    s = text.strip()
    if s in ("", "1", "e"):
        return Word()
    names = sorted(generators, key=len, reverse=True)
    letters = []
    i = 0
    while i < len(s):
        if s[i] in " *.\t":
            i += 1
            continue
        name = next((n for n in names if s.startswith(n, i)), None)
        if name is None:
            raise UnknownGenerator(f"cannot parse {s[i:]!r} in word {text!r}; generators are {list(generators)}")
        i += len(name)
        e = 1
        m = _EXP.match(s, i)
        if m:
            e = int(m.group(1))
            i = m.end()
        while i < len(s) and s[i] == "'":
            e = -e
            i += 1
        letters.append((name, e))
    return Word(tuple(letters))


def signed_alphabet(generators: Sequence[str], involutions: frozenset[str] = frozenset()) -> list[tuple[str, int]]:
    out = []
    for g in generators:
        out.append((g, 1))
        if g not in involutions:
            out.append((g, -1))
    return out


def enumerate_words(generators: Sequence[str], max_length: int, involutions: frozenset[str] = frozenset()) -> Iterator[Word]:
    """Freely reduced words in graded shortlex order over signed generators.

    Involutions appear only with exponent +1 and never twice in a row.
    """
    alphabet = signed_alphabet(generators, involutions)

    def extend(prefix: list[tuple[str, int]], remaining: int) -> Iterator[list[tuple[str, int]]]:
        if remaining == 0:
            yield prefix
            return
        for letter in alphabet:
            if prefix:
                last = prefix[-1]
                if last[0] == letter[0] and (last[1] != letter[1] or letter[0] in involutions):
                    continue
            yield from extend(prefix + [letter], remaining - 1)

    for length in range(max_length + 1):
        for letters in extend([], length):
            yield Word(tuple(letters))


# ---------------------------------------------------------------------------
# level actions


@dataclass(frozen=True)
class LevelAction:
    level: int
    size: int
    generators: Mapping[str, np.ndarray]
    base: int = 0
    project: np.ndarray | None = None  # X_level -> X_{level-1}; None at level 0
    _inverses: dict = field(default_factory=dict, compare=False, repr=False)

    def perm(self, name: str, e: int = 1) -> np.ndarray:
        if name not in self.generators:
            raise UnknownGenerator(f"unknown generator {name!r}; known: {sorted(self.generators)}")
        p = self.generators[name]
        if e < 0:
            if name not in self._inverses:
                self._inverses[name] = inverse(p)
            p = self._inverses[name]
        return p

    def check(self, previous: LevelAction | None = None) -> None:
        """Raise AssertionError unless the level-action invariants hold."""
        ident = np.arange(self.size)
        for name, p in self.generators.items():
            assert len(p) == self.size, f"{name}: wrong degree"
            assert np.array_equal(np.sort(p), ident), f"{name}: not a bijection"
        reach = orbit(list(self.generators.values()), self.base) if self.generators else [self.base]
        assert len(reach) == self.size, f"level {self.level}: action not transitive ({len(reach)} of {self.size})"
        if previous is None:
            return
        assert self.project is not None
        assert int(self.project[self.base]) == previous.base, "projection does not send base to base"
        for name, p in self.generators.items():
            assert np.array_equal(self.project[p], previous.generators[name][self.project]), (
                f"{name}: projection is not equivariant at level {self.level}"
            )
        counts = np.bincount(self.project, minlength=previous.size)
        assert len(set(counts.tolist())) == 1, "fibres of the projection have unequal sizes"


# ---------------------------------------------------------------------------
# restricted contexts and certificates


@dataclass(frozen=True)
class RestrictedContext:
    """H = delta * Gamma_k * delta^-1 (delta defaults to the identity)."""

    k: int = 0
    conjugator: Word = field(default_factory=Word)

    def is_trivial(self) -> bool:
        return self.k == 0

    def __str__(self) -> str:
        if self.k == 0:
            return "H=Gamma"
        c = str(self.conjugator)
        return f"H=Gamma_{self.k}" if not c else f"H=({c})Gamma_{self.k}({c})^-1"


@dataclass(frozen=True)
class GrowthCertificate:
    """v_p(m_l) >= gain * floor((l - start) / period) for all l >= start.

    A positive gain makes the p-exponent of the order unbounded.
    """

    prime: int
    gain: int
    period: int = 1
    start: int = 0
    reason: str = ""

    def bound(self, level: int) -> int:
        if level < self.start:
            return 0
        return self.gain * ((level - self.start) // self.period)

    def to_json(self) -> dict:
        return {
            "prime": str(self.prime),
            "gain": self.gain,
            "period": self.period,
            "start": self.start,
            "reason": self.reason,
        }


@dataclass(frozen=True)
class PrimeProfile:
    """Closed-form knowledge of an element's order sequence.

    `complete` promises that every prime dividing some m_l is listed in
    `infinite` or `stable`, or is a prime of `tail`.
    """

    infinite: Mapping[int, GrowthCertificate] = field(default_factory=dict)
    stable: Mapping[int, tuple[int, int]] = field(default_factory=dict)  # p -> (exponent, from level)
    complete: bool = False
    tail: TailRule | None = None


TRIVIAL_PROFILE = PrimeProfile(complete=True)


# ---------------------------------------------------------------------------
# families


class ChainFamily(abc.ABC):
    """A presentation of a group chain Gamma = Gamma_0 > Gamma_1 > ...

    Subclasses build level actions (the brute-force backend) and may
    override the ``analytic_*`` methods and :meth:`profile` with closed forms.
    """

    name: str = "family"
    generators: tuple[str, ...] = ()
    involutions: frozenset[str] = frozenset()
    arity: int | None = None  # set for d-regular tree models

    def __init__(self) -> None:
        self._actions: dict[int, LevelAction] = {}

    @abc.abstractmethod
    def params(self) -> dict: ...

    @abc.abstractmethod
    def level_size(self, level: int) -> int: ...

    @abc.abstractmethod
    def _build_action(self, level: int) -> LevelAction: ...

    def level_action(self, level: int) -> LevelAction:
        if level not in self._actions:
            size = self.level_size(level)
            if size > max_points():
                raise DepthTooLarge(
                    f"{self.name}: |X_{level}| = {size} exceeds the brute-force bound {max_points()} (OTL_MAX_POINTS)"
                )
            action = self._build_action(level)
            if action.size != size:
                raise BackendDisagreement(f"{self.name}: level {level} has {action.size} points, expected {size}")
            self._actions[level] = action
        return self._actions[level]

    def brute_force_ok(self, level: int) -> bool:
        return self.level_size(level) <= max_points()

    def parse(self, text: str) -> Word:
        return parse_word(text, self.generators)

    def check_word(self, word: Word) -> None:
        unknown = word.names() - set(self.generators)
        if unknown:
            raise UnknownGenerator(f"unknown generator(s) {sorted(unknown)} for {self.name}")

    # analytic backend: override where a closed form exists
    def analytic_index(self, level: int) -> Factored:
        raise AnalyticUnavailable(f"{self.name}: no closed form for the index")

    def analytic_core_order(self, level: int) -> Factored:
        raise AnalyticUnavailable(f"{self.name}: no closed form for #(Gamma/C_l)")

    def analytic_element_order(self, word: Word, level: int) -> Factored:
        raise AnalyticUnavailable(f"{self.name}: no closed form for element orders")

    def analytic_restricted_order(self, word: Word, ctx: RestrictedContext, level: int) -> Factored:
        if ctx.is_trivial():
            return self.analytic_element_order(word, level)
        raise AnalyticUnavailable(f"{self.name}: no closed form for restricted orders")

    def profile(self, word: Word, ctx: RestrictedContext | None = None) -> PrimeProfile | None:
        return None

    def growth_certificate(self, word: Word, prime: int) -> GrowthCertificate | None:
        prof = self.profile(word)
        if prof is None:
            return None
        return prof.infinite.get(prime)

    def describe(self) -> str:
        return f"{self.name}({', '.join(f'{k}={v}' for k, v in self.params().items())})"

    def __repr__(self) -> str:
        return self.describe()
