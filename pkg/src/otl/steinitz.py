"""Steinitz (supernatural) numbers, prime spectra and asymptotic equivalence."""

from __future__ import annotations

import enum
import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence, Union

from .factored import Factored, factorint, is_prime, primes_from

INF = math.inf
Exponent = Union[int, float]  # a positive int, or INF


class Verdict(enum.Enum):
    YES = "yes"
    NO = "no"
    INCONCLUSIVE = "inconclusive"


class InvalidSequence(ValueError):
    pass


def _check_exponent(e: Exponent) -> None:
    if e == INF:
        return
    if not isinstance(e, int) or isinstance(e, bool) or e < 1:
        raise ValueError(f"exponent must be an int >= 1 or INF, got {e!r}")


def format_exponent(e: Exponent) -> str:
    return "inf" if e == INF else str(int(e))


def parse_exponent(s: str) -> Exponent:
    return INF if s == "inf" else int(s)


# ---------------------------------------------------------------------------
# tail rules


TailStream = Callable[[], Iterator[tuple[int, int]]]


@dataclass(frozen=True)
class TailRule:
    """An infinite, increasing stream of (prime, finite exponent) pairs.

    Two rules are treated as the same only when their tokens match; nothing
    is ever inferred from comparing the streams themselves.
    """

    token: str
    stream: TailStream = field(compare=False, hash=False, repr=False)
    infinite: bool = True

    def __iter__(self) -> Iterator[tuple[int, int]]:
        last = 0
        for p, e in self.stream():
            if p <= last:
                raise ValueError(f"tail rule {self.token!r} is not strictly increasing at {p}")
            if not is_prime(p):
                raise ValueError(f"tail rule {self.token!r} produced non-prime {p}")
            if not isinstance(e, int) or e < 1:
                raise ValueError(f"tail rule {self.token!r} produced bad exponent {e!r}")
            last = p
            yield p, e

    def prefix(self, n: int) -> list[tuple[int, int]]:
        return list(itertools.islice(self, n))

    def exponent(self, p: int) -> int:
        for q, e in self:
            if q == p:
                return e
            if q > p:
                return 0
        return 0  # pragma: no cover - infinite streams never exhaust

    @classmethod
    def primes_from(cls, start: int, exponent: int = 1, exclude: Iterable[int] = ()) -> TailRule:
        """All primes >= start outside `exclude`, each with the same exponent."""
        excl = frozenset(exclude)
        token = f"primes>={start}^{exponent}" + (f"\\{sorted(excl)}" if excl else "")

        def stream() -> Iterator[tuple[int, int]]:
            for p in primes_from(start):
                if p not in excl:
                    yield p, exponent

        return cls(token, stream)

    @classmethod
    def combine(cls, op: str, a: TailRule, b: TailRule) -> TailRule:
        """Pointwise sum/max/min of two tails."""
        fn = {"sum": lambda x, y: x + y, "max": max, "min": min}[op]
        if op != "sum" and a.token == b.token:
            return a
        token = f"{op}({a.token},{b.token})"

        def stream() -> Iterator[tuple[int, int]]:
            merged = heapq.merge(((p, e, 0) for p, e in a), ((p, e, 1) for p, e in b))
            pending: dict[int, list[int]] = {}
            for p, e, _ in merged:
                # heapq.merge yields equal primes adjacently
                if pending and p not in pending:
                    (q, es), = pending.items()
                    v = _combine_pair(fn, es, op)
                    if v:
                        yield q, v
                    pending.clear()
                pending.setdefault(p, []).append(e)

        return cls(token, stream, infinite=a.infinite or b.infinite if op != "min" else False)


def _combine_pair(fn, es: list[int], op: str) -> int:
    if len(es) == 2:
        return fn(es[0], es[1])
    # the prime occurs in only one stream: the other exponent is 0
    return fn(es[0], 0)


# ---------------------------------------------------------------------------
# exact Steinitz numbers


@dataclass(frozen=True)
class ExactSteinitz:
    """prod p^chi(p): an explicit finite part plus an optional tail rule.

    Explicit entries override the tail at the same prime; the effective tail
    (:meth:`tail_items`) skips them.
    """

    explicit: tuple[tuple[int, Exponent], ...] = ()
    tail: TailRule | None = None

    def __post_init__(self) -> None:
        seen = set()
        for p, e in self.explicit:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
            if p in seen:
                raise ValueError(f"duplicate prime {p}")
            seen.add(p)
            _check_exponent(e)
        object.__setattr__(self, "explicit", tuple(sorted(self.explicit)))

    @classmethod
    def build(cls, explicit: Mapping[int, Exponent] | None = None, tail: TailRule | None = None) -> ExactSteinitz:
        explicit = explicit or {}
        return cls(tuple((p, e) for p, e in explicit.items() if e != 0), tail)

    @classmethod
    def of_int(cls, n: int) -> ExactSteinitz:
        return cls.build(factorint(n))

    @classmethod
    def from_factored(cls, f: Factored) -> ExactSteinitz:
        return cls(f.items)

    @classmethod
    def one(cls) -> ExactSteinitz:
        return cls()

    @property
    def explicit_map(self) -> dict[int, Exponent]:
        return dict(self.explicit)

    def tail_items(self) -> Iterator[tuple[int, int]]:
        if self.tail is None:
            return iter(())
        ex = self.explicit_map
        return ((p, e) for p, e in self.tail if p not in ex)

    def chi(self, p: int) -> Exponent:
        ex = self.explicit_map
        if p in ex:
            return ex[p]
        if self.tail is None:
            return 0
        return self.tail.exponent(p)

    def is_one(self) -> bool:
        return not self.explicit and self.tail is None

    def _merge(self, other: ExactSteinitz, fn, op: str) -> ExactSteinitz:
        a, b = self.explicit_map, other.explicit_map
        out: dict[int, Exponent] = {}
        for p in set(a) | set(b):
            # a prime explicit on one side may live in the other side's tail
            x = a[p] if p in a else self.chi(p)
            y = b[p] if p in b else other.chi(p)
            v = fn(x, y)
            if v:
                out[p] = v
        if self.tail is None and other.tail is None:
            tail = None
        elif op == "min":
            tail = TailRule.combine("min", self.tail, other.tail) if self.tail and other.tail else None
        elif self.tail is None or other.tail is None:
            tail = self.tail or other.tail
        else:
            tail = TailRule.combine(op, self.tail, other.tail)
        return ExactSteinitz.build(out, tail)

    def __mul__(self, other: ExactSteinitz | int) -> ExactSteinitz:
        if isinstance(other, int):
            other = ExactSteinitz.of_int(other)
        return self._merge(other, lambda x, y: x + y, "sum")

    __rmul__ = __mul__

    def lcm(self, other: ExactSteinitz) -> ExactSteinitz:
        return self._merge(other, max, "max")

    def gcd(self, other: ExactSteinitz) -> ExactSteinitz:
        return self._merge(other, min, "min")

    def __str__(self) -> str:
        parts = [f"{p}^{format_exponent(e)}" if e != 1 else str(p) for p, e in self.explicit]
        if self.tail is not None:
            parts.append(f"<{self.tail.token}>")
        return "*".join(parts) if parts else "1"


@dataclass(frozen=True)
class PrimeSpectra:
    """Explicitly known spectra; `pi_f_is_infinite` accounts for a tail."""

    pi: frozenset[int]
    pi_f: frozenset[int]
    pi_inf: frozenset[int]
    pi_f_is_infinite: Verdict


def spectra(x: ExactSteinitz) -> PrimeSpectra:
    pi_inf = frozenset(p for p, e in x.explicit if e == INF)
    pi_f = frozenset(p for p, e in x.explicit if e != INF)
    if x.tail is None:
        flag = Verdict.NO
    else:
        flag = Verdict.YES if x.tail.infinite else Verdict.INCONCLUSIVE
    return PrimeSpectra(pi_inf | pi_f, pi_f, pi_inf, flag)


def asymptotically_equivalent(x: ExactSteinitz, y: ExactSteinitz) -> Verdict:
    """Equal after multiplying each side by some finite integer."""
    if spectra(x).pi_inf != spectra(y).pi_inf:
        return Verdict.NO
    if x.tail is None and y.tail is None:
        return Verdict.YES
    if x.tail is not None and y.tail is not None:
        if x.tail.token == y.tail.token:
            return Verdict.YES
        return Verdict.INCONCLUSIVE
    only = x.tail if x.tail is not None else y.tail
    if only.infinite:
        # infinitely many primes with positive exponent on one side only
        return Verdict.NO
    return Verdict.INCONCLUSIVE


# ---------------------------------------------------------------------------
# depth-L approximations


@dataclass(frozen=True)
class Stable:
    exponent: int


@dataclass(frozen=True)
class CertifiedInfinite:
    certificate: object = field(default=None, compare=False)


@dataclass(frozen=True)
class UnknownAtDepth:
    pass


PrimeStatus = Union[Stable, CertifiedInfinite, UnknownAtDepth]
UNKNOWN = UnknownAtDepth()


@dataclass(frozen=True)
class SteinitzApprox:
    depth: int
    value: Factored
    status: tuple[tuple[int, PrimeStatus], ...] = ()
    # lcm after each level 1..depth; empty when only the final value is known
    history: tuple[Factored, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        st = dict(self.status)
        for p, s in st.items():
            if isinstance(s, Stable) and self.value.exponent(p) != s.exponent:
                raise ValueError(f"prime {p} marked Stable({s.exponent}) but has exponent {self.value.exponent(p)}")
        object.__setattr__(self, "status", tuple(sorted(st.items())))

    @property
    def status_map(self) -> dict[int, PrimeStatus]:
        return dict(self.status)

    def status_of(self, p: int) -> PrimeStatus:
        return self.status_map.get(p, UNKNOWN)

    def is_decided(self) -> bool:
        return all(not isinstance(self.status_of(p), UnknownAtDepth) for p in self.value.primes)

    def to_exact(self, tail: TailRule | None = None) -> ExactSteinitz:
        """The limit, assuming every prime's status is decided."""
        out: dict[int, Exponent] = {}
        for p, e in self.value.items:
            s = self.status_of(p)
            if isinstance(s, CertifiedInfinite):
                out[p] = INF
            elif isinstance(s, Stable):
                out[p] = s.exponent
            else:
                raise ValueError(f"prime {p} undecided at depth {self.depth}")
        for p, s in self.status:
            if isinstance(s, CertifiedInfinite):
                out[p] = INF
        return ExactSteinitz.build(out, tail)

    def __str__(self) -> str:
        bits = []
        for p, e in self.value.items:
            s = self.status_of(p)
            mark = "inf" if isinstance(s, CertifiedInfinite) else ("" if isinstance(s, Stable) else "?")
            bits.append(f"{p}^{e}{'(' + mark + ')' if mark else ''}")
        return "*".join(bits) if bits else "1"


def status_to_json(s: PrimeStatus) -> dict[str, str]:
    if isinstance(s, Stable):
        return {"kind": "stable", "exponent": str(s.exponent)}
    if isinstance(s, CertifiedInfinite):
        return {"kind": "certified_infinite", "exponent": "inf"}
    return {"kind": "unknown"}


def status_from_json(d: Mapping[str, str]) -> PrimeStatus:
    kind = d["kind"]
    if kind == "stable":
        return Stable(int(d["exponent"]))
    if kind == "certified_infinite":
        return CertifiedInfinite()
    return UNKNOWN


def approx_to_json(a: SteinitzApprox) -> dict:
    return {
        "depth": a.depth,
        "value": a.value.to_json(),
        "status": {str(p): status_to_json(s) for p, s in a.status},
    }


def approx_from_json(d: Mapping) -> SteinitzApprox:
    return SteinitzApprox(
        int(d["depth"]),
        Factored.from_json(d["value"]),
        tuple((int(p), status_from_json(s)) for p, s in d["status"].items()),
    )


def steinitz_from_sequence(m: Sequence[int], depth: int, complete: bool = False) -> SteinitzApprox:
    """lcm of the partial products m_1 ... m_l for l <= depth.

    With ``complete=True`` the sequence is known to end at `depth` (all later
    terms are 1), so every prime is Stable.
    """
    if depth > len(m):
        raise InvalidSequence(f"depth {depth} exceeds sequence length {len(m)}")
    value = Factored.one()
    partial = Factored.one()
    history = []
    for i, v in enumerate(m[:depth]):
        if not isinstance(v, int) or v < 1:
            raise InvalidSequence(f"entry {i} is {v!r}; entries must be integers >= 1")
        partial = partial * Factored.of(v)
        value = value.lcm(partial)
        history.append(value)
    status = tuple((p, Stable(e)) for p, e in value.items) if complete else ()
    return SteinitzApprox(depth, value, status, tuple(history))
