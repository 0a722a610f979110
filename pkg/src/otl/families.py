"""Concrete group chains with closed forms next to brute-force coset models.

Lattice families (Z, diagonal Z^n, and Z^n semidirect a permutation group)
share one implementation: a coset of L x {id} is stored as (pi, v) with v
reduced modulo the permuted lattice pi.L.  Heisenberg cosets use residue
normal forms.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .chain import (
    AnalyticUnavailable,
    ChainFamily,
    GrowthCertificate,
    LevelAction,
    PrimeProfile,
    RestrictedContext,
    Word,
)
from .factored import Factored, is_prime, primes_from, valuation
from .perm import as_perm
from .steinitz import ExactSteinitz, INF, TailRule


class FamilyError(ValueError):
    """Invalid family parameters; the message names the offending field."""


def _require_prime(p, field_name: str) -> int:
    if not isinstance(p, int) or isinstance(p, bool) or not is_prime(p):
        raise FamilyError(f"{field_name}: {p!r} is not a prime")
    return p


# ---------------------------------------------------------------------------
# the schedule M_l for one coordinate


@dataclass(frozen=True)
class Schedule:
    """M_l = q_1^n(q_1) ... q_l^n(q_l) * p_1^l ... p_l^l.

    `finite` lists (q, n(q)); `infinite` lists p_1, p_2, ... (missing p_i
    count as 1).  An optional tail continues the q-list with every prime
    >= `tail_start` not already used, each with multiplicity `tail_multiplicity`.
    """

    finite: tuple[tuple[int, int], ...] = ()
    infinite: tuple[int, ...] = ()
    tail_start: int | None = None
    tail_multiplicity: int = 1

    def __post_init__(self) -> None:
        qs = [q for q, _ in self.finite]
        for i, (q, n) in enumerate(self.finite):
            _require_prime(q, f"finite_primes[{i}]")
            if not isinstance(n, int) or n < 1:
                raise FamilyError(f"finite_primes[{i}]: multiplicity must be an int >= 1, got {n!r}")
        for i, p in enumerate(self.infinite):
            _require_prime(p, f"infinite_primes[{i}]")
        if len(set(qs)) != len(qs) or len(set(self.infinite)) != len(self.infinite):
            raise FamilyError("finite_primes / infinite_primes: primes must be distinct")
        if set(qs) & set(self.infinite):
            raise FamilyError("finite_primes and infinite_primes must be disjoint")
        if not self.infinite and self.tail_start is None:
            raise FamilyError("infinite_primes: must be non-empty unless the finite primes continue in a tail")
        if self.tail_start is not None and self.tail_multiplicity < 1:
            raise FamilyError("finite_tail.multiplicity must be >= 1")

    @classmethod
    def parse(cls, d: dict, where: str = "params") -> Schedule:
        try:
            finite = tuple((int(q), int(n)) for q, n in d.get("finite_primes", []))
        except (TypeError, ValueError):
            raise FamilyError(f"{where}.finite_primes: expected a list of [prime, multiplicity] pairs") from None
        infinite = d.get("infinite_primes", [])
        if not isinstance(infinite, list):
            raise FamilyError(f"{where}.infinite_primes: expected a list of primes")
        tail = d.get("finite_tail")
        start, mult = None, 1
        if tail is not None:
            if not isinstance(tail, dict) or "start" not in tail:
                raise FamilyError(f"{where}.finite_tail: expected {{'start': p, 'multiplicity': n}}")
            start, mult = int(tail["start"]), int(tail.get("multiplicity", 1))
        unknown = set(d) - {"finite_primes", "infinite_primes", "finite_tail"}
        if unknown:
            raise FamilyError(f"{where}: unknown field(s) {sorted(unknown)}")
        return cls(finite, tuple(infinite), start, mult)

    def to_json(self) -> dict:
        out: dict = {"finite_primes": [list(x) for x in self.finite], "infinite_primes": list(self.infinite)}
        if self.tail_start is not None:
            out["finite_tail"] = {"start": self.tail_start, "multiplicity": self.tail_multiplicity}
        return out

    def _q_stream(self) -> Iterator[tuple[int, int]]:
        yield from self.finite
        if self.tail_start is None:
            return
        used = {q for q, _ in self.finite} | set(self.infinite)
        for q in primes_from(self.tail_start):
            if q not in used:
                yield q, self.tail_multiplicity

    @lru_cache(maxsize=None)
    def q_prefix(self, level: int) -> tuple[tuple[int, int], ...]:
        return tuple(itertools.islice(self._q_stream(), level))

    def q_index(self, q: int) -> int | None:
        """1-based position of q among the finite primes, if it is one."""
        for i, (r, _) in enumerate(self.finite, start=1):
            if r == q:
                return i
        if self.tail_start is None or q < self.tail_start or not is_prime(q) or q in self.infinite:
            return None
        for i, (r, _) in enumerate(self._q_stream(), start=1):
            if r == q:
                return i
            if r > q:
                return None
        return None  # pragma: no cover

    def factored(self, level: int) -> Factored:
        d: dict[int, int] = dict(self.q_prefix(level))
        for p in self.infinite[:level]:
            d[p] = level
        return Factored.from_map(d)

    def modulus(self, level: int) -> int:
        return int(self.factored(level))

    def tail_rule(self) -> TailRule | None:
        if self.tail_start is None:
            return None
        listed = {q for q, _ in self.finite}
        excl = set(self.infinite) | listed
        base = TailRule.primes_from(self.tail_start, self.tail_multiplicity, excl)
        return base

    def steinitz(self) -> ExactSteinitz:
        """The Steinitz number lcm_l M_l of the schedule."""
        explicit: dict = {q: n for q, n in self.finite}
        explicit.update({p: INF for p in self.infinite})
        return ExactSteinitz.build(explicit, self.tail_rule())


# ---------------------------------------------------------------------------
# Z^n semidirect Delta


def _perm_group_elements(gens: Sequence[tuple[int, ...]], n: int) -> list[tuple[int, ...]]:
    ident = tuple(range(n))
    elems = [ident]
    seen = {ident}
    for g in elems:
        for s in gens:
            h = tuple(s[g[i]] for i in range(n))  # s o g
            if h not in seen:
                seen.add(h)
                elems.append(h)
    return elems


def _perm_inverse(p: tuple[int, ...]) -> tuple[int, ...]:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def _perm_order(p: tuple[int, ...]) -> int:
    seen = [False] * len(p)
    out = 1
    for i in range(len(p)):
        if seen[i]:
            continue
        j, c = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            c += 1
        out = math.lcm(out, c)
    return out


TRANSLATION_NAMES = "abcdefgh"
DELTA_NAMES = "stuvwxyz"


class SemidirectPermutationFamily(ChainFamily):
    """Z^n x| Delta with chain Gamma_l = (M_1(l) Z x ... x M_n(l) Z) x {id}.

    Delta acts by permuting coordinates: (sigma.v)_j = v_{sigma^-1(j)}, and
    (u, sigma)(v, pi) = (u + sigma.v, sigma pi).  Generators: translations
    a, b, ... along the coordinates, then s, t, ... for the Delta generators.

    With ``abelian_prefix`` the chain gains Z^n x {id} as level 1 and the
    schedule levels shift up by one; the completion is unchanged because the
    old chain is a subsequence of the new one.
    """

    name = "semidirect"

    def __init__(self, schedules: Sequence[Schedule], delta: Sequence[Sequence[int]] = (), abelian_prefix: bool = False):
        super().__init__()
        n = len(schedules)
        if not 1 <= n <= len(TRANSLATION_NAMES):
            raise FamilyError(f"schedules: need between 1 and {len(TRANSLATION_NAMES)} coordinates, got {n}")
        if len(delta) > len(DELTA_NAMES):
            raise FamilyError(f"delta: at most {len(DELTA_NAMES)} generators")
        gens = []
        for i, g in enumerate(delta):
            g = tuple(int(x) for x in g)
            if sorted(g) != list(range(n)):
                raise FamilyError(f"delta[{i}]: {list(g)} is not a permutation of 0..{n - 1}")
            gens.append(g)
        self.n = n
        self.schedules = tuple(schedules)
        self.delta_gens = tuple(gens)
        self.abelian_prefix = bool(abelian_prefix)
        self.delta = _perm_group_elements(gens, n)
        self._delta_index = {g: i for i, g in enumerate(self.delta)}
        self.translations = tuple(TRANSLATION_NAMES[:n])
        self.delta_names = tuple(DELTA_NAMES[: len(gens)])
        self.generators = self.translations + self.delta_names
        self.involutions = frozenset(nm for nm, g in zip(self.delta_names, gens) if _perm_order(g) == 2)
        # orbits of Delta on coordinates
        self.orbit_of = list(range(n))
        for g in gens:
            for i in range(n):
                a, b = self._find(i), self._find(g[i])
                if a != b:
                    self.orbit_of[max(a, b)] = min(a, b)
        self.orbit_of = [self._find(i) for i in range(n)]

    def _find(self, i: int) -> int:
        while self.orbit_of[i] != i:
            i = self.orbit_of[i]
        return i

    def params(self) -> dict:
        out: dict = {"schedules": [s.to_json() for s in self.schedules], "delta": [list(g) for g in self.delta_gens]}
        if self.abelian_prefix:
            out["abelian_prefix"] = True
        return out

    # schedule bookkeeping -------------------------------------------------
    def schedule_level(self, level: int) -> int | None:
        """Schedule index used at chain level `level`; None for the prefix level."""
        if self.abelian_prefix:
            if level == 0:
                return None
            return level - 1
        return level

    def moduli(self, level: int) -> tuple[int, ...]:
        s = self.schedule_level(level)
        if s is None or (level == 0):
            return (1,) * self.n
        return tuple(sch.modulus(s) for sch in self.schedules)

    def delta_size_at(self, level: int) -> int:
        return 1 if level == 0 else len(self.delta)

    def level_size(self, level: int) -> int:
        if level == 0:
            return 1
        return len(self.delta) * math.prod(self.moduli(level))

    # coset model ------------------------------------------------------------
    def _permuted_moduli(self, level: int) -> np.ndarray:
        """mods[pi_index, j] = M_{pi^-1(j)}."""
        M = self.moduli(level)
        out = np.empty((len(self.delta), self.n), dtype=np.int64)
        for k, pi in enumerate(self.delta):
            inv = _perm_inverse(pi)
            out[k] = [M[inv[j]] for j in range(self.n)]
        return out

    def _decode(self, level: int) -> tuple[np.ndarray, np.ndarray]:
        size = self.level_size(level)
        per = size // len(self.delta)
        idx = np.arange(size, dtype=np.int64)
        pis = idx // per
        rest = idx % per
        mods = self._permuted_moduli(level)[pis]
        v = np.empty((size, self.n), dtype=np.int64)
        for j in range(self.n - 1, -1, -1):
            v[:, j] = rest % mods[:, j]
            rest //= mods[:, j]
        return pis, v

    def _encode(self, level: int, pis: np.ndarray, v: np.ndarray) -> np.ndarray:
        per = self.level_size(level) // len(self.delta)
        mods = self._permuted_moduli(level)[pis]
        out = np.zeros(len(pis), dtype=np.int64)
        for j in range(self.n):
            out = out * mods[:, j] + np.mod(v[:, j], mods[:, j])
        return pis * per + out

    def _compose_table(self, sigma: tuple[int, ...]) -> np.ndarray:
        return np.array([self._delta_index[tuple(sigma[p[i]] for i in range(self.n))] for p in self.delta])

    def _build_action(self, level: int) -> LevelAction:
        if level == 0:
            one = as_perm([0])
            return LevelAction(0, 1, {g: one for g in self.generators}, 0, None)
        pis, v = self._decode(level)
        gens = {}
        for j, name in enumerate(self.translations):
            w = v.copy()
            w[:, j] += 1
            gens[name] = as_perm(self._encode(level, pis, w))
        for name, sigma in zip(self.delta_names, self.delta_gens):
            inv = _perm_inverse(sigma)
            w = v[:, list(inv)]  # (sigma.v)_j = v_{sigma^-1(j)}
            gens[name] = as_perm(self._encode(level, self._compose_table(sigma)[pis], w))
        if level == 1:
            project = np.zeros(len(pis), dtype=np.int64)
        else:
            project = self._encode(level - 1, pis, v)
        return LevelAction(level, len(pis), gens, 0, project)

    # closed forms -----------------------------------------------------------
    def evaluate(self, word: Word) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """(v, pi) of the group element named by `word`."""
        self.check_word(word)
        v = [0] * self.n
        pi = tuple(range(self.n))
        for name, e in word.letters:
            if name in self.translations:
                j = self.translations.index(name)
                # (v, pi)(e_j, id) = (v + pi.e_j, pi) and pi.e_j = e_{pi(j)}
                v[pi[j]] += e
            else:
                sigma = self.delta_gens[self.delta_names.index(name)]
                step = sigma if e > 0 else _perm_inverse(sigma)
                for _ in range(abs(e)):
                    pi = tuple(pi[step[i]] for i in range(self.n))  # pi o sigma
        return tuple(v), pi

    def core_moduli(self, level: int) -> tuple[int, ...]:
        M = self.moduli(level)
        out = []
        for j in range(self.n):
            orbit = [i for i in range(self.n) if self.orbit_of[i] == self.orbit_of[j]]
            out.append(math.lcm(*(M[i] for i in orbit)))
        return tuple(out)

    def _power_translation(self, v: tuple[int, ...], pi: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
        """(m, w) with m the order of pi and (v, pi)^m = (w, id)."""
        m = _perm_order(pi)
        w = [0] * self.n
        p = tuple(range(self.n))
        for _ in range(m):
            # (v,pi)^(i+1) = (v,pi)^i (v,pi): translation grows by p.v
            for j in range(self.n):
                w[p[j]] += v[j]
            p = tuple(p[pi[i]] for i in range(self.n))
        return m, tuple(w)

    def analytic_index(self, level: int) -> Factored:
        if level == 0:
            return Factored.one()
        out = Factored.of(len(self.delta))
        s = self.schedule_level(level)
        if s is None:
            return out
        for sch in self.schedules:
            out = out * sch.factored(s)
        return out

    def analytic_core_order(self, level: int) -> Factored:
        if level == 0:
            return Factored.one()
        out = Factored.of(len(self.delta))
        for N in self.core_moduli(level):
            out = out * Factored.of(N)
        return out

    def analytic_element_order(self, word: Word, level: int) -> Factored:
        if level == 0:
            return Factored.one()
        v, pi = self.evaluate(word)
        m, w = self._power_translation(v, pi)
        t = 1
        for N, x in zip(self.core_moduli(level), w):
            t = math.lcm(t, N // math.gcd(N, x))
        return Factored.of(m * t)

    def _coordinate_exponent(self, j: int, r: int, whole_orbit: bool = True) -> tuple[float, int] | None:
        """Eventual exponent of r in the modulus of coordinate j (the core
        modulus, or with ``whole_orbit=False`` the schedule modulus), and the
        first schedule level at which it is reached (INF for growing primes:
        the level at which growth starts)."""
        best = None
        for i in range(self.n):
            if i != j and (not whole_orbit or self.orbit_of[i] != self.orbit_of[j]):
                continue
            sch = self.schedules[i]
            if r in sch.infinite:
                cand = (INF, sch.infinite.index(r) + 1)
            else:
                k = sch.q_index(r)
                if k is None:
                    continue
                cand = (sch.q_prefix(k)[-1][1], k)
            if best is None or cand[0] > best[0] or (cand[0] == best[0] and cand[1] < best[1]):
                best = cand
        return best

    def _chain_level(self, schedule_level: int) -> int:
        return schedule_level + 1 if self.abelian_prefix else schedule_level

    def _translation_profile(self, m: int, w: tuple[int, ...], whole_orbit: bool, floor: int) -> PrimeProfile:
        """Profile of l -> m * lcm_j N_j(l) / gcd(N_j(l), w_j) for levels >= floor."""
        nonzero = [j for j in range(self.n) if w[j] != 0]
        related = {
            j: [i for i in range(self.n) if i == j or (whole_orbit and self.orbit_of[i] == self.orbit_of[j])]
            for j in nonzero
        }
        candidates = set(Factored.of(m).primes)
        tails = []
        for j in nonzero:
            for i in related[j]:
                sch = self.schedules[i]
                candidates |= set(sch.infinite) | {q for q, _ in sch.finite}
                if sch.tail_start is not None and i not in tails:
                    tails.append(i)
        infinite: dict[int, GrowthCertificate] = {}
        stable: dict[int, tuple[int, int]] = {}
        for r in sorted(candidates):
            base = valuation(m, r)
            grow, first = None, 1
            extra = 0
            for j in nonzero:
                info = self._coordinate_exponent(j, r, whole_orbit)
                if info is None:
                    continue
                e, k = info
                vw = valuation(w[j], r)
                if e == INF:
                    start = self._chain_level(max(k, vw))
                    if grow is None or start < grow:
                        grow = start
                elif e - vw > extra:
                    extra, first = e - vw, self._chain_level(k)
                elif e - vw == extra and extra > 0:
                    first = min(first, self._chain_level(k))
            if grow is not None:
                infinite[r] = GrowthCertificate(r, 1, 1, max(grow, floor), "schedule exponent grows linearly")
            elif base + extra > 0:
                stable[r] = (base + extra, max(first if extra else 1, floor))
        tail = None
        for i in sorted(tails):
            rule = self.schedules[i].tail_rule()
            tail = rule if tail is None else TailRule.combine("max", tail, rule)
        return PrimeProfile(infinite, stable, complete=True, tail=tail)

    def profile(self, word: Word, ctx: RestrictedContext | None = None) -> PrimeProfile | None:
        if ctx is not None and not ctx.is_trivial():
            if not ctx.conjugator.is_empty():
                return None
            m, u = self._restricted_power(word, ctx.k)
            return self._translation_profile(m, u, False, ctx.k)
        v, pi = self.evaluate(word)
        m, w = self._power_translation(v, pi)
        return self._translation_profile(m, w, True, 1)

    # restriction to H = Gamma_k --------------------------------------------
    def _return_time(self, word: Word, level: int) -> tuple[int, tuple[int, ...]]:
        """(j, u) with j the least power of g in Gamma_level and g^j = (u, id)."""
        v, pi = self.evaluate(word)
        m, w = self._power_translation(v, pi)
        t = 1
        for M, x in zip(self.moduli(level), w):
            t = math.lcm(t, M // math.gcd(M, x))
        return m * t, tuple(t * x for x in w)

    def _restricted_power(self, word: Word, k: int) -> tuple[int, tuple[int, ...]]:
        return self._return_time(word, k)

    def analytic_restricted_order(self, word: Word, ctx: RestrictedContext, level: int) -> Factored:
        """Orders relative to H = Gamma_k, k >= 1, without conjugation.

        Gamma_k is abelian, so its core in Gamma_l is Gamma_l itself; below
        level k the value is the return time of the base coset.
        """
        if ctx.is_trivial():
            return self.analytic_element_order(word, level)
        if not ctx.conjugator.is_empty():
            raise AnalyticUnavailable(f"{self.name}: no closed form for conjugated restrictions")
        if level == 0:
            return Factored.one()
        if level <= ctx.k:
            return Factored.of(self._return_time(word, level)[0])
        m, u = self._restricted_power(word, ctx.k)
        t = 1
        for M, x in zip(self.moduli(level), u):
            t = math.lcm(t, M // math.gcd(M, x))
        return Factored.of(m * t)

    def steinitz_of_group(self) -> ExactSteinitz:
        """xi of the completion: the lcm of the core indices."""
        out = ExactSteinitz.of_int(len(self.delta))
        for sch in self.schedules:
            out = out.lcm(sch.steinitz())
        return out


class ZnDiagonalFamily(SemidirectPermutationFamily):
    """Product of n one-dimensional schedules (trivial Delta)."""

    name = "zn-diagonal"

    def __init__(self, schedules: Sequence[Schedule]):
        super().__init__(schedules, (), False)

    def params(self) -> dict:
        return {"schedules": [s.to_json() for s in self.schedules]}


class ZScheduleFamily(ZnDiagonalFamily):
    """Gamma = Z with Gamma_l = M_l Z; one generator ``a`` (the integer 1)."""

    name = "z-schedule"

    def __init__(self, schedule: Schedule):
        super().__init__([schedule])

    @property
    def schedule(self) -> Schedule:
        return self.schedules[0]

    def params(self) -> dict:
        return self.schedule.to_json()


# ---------------------------------------------------------------------------
# Heisenberg group with a renormalisation chain


def heis_mul(x: tuple[int, int, int], y: tuple[int, int, int]) -> tuple[int, int, int]:
    return (x[0] + y[0], x[1] + y[1], x[2] + y[2] + x[0] * y[1])


def heis_inv(x: tuple[int, int, int]) -> tuple[int, int, int]:
    return (-x[0], -x[1], -x[2] + x[0] * x[1])


def heis_pow(x: tuple[int, int, int], k: int) -> tuple[int, int, int]:
    if k < 0:
        return heis_pow(heis_inv(x), -k)
    a, b, c = x
    return (k * a, k * b, k * c + k * (k - 1) // 2 * a * b)


HEIS_GENERATORS = {"a": (1, 0, 0), "b": (0, 1, 0), "c": (0, 0, 1)}


class HeisenbergFamily(ChainFamily):
    """Upper unitriangular 3x3 integer matrices (a, b, c) with
    (a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab').

    One prime p: Gamma_l = {(p^l a, p^l b, p^2l c)}.  Two primes p, q:
    Gamma_l = {(p^l a, q^l b, (pq)^l c)}.
    """

    name = "heisenberg"
    generators = ("a", "b", "c")

    def __init__(self, p: int, q: int | None = None):
        super().__init__()
        self.p = _require_prime(p, "p")
        self.q = None if q is None else _require_prime(q, "q")
        if self.q == self.p:
            raise FamilyError("q: must differ from p")

    def params(self) -> dict:
        return {"p": self.p} if self.q is None else {"p": self.p, "q": self.q}

    def moduli(self, level: int) -> tuple[int, int, int]:
        p, q = self.p, self.q
        if q is None:
            return (p**level, p**level, p ** (2 * level))
        return (p**level, q**level, (p * q) ** level)

    def core_modulus(self, level: int) -> int:
        if self.q is None:
            return self.p ** (2 * level)
        return (self.p * self.q) ** level

    def primes(self) -> tuple[int, ...]:
        return (self.p,) if self.q is None else tuple(sorted((self.p, self.q)))

    def level_size(self, level: int) -> int:
        return math.prod(self.moduli(level))

    def _normal_form(self, level: int, x, y, z):
        """Representative of (x, y, z) Gamma_l: (x mod A, y mod B, z - x (y - y mod B) mod C)."""
        A, B, C = self.moduli(level)
        xr = np.mod(x, A)
        yr = np.mod(y, B)
        # right-multiply by (-(x - xr), 0, 0) in Gamma_l then by (0, -(y - yr), 0)
        zr = np.mod(z - xr * (y - yr), C)
        return xr, yr, zr

    def _encode(self, level: int, x, y, z):
        A, B, C = self.moduli(level)
        return (x * B + y) * C + z

    def _build_action(self, level: int) -> LevelAction:
        A, B, C = self.moduli(level)
        size = A * B * C
        idx = np.arange(size, dtype=np.int64)
        z = idx % C
        y = (idx // C) % B
        x = idx // (B * C)
        gens = {}
        for name, (ga, gb, gc) in HEIS_GENERATORS.items():
            # g * (x, y, z) = (ga + x, gb + y, gc + z + ga * y)
            nx, ny, nz = self._normal_form(level, x + ga, y + gb, z + gc + ga * y)
            gens[name] = as_perm(self._encode(level, nx, ny, nz))
        project = None
        if level >= 1:
            px, py, pz = self._normal_form(level - 1, x, y, z)
            project = self._encode(level - 1, px, py, pz).astype(np.int64)
        return LevelAction(level, size, gens, 0, project)

    def evaluate(self, word: Word) -> tuple[int, int, int]:
        self.check_word(word)
        g = (0, 0, 0)
        for name, e in word.letters:
            g = heis_mul(g, heis_pow(HEIS_GENERATORS[name], e))
        return g

    def analytic_index(self, level: int) -> Factored:
        out = Factored.one()
        for m in self.moduli(level):
            out = out * Factored.of(m)
        return out

    def analytic_core_order(self, level: int) -> Factored:
        return Factored.of(self.core_modulus(level)) * Factored.of(self.core_modulus(level)) * Factored.of(self.core_modulus(level))

    def in_core(self, g: tuple[int, int, int], level: int) -> bool:
        N = self.core_modulus(level)
        return all(x % N == 0 for x in g)

    def analytic_element_order(self, word: Word, level: int) -> Factored:
        """Least k with g^k in C_l; k divides 2N for the core modulus N."""
        if level == 0:
            return Factored.one()
        g = self.evaluate(word)
        k = 2 * self.core_modulus(level)
        for r in Factored.of(k).primes:
            while k % r == 0 and self.in_core(heis_pow(g, k // r), level):
                k //= r
        return Factored.of(k)

    def profile(self, word: Word, ctx: RestrictedContext | None = None) -> PrimeProfile | None:
        if ctx is not None and not ctx.is_trivial():
            return None
        a, b, c = self.evaluate(word)
        if (a, b, c) == (0, 0, 0):
            return PrimeProfile(complete=True)
        infinite = {}
        for r in self.primes():
            # g^k in C_l forces N | k*a and N | k*b, or N | k*c when a = b = 0
            lead = [x for x in (a, b) if x] or [c]
            v = min(valuation(x, r) for x in lead)
            gain = 2 if self.q is None else 1
            start = -(-v // gain)
            infinite[r] = GrowthCertificate(r, gain, 1, start, "core modulus exponent grows linearly")
        return PrimeProfile(infinite, {}, complete=True)


__all__ = [
    "FamilyError",
    "HeisenbergFamily",
    "Schedule",
    "SemidirectPermutationFamily",
    "ZScheduleFamily",
    "ZnDiagonalFamily",
    "heis_inv",
    "heis_mul",
    "heis_pow",
]
