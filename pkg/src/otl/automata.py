"""Self-similar groups on d-ary rooted trees.

A state s is a pair (perm, sections) with s(x w) = perm[x] s|_x(w).  Words
act on the left, the rightmost letter first, so sections obey the cocycle
rule (e f)|_v = e|_{f(v)} f|_v.  Level-l vertices are indexed
lexicographically: x_1 ... x_l has index sum x_i d^(l-i).

Orders are computed on the *order graph*: the node for g has, for every
cycle (x, g x, ..., g^(k-1) x) of its root permutation, an edge of weight k to
the section g^k|_x.  The order of g on level l is the lcm over edges of
k times the level-(l-1) order of the target, so v_p of it is the largest
v_p-weight of a path of length l.  A cycle of the graph through an edge
whose weight is divisible by p makes the p-part unbounded; otherwise every
p-exponent stabilises.  Nodes are taken up to conjugacy (cyclic rotation and
inversion of reduced words), which preserves level orders.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .chain import (
    AnalyticUnavailable,
    ChainFamily,
    DepthTooLarge,
    GrowthCertificate,
    LevelAction,
    PrimeProfile,
    RestrictedContext,
    UnknownGenerator,
    Word,
    max_points,
    parse_word,
)
from .engine import element_order_result
from .factored import Factored, factorint
from .perm import as_perm, identity, orbit
from .steinitz import SteinitzApprox
from .types import TypeDescriptor

DEFAULT_BUDGET = 5000


class AutomatonError(ValueError):
    pass


# ---------------------------------------------------------------------------
# order results


@dataclass(frozen=True)
class Finite:
    order: int
    stable_level: int  # first level on which the full order is attained


@dataclass(frozen=True)
class InfiniteCertified:
    certificates: tuple[GrowthCertificate, ...]
    cycle: tuple[str, ...]  # one certifying cycle of the order graph, as words

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(c.prime for c in self.certificates)


@dataclass(frozen=True)
class UnknownAtBudget:
    nodes: int


OrderStatus = Finite | InfiniteCertified | UnknownAtBudget


@dataclass
class OrderGraph:
    root: Word
    nodes: list[Word]
    edges: list[list[tuple[int, int]]]  # node -> [(target, weight)]
    complete: bool

    def level_orders(self, depth: int) -> list[Factored]:
        """m_1 .. m_depth for the root, by dynamic programming over the graph."""
        cur = [Factored.one()] * len(self.nodes)
        out = []
        weights = {w: Factored.of(w) for es in self.edges for _, w in es}
        for _ in range(depth):
            nxt = []
            for es in self.edges:
                acc = Factored.one()
                for t, w in es:
                    acc = acc.lcm(weights[w] * cur[t])
                nxt.append(acc)
            cur = nxt
            out.append(cur[0])
        return out


# ---------------------------------------------------------------------------
# wreath recursions


@dataclass(frozen=True)
class StateDef:
    perm: tuple[int, ...]
    sections: tuple[Word, ...]


class WreathRecursion:
    """A finite set of states with root permutations and section words."""

    def __init__(self, arity: int, states: Mapping[str, tuple[Sequence[int], Sequence[str | Word]]], name: str = "automaton"):
        if not isinstance(arity, int) or arity < 2:
            raise AutomatonError(f"arity: must be an int >= 2, got {arity!r}")
        if not states:
            raise AutomatonError("states: at least one state is required")
        self.arity = arity
        self.name = name
        self.state_names = tuple(states)
        defs = {}
        for s, (perm, sections) in states.items():
            perm = tuple(int(x) for x in perm)
            if sorted(perm) != list(range(arity)):
                raise AutomatonError(f"states.{s}.perm: {list(perm)} is not a permutation of 0..{arity - 1}")
            if len(sections) != arity:
                raise AutomatonError(f"states.{s}.sections: expected {arity} sections, got {len(sections)}")
            secs = []
            for i, w in enumerate(sections):
                if isinstance(w, str):
                    try:
                        w = parse_word(w, self.state_names)
                    except KeyError as exc:
                        raise AutomatonError(f"states.{s}.sections[{i}]: {exc}") from None
                unknown = w.names() - set(self.state_names)
                if unknown:
                    raise AutomatonError(f"states.{s}.sections[{i}]: unknown state(s) {sorted(unknown)}")
                secs.append(w)
            defs[s] = StateDef(perm, tuple(secs))
        self.defs = defs
        self._inv_perm = {s: tuple(np.argsort(d.perm).tolist()) for s, d in defs.items()}
        self._level_perms: dict[int, dict[str, np.ndarray]] = {}
        self._state_orders: dict[str, int | None] | None = None
        self._trivial = self._trivial_states()

    def _trivial_states(self) -> frozenset[str]:
        """States acting as the identity (greatest fixed point)."""
        cand = {s for s, d in self.defs.items() if d.perm == tuple(range(self.arity))}
        changed = True
        while changed:
            changed = False
            for s in list(cand):
                if any(not w.names() <= cand for w in self.defs[s].sections):
                    cand.discard(s)
                    changed = True
        return frozenset(cand)

    # serialisation ------------------------------------------------------------
    @classmethod
    def from_json(cls, d: Mapping, name: str = "automaton") -> WreathRecursion:
        if "arity" not in d or "states" not in d:
            raise AutomatonError("automaton: expected fields 'arity' and 'states'")
        states = {}
        for s, body in d["states"].items():
            if not isinstance(body, Mapping) or "perm" not in body or "sections" not in body:
                raise AutomatonError(f"states.{s}: expected {{'perm': [...], 'sections': [...]}}")
            states[s] = (body["perm"], body["sections"])
        return cls(int(d["arity"]), states, name)

    def to_json(self) -> dict:
        return {
            "arity": self.arity,
            "states": {s: {"perm": list(d.perm), "sections": [str(w) for w in d.sections]} for s, d in self.defs.items()},
        }

    def __repr__(self) -> str:
        return f"WreathRecursion({self.name}, d={self.arity}, states={list(self.state_names)})"

    # elementary operations ----------------------------------------------------
    def check_word(self, word: Word) -> None:
        unknown = word.names() - set(self.state_names)
        if unknown:
            raise UnknownGenerator(f"unknown state(s) {sorted(unknown)}")

    def _letters(self, word: Word):
        for name, e in word.letters:
            for _ in range(abs(e)):
                yield name, 1 if e > 0 else -1

    def _apply_letter(self, name: str, sign: int, x: int) -> int:
        return self.defs[name].perm[x] if sign > 0 else self._inv_perm[name][x]

    def _letter_section(self, name: str, sign: int, x: int) -> Word:
        if sign > 0:
            return self.defs[name].sections[x]
        return self.defs[name].sections[self._inv_perm[name][x]].inverse()

    def apply(self, word: Word, x: int) -> int:
        """Image of the root symbol x."""
        for name, sign in reversed(list(self._letters(word))):
            x = self._apply_letter(name, sign, x)
        return x

    def root_perm(self, word: Word) -> tuple[int, ...]:
        return tuple(self.apply(word, x) for x in range(self.arity))

    def section(self, word: Word, path: Sequence[int] | int) -> Word:
        """The element acting on the subtree below `path` as `word` does."""
        if isinstance(path, int):
            path = (path,)
        for x in path:
            parts = []
            cur = x
            for name, sign in reversed(list(self._letters(word))):
                parts.append(self._letter_section(name, sign, cur))
                cur = self._apply_letter(name, sign, cur)
            out = Word()
            for p in reversed(parts):
                out = out * p
            word = self.normalize(out)
        return word

    def apply_path(self, word: Word, path: Sequence[int]) -> tuple[int, ...]:
        out = []
        for x in path:
            out.append(self.apply(word, x))
            word = self.section(word, x)
        return tuple(out)

    # level permutations -------------------------------------------------------
    def state_perms(self, level: int) -> dict[str, np.ndarray]:
        if level in self._level_perms:
            return self._level_perms[level]
        size = self.arity**level
        if size > max_points():
            raise DepthTooLarge(f"{self.name}: level {level} has {size} vertices, above the bound {max_points()}")
        if level == 0:
            perms = {s: identity(1) for s in self.state_names}
        else:
            below = self.state_perms(level - 1)
            inv_below = {}
            block = self.arity ** (level - 1)
            perms = {}
            for s, d in self.defs.items():
                out = np.empty(size, dtype=np.int64)
                for x in range(self.arity):
                    sec = self._word_perm(d.sections[x], below, inv_below, block)
                    out[x * block : (x + 1) * block] = d.perm[x] * block + sec
                perms[s] = as_perm(out)
        self._level_perms[level] = perms
        return perms

    @staticmethod
    def _word_perm(word: Word, perms, inv_cache, size: int) -> np.ndarray:
        result = np.arange(size)
        for name, e in word.letters:
            if e > 0:
                p = perms[name]
            else:
                if name not in inv_cache:
                    q = np.empty_like(perms[name])
                    q[perms[name]] = np.arange(size, dtype=perms[name].dtype)
                    inv_cache[name] = q
                p = inv_cache[name]
            for _ in range(abs(e)):
                result = result[p]
        return result

    def act_on_level(self, word: Word, level: int) -> np.ndarray:
        self.check_word(word)
        return as_perm(self._word_perm(word, self.state_perms(level), {}, self.arity**level))

    # normal forms ------------------------------------------------------------
    def state_orders(self) -> dict[str, int | None]:
        """Order of each state (None if infinite or undecided)."""
        if self._state_orders is None:
            self._state_orders = {}
            for s in self.state_names:
                status = self.element_order(Word.gen(s), DEFAULT_BUDGET, reduce_powers=False)
                self._state_orders[s] = status.order if isinstance(status, Finite) else None
        return self._state_orders

    def normalize(self, word: Word, reduce_powers: bool = True) -> Word:
        """Free reduction, dropping trivial states and reducing powers of
        finite-order states into (-n/2, n/2]."""
        orders = self.state_orders() if reduce_powers and self._state_orders is not None else {}
        stack: list[list] = []
        for name, e in word.letters:
            if name in self._trivial:
                continue
            if stack and stack[-1][0] == name:
                stack[-1][1] += e
            else:
                stack.append([name, e])
            while stack:
                n, x = stack[-1]
                o = orders.get(n)
                if o:
                    x %= o
                    if x > o // 2:
                        x -= o
                    stack[-1][1] = x
                if x == 0:
                    stack.pop()
                    continue
                break
        return Word(tuple((n, e) for n, e in stack))

    def canonical(self, word: Word, reduce_powers: bool = True) -> Word:
        """A representative of the conjugacy class visible from the word: the
        least cyclic rotation of the cyclically reduced word or its inverse."""
        w = self.normalize(word, reduce_powers)
        while len(w.letters) > 1 and w.letters[0][0] == w.letters[-1][0]:
            (n, a), (_, b) = w.letters[0], w.letters[-1]
            w = self.normalize(Word(((n, a + b),) + w.letters[1:-1]), reduce_powers)
        if not w.letters:
            return w
        best = None
        for cand in (w, w.inverse()):
            L = cand.letters
            for i in range(len(L)):
                rot = L[i:] + L[:i]
                if best is None or rot < best:
                    best = rot
        return Word(best)

    # the order graph -----------------------------------------------------------
    def order_graph(self, word: Word, budget: int = DEFAULT_BUDGET, reduce_powers: bool = True) -> OrderGraph:
        self.check_word(word)
        root = self.canonical(word, reduce_powers)
        index = {root: 0}
        nodes = [root]
        edges: list[list[tuple[int, int]]] = []
        i = 0
        while i < len(nodes):
            g = nodes[i]
            out = []
            perm = self.root_perm(g)
            seen = [False] * self.arity
            for x in range(self.arity):
                if seen[x]:
                    continue
                k, y = 0, x
                while not seen[y]:
                    seen[y] = True
                    y = perm[y]
                    k += 1
                h = self.canonical(self.section(g**k, x), reduce_powers)
                if h not in index:
                    if len(nodes) >= budget:
                        edges.append(out)
                        return OrderGraph(root, nodes, edges, complete=False)
                    index[h] = len(nodes)
                    nodes.append(h)
                out.append((index[h], k))
            edges.append(out)
            i += 1
        return OrderGraph(root, nodes, edges, complete=True)

    def element_order(self, word: Word, budget: int = DEFAULT_BUDGET, reduce_powers: bool = True) -> OrderStatus:
        """Finite(n), InfiniteCertified(witness) or UnknownAtBudget."""
        if reduce_powers and self._state_orders is None:
            self.state_orders()
        graph = self.order_graph(word, budget, reduce_powers)
        if not graph.complete:
            return UnknownAtBudget(len(graph.nodes))
        analysis = _analyse(graph)
        if analysis.infinite:
            return InfiniteCertified(tuple(analysis.infinite.values()), analysis.witness_cycle)
        return Finite(analysis.finite_order, analysis.stable_level)

    def profile(self, word: Word, budget: int = DEFAULT_BUDGET) -> PrimeProfile | None:
        """Closed-form data for the orders of `word` on the full tree levels."""
        if self._state_orders is None:
            self.state_orders()
        graph = self.order_graph(word, budget)
        if not graph.complete:
            return None
        a = _analyse(graph)
        return PrimeProfile(a.infinite, a.stable, complete=True)


# ---------------------------------------------------------------------------
# graph analysis


@dataclass
class _Analysis:
    infinite: dict[int, GrowthCertificate] = field(default_factory=dict)
    stable: dict[int, tuple[int, int]] = field(default_factory=dict)
    witness_cycle: tuple[str, ...] = ()
    finite_order: int = 1
    stable_level: int = 0


def _scc_labels(graph: OrderGraph) -> np.ndarray:
    rows, cols = [], []
    for u, es in enumerate(graph.edges):
        for v, _ in es:
            rows.append(u)
            cols.append(v)
    n = len(graph.nodes)
    m = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
    _, labels = connected_components(m, directed=True, connection="strong")
    return labels


def _bfs_path(graph: OrderGraph, src: int, dst: int, allowed=None) -> list[tuple[int, int, int]] | None:
    """Shortest edge path src -> dst as (u, v, weight) triples."""
    prev: dict[int, tuple[int, int]] = {src: (-1, 0)}
    queue = [src]
    for u in queue:
        if u == dst and u != src:
            break
        for v, w in graph.edges[u]:
            if allowed is not None and v not in allowed:
                continue
            if v not in prev:
                prev[v] = (u, w)
                queue.append(v)
    if dst not in prev:
        return None
    path = []
    v = dst
    while v != src:
        u, w = prev[v]
        path.append((u, v, w))
        v = u
    return path[::-1]


def _analyse(graph: OrderGraph) -> _Analysis:
    labels = _scc_labels(graph)
    out = _Analysis()
    primes = sorted({p for es in graph.edges for _, w in es for p in factorint(w)})
    for p in primes:
        cyc_edge = None
        for u, es in enumerate(graph.edges):
            for v, w in es:
                if labels[u] == labels[v] and w % p == 0:
                    cyc_edge = (u, v, w)
                    break
            if cyc_edge:
                break
        if cyc_edge is not None:
            u, v, w = cyc_edge
            comp = {i for i in range(len(graph.nodes)) if labels[i] == labels[u]}
            back = [] if v == u else _bfs_path(graph, v, u, comp)
            cycle = [(u, v, w)] + back
            gain = sum(_vp(x, p) for _, _, x in cycle)
            lead = [] if u == 0 else _bfs_path(graph, 0, u)
            out.infinite[p] = GrowthCertificate(
                p, gain, len(cycle), len(lead), "a cycle of sections multiplies the order by a multiple of p"
            )
            if not out.witness_cycle:
                out.witness_cycle = tuple(str(graph.nodes[a]) or "1" for a, _, _ in cycle)
            continue
        # longest v_p-weighted path of each exact length; stabilises since no
        # cycle carries p
        cur = [0] * len(graph.nodes)
        level, best, first = 0, 0, 0
        for level in range(1, len(graph.nodes) + 2):
            nxt = [max((_vp(w, p) + cur[t] for t, w in es), default=0) for es in graph.edges]
            if nxt[0] > best:
                best, first = nxt[0], level
            if nxt == cur:
                break
            cur = nxt
        if best:
            out.stable[p] = (best, first)
    if not out.infinite:
        out.finite_order = math.prod(p**e for p, (e, _) in out.stable.items())
        out.stable_level = max((lv for _, lv in out.stable.values()), default=0)
    return out


def _vp(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# ---------------------------------------------------------------------------
# the catalogue


def adding_machine() -> WreathRecursion:
    return WreathRecursion(2, {"a": ((1, 0), ("", "a"))}, "adding-machine")


def grigorchuk() -> WreathRecursion:
    return WreathRecursion(
        2,
        {
            "a": ((1, 0), ("", "")),
            "b": ((0, 1), ("a", "c")),
            "c": ((0, 1), ("a", "d")),
            "d": ((0, 1), ("", "b")),
        },
        "grigorchuk",
    )


def basilica() -> WreathRecursion:
    return WreathRecursion(2, {"a": ((0, 1), ("", "b")), "b": ((1, 0), ("", "a"))}, "basilica")


def gupta_sidki(p: int = 3) -> WreathRecursion:
    """GS(p): s rotates the root symbols, t = (s, s^-1, 1, ..., 1, t)."""
    from .factored import is_prime

    if not isinstance(p, int) or p < 3 or not is_prime(p):
        raise AutomatonError(f"p: Gupta-Sidki needs an odd prime, got {p!r}")
    rot = tuple((i + 1) % p for i in range(p))
    secs = ("s", "s'") + ("",) * (p - 3) + ("t",)
    return WreathRecursion(p, {"s": (rot, ("",) * p), "t": (tuple(range(p)), secs)}, f"gupta-sidki-{p}")


CATALOG = {
    "adding-machine": adding_machine,
    "grigorchuk": grigorchuk,
    "basilica": basilica,
    "gupta-sidki": gupta_sidki,
}

# groups known to act level-transitively
LEVEL_TRANSITIVE = {"adding-machine", "grigorchuk", "basilica", "gupta-sidki"}


def prime_divisors_upto(d: int) -> tuple[int, ...]:
    """P_d: the primes dividing some integer in 2..d."""
    return tuple(p for p in range(2, d + 1) if all(p % q for q in range(2, math.isqrt(p) + 1)))


def typeset_bound(d: int) -> int:
    """2^N_d, the number of subsets of P_d."""
    if d < 2:
        raise ValueError("arity must be >= 2")
    n = len(prime_divisors_upto(d))
    total = sum(math.comb(n, j) for j in range(n + 1))
    assert total == 2**n
    return total


# ---------------------------------------------------------------------------
# stabiliser chains as ChainFamily


class AutomatonFamily(ChainFamily):
    """Gamma_l = stabiliser of the vertex v_l of a path, acting on its orbit.

    The default path is 0 0 0 ...; `path` may give the symbols explicitly and
    is repeated periodically.
    """

    def __init__(self, wreath: WreathRecursion, path: Sequence[int] = (0,), level_transitive: bool | None = None, name: str | None = None):
        super().__init__()
        if not path or any(not 0 <= x < wreath.arity for x in path):
            raise AutomatonError(f"path: symbols must lie in 0..{wreath.arity - 1}")
        self.wreath = wreath
        self.path = tuple(int(x) for x in path)
        self.name = name or wreath.name
        self.generators = wreath.state_names
        self.arity = wreath.arity
        self.involutions = frozenset(s for s, o in wreath.state_orders().items() if o == 2)
        if level_transitive is None:
            level_transitive = self.name in LEVEL_TRANSITIVE
        self.level_transitive = bool(level_transitive)
        self._orbits: dict[int, np.ndarray] = {}

    def params(self) -> dict:
        out: dict = {}
        if self.name.startswith("gupta-sidki"):
            out["p"] = self.arity
        if self.name not in CATALOG and not self.name.startswith("gupta-sidki"):
            out["automaton"] = self.wreath.to_json()
        if self.path != (0,):
            out["path"] = list(self.path)
        return out

    def vertex(self, level: int) -> tuple[int, ...]:
        return tuple(self.path[i % len(self.path)] for i in range(level))

    def vertex_index(self, level: int) -> int:
        idx = 0
        for x in self.vertex(level):
            idx = idx * self.arity + x
        return idx

    def orbit_points(self, level: int) -> np.ndarray:
        """Sorted level-l vertex indices in the orbit of v_l."""
        if level not in self._orbits:
            if self.level_transitive:
                pts = np.arange(self.arity**level)
            else:
                perms = list(self.wreath.state_perms(level).values())
                pts = np.array(sorted(orbit(perms, self.vertex_index(level))))
            self._orbits[level] = pts
        return self._orbits[level]

    def level_size(self, level: int) -> int:
        if self.level_transitive:
            return self.arity**level
        if self.arity**level > max_points():
            raise DepthTooLarge(f"{self.name}: orbit size at level {level} needs the full level ({self.arity**level} vertices)")
        return len(self.orbit_points(level))

    def _build_action(self, level: int) -> LevelAction:
        full = self.wreath.state_perms(level)
        pts = self.orbit_points(level)
        local = np.full(self.arity**level, -1, dtype=np.int64)
        local[pts] = np.arange(len(pts))
        gens = {s: as_perm(local[full[s][pts]]) for s in self.generators}
        base = int(local[self.vertex_index(level)])
        project = None
        if level >= 1:
            below = self.orbit_points(level - 1)
            lb = np.full(self.arity ** (level - 1), -1, dtype=np.int64)
            lb[below] = np.arange(len(below))
            project = lb[pts // self.arity]
        return LevelAction(level, len(pts), gens, base, project)

    def check_word(self, word: Word) -> None:
        self.wreath.check_word(word)

    # closed forms from the order graph (full levels only)
    @lru_cache(maxsize=4096)
    def _graph(self, word: Word) -> OrderGraph | None:
        g = self.wreath.order_graph(word)
        return g if g.complete else None

    def analytic_element_order(self, word: Word, level: int) -> Factored:
        g = self._graph(word) if self.level_transitive else None
        if g is None:
            raise AnalyticUnavailable(f"{self.name}: no order graph for {word}")
        return g.level_orders(level)[-1] if level else Factored.one()

    def profile(self, word: Word, ctx: RestrictedContext | None = None) -> PrimeProfile | None:
        if not self.level_transitive or (ctx is not None and not ctx.is_trivial()):
            return None
        g = self._graph(word)
        if g is None:
            return None
        a = _analyse(g)
        return PrimeProfile(a.infinite, a.stable, complete=True)

    def element_order(self, word: Word, budget: int = DEFAULT_BUDGET) -> OrderStatus:
        return self.wreath.element_order(word, budget)

    def __hash__(self) -> int:
        return id(self)


def stabilizer_chain_family(wreath: WreathRecursion, path: Sequence[int] = (0,), level_transitive: bool | None = None) -> AutomatonFamily:
    return AutomatonFamily(wreath, path, level_transitive)


def catalog_family(name: str, **params) -> AutomatonFamily:
    if name not in CATALOG:
        raise AutomatonError(f"unknown automaton {name!r}; known: {sorted(CATALOG)}")
    path = params.pop("path", (0,))
    w = CATALOG[name](**params)
    return AutomatonFamily(w, path, name=name)


def element_type(family: AutomatonFamily, word: Word, depth: int) -> tuple[SteinitzApprox, TypeDescriptor]:
    """xi(word) to `depth` and its type, certified from the order graph when it closes."""
    res = element_order_result(word, depth, family)
    return res.approx, res.type


def load_wreath(text: str, name: str = "automaton") -> WreathRecursion:
    return WreathRecursion.from_json(json.loads(text), name)


__all__ = [
    "AutomatonError",
    "AutomatonFamily",
    "CATALOG",
    "Finite",
    "InfiniteCertified",
    "OrderGraph",
    "UnknownAtBudget",
    "WreathRecursion",
    "adding_machine",
    "basilica",
    "catalog_family",
    "element_type",
    "grigorchuk",
    "gupta_sidki",
    "prime_divisors_upto",
    "stabilizer_chain_family",
    "typeset_bound",
]
