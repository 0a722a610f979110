"""Permutations of {0..n-1} as numpy index arrays.

Convention: ``p[x]`` is the image of ``x``, and ``compose(a, b)`` is ``a o b``
(apply ``b`` first), i.e. ``a[b]``.
"""

from __future__ import annotations

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .factored import Factored, lcm_of_ints


def _dtype(n: int):
    return np.int32 if n >= 1 << 15 else np.int16


def identity(n: int) -> np.ndarray:
    return np.arange(n, dtype=_dtype(n))


def as_perm(seq) -> np.ndarray:
    a = np.asarray(seq)
    n = len(a)
    p = a.astype(_dtype(n))
    if n and not np.array_equal(np.sort(p), np.arange(n)):
        raise ValueError("not a permutation")
    return p


def compose(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[b]


def inverse(p: np.ndarray) -> np.ndarray:
    out = np.empty_like(p)
    out[p] = np.arange(len(p), dtype=p.dtype)
    return out


def power(p: np.ndarray, k: int) -> np.ndarray:
    if k < 0:
        p, k = inverse(p), -k
    result = identity(len(p))
    base = p
    while k:
        if k & 1:
            result = base[result]
        base = base[base]
        k >>= 1
    return result


def is_identity(p: np.ndarray) -> bool:
    return bool(np.array_equal(p, np.arange(len(p))))


def cycle_lengths(p: np.ndarray) -> np.ndarray:
    """Length of the cycle through each point."""
    n = len(p)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    graph = csr_matrix((np.ones(n, dtype=np.int8), (np.arange(n), p.astype(np.int64))), shape=(n, n))
    _, labels = connected_components(graph, directed=True, connection="weak")
    counts = np.bincount(labels)
    return counts[labels]


def cycle_type(p: np.ndarray) -> tuple[int, ...]:
    lengths = cycle_lengths(p)
    vals, counts = np.unique(lengths, return_counts=True)
    return tuple(sorted(int(v) for v, c in zip(vals, counts) for _ in range(c // int(v))))


def perm_order(p: np.ndarray, points: np.ndarray | None = None) -> Factored:
    """lcm of the cycle lengths, optionally only over cycles meeting `points`."""
    lengths = cycle_lengths(p)
    if points is not None:
        lengths = lengths[points]
    return lcm_of_ints(int(v) for v in np.unique(lengths))


def orbit(gens: list[np.ndarray], start: int) -> list[int]:
    seen = {start}
    queue = [start]
    for x in queue:
        for g in gens:
            y = int(g[x])
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return queue


# ---------------------------------------------------------------------------
# deterministic Schreier-Sims


class StabilizerChain:
    """Base and strong generating set by the deterministic Schreier-Sims method.

    Base points are chosen as the smallest point moved by the first strong
    generator not yet fixing the partial base, and Schreier generators are
    visited in orbit order, so the result is reproducible.
    """

    def __init__(self, gens: list[np.ndarray], degree: int):
        self.degree = degree
        self.base: list[int] = []
        self.strong: list[list[np.ndarray]] = []  # strong[i]: gens fixing base[:i]
        self._uinv: list[dict[int, np.ndarray]] = []  # inverse transversals
        gens = [g for g in gens if not is_identity(g)]
        for g in gens:
            self._ensure_moved(g)
        for i in range(len(self.base)):
            self.strong.append([g for g in gens if all(g[b] == b for b in self.base[:i])])
            self._uinv.append({})
        for i in range(len(self.base)):
            self._rebuild(i)
        self._complete()

    def _ensure_moved(self, g: np.ndarray) -> int:
        for i, b in enumerate(self.base):
            if g[b] != b:
                return i
        moved = np.nonzero(g != np.arange(self.degree))[0]
        self.base.append(int(moved[0]))
        return len(self.base) - 1

    def _rebuild(self, i: int) -> None:
        b = self.base[i]
        ident = identity(self.degree)
        uinv = {b: ident}
        queue = [b]
        for x in queue:
            for s in self.strong[i]:
                y = int(s[x])
                if y not in uinv:
                    # u_y = s o u_x, so u_y^-1 = u_x^-1 o s^-1
                    uinv[y] = uinv[x][inverse(s)]
                    queue.append(y)
        self._uinv[i] = uinv

    def sift(self, h: np.ndarray, start: int = 0) -> tuple[np.ndarray, int]:
        for level in range(start, len(self.base)):
            beta = int(h[self.base[level]])
            u = self._uinv[level].get(beta)
            if u is None:
                return h, level
            h = u[h]
        return h, len(self.base)

    def _complete(self) -> None:
        i = len(self.base) - 1
        while i >= 0:
            restart = self._check_level(i)
            i = restart if restart is not None else i - 1

    def _check_level(self, i: int) -> int | None:
        uinv = self._uinv[i]
        for beta in list(uinv):
            u_beta = inverse(uinv[beta])
            for s in self.strong[i]:
                gamma = int(s[beta])
                h = uinv[gamma][s[u_beta]]
                if is_identity(h):
                    continue
                residue, j = self.sift(h, i + 1)
                if j == len(self.base) and is_identity(residue):
                    continue
                if j == len(self.base):
                    self.base.append(int(np.nonzero(residue != np.arange(self.degree))[0][0]))
                    self.strong.append([])
                    self._uinv.append({})
                for level in range(i + 1, j + 1):
                    self.strong[level].append(residue)
                for level in range(i + 1, j + 1):
                    self._rebuild(level)
                return j
        return None

    def orbit_sizes(self) -> list[int]:
        return [len(u) for u in self._uinv]

    def order(self) -> Factored:
        out = Factored.one()
        for size in self.orbit_sizes():
            out = out * Factored.of(size)
        return out

    def contains(self, g: np.ndarray) -> bool:
        residue, j = self.sift(g)
        return j == len(self.base) and is_identity(residue)


def group_order(gens: list[np.ndarray], degree: int) -> Factored:
    if degree <= 1 or not gens:
        return Factored.one()
    return StabilizerChain(list(gens), degree).order()


def closure_order(gens: list[np.ndarray], degree: int, limit: int = 200_000) -> int:
    """Order by enumerating every element; an independent check for tiny groups."""
    ident = identity(degree)
    seen = {ident.tobytes()}
    queue = [ident]
    for x in queue:
        for g in gens:
            y = g[x]
            key = y.tobytes()
            if key not in seen:
                seen.add(key)
                queue.append(y)
                if len(seen) > limit:
                    raise RuntimeError("group too large to enumerate")
    return len(seen)
