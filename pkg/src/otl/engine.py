"""Orders, Steinitz orders, restricted orders and typesets of group chains."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .chain import (
    AnalyticUnavailable,
    BackendDisagreement,
    ChainFamily,
    DepthTooLarge,
    LevelAction,
    NotInSubgroup,
    PrimeProfile,
    RestrictedContext,
    Word,
    enumerate_words,
)
from .factored import Factored
from .perm import StabilizerChain, cycle_lengths, identity, is_identity, perm_order
from .steinitz import CertifiedInfinite, Stable, SteinitzApprox
from .types import (
    TRIVIAL_TYPE,
    TypeDescriptor,
    Verdict,
    equal_up_to_depth,
    provably_distinct,
    type_equal,
    type_from_approx,
)

# Schreier-Sims on permutation arrays is only used on modest coset spaces;
# past this the analytic core order is required.
IMAGE_ORDER_MAX_POINTS = 4096
# reports and property runs stop the stabiliser chain much earlier: tree
# groups such as Grigorchuk's have images of order 2^162 on 256 points
CHECK_IMAGE_MAX_POINTS = 64
# brute force re-checks closed forms on coset spaces up to this size
DEFAULT_CROSSCHECK_POINTS = 1 << 16


def permutation_of(word: Word, action: LevelAction) -> np.ndarray:
    """The permutation of X_l induced by `word` (rightmost letter acts first)."""
    result = identity(action.size)
    for name, e in word.letters:
        p = action.perm(name, 1 if e > 0 else -1)
        for _ in range(abs(e)):
            result = result[p]
    return result


def permutation_order(p: np.ndarray) -> Factored:
    return perm_order(p)


# ---------------------------------------------------------------------------
# single levels


def crosscheck_max_points() -> int:
    return int(os.environ.get("OTL_CROSSCHECK_POINTS", DEFAULT_CROSSCHECK_POINTS))


def _dual(family: ChainFamily, level: int, brute, analytic, what: str) -> Factored:
    """Run the closed form and, where affordable, the brute-force model.

    Brute force runs whenever no closed form exists (up to the point bound)
    and, as a cross-check, on levels of at most crosscheck_max_points().
    """
    try:
        a = analytic()
    except AnalyticUnavailable:
        a = None
    if a is not None and family.level_size(level) > crosscheck_max_points():
        return a
    if not family.brute_force_ok(level):
        if a is None:
            raise DepthTooLarge(
                f"{family.describe()}: level {level} is beyond the brute-force bound and {what} has no closed form"
            )
        return a
    b = brute()
    if a is not None and a != b:
        raise BackendDisagreement(f"{family.describe()}: {what} at level {level}: brute force {b}, closed form {a}")
    return b


def element_order_mod_core(word: Word, level: int, family: ChainFamily) -> Factored:
    """#(<g> / <g> n C_l), the order of the permutation g induces on X_l."""
    family.check_word(word)
    if level == 0 or word.is_empty():
        return Factored.one()
    return _dual(
        family,
        level,
        lambda: perm_order(permutation_of(word, family.level_action(level))),
        lambda: family.analytic_element_order(word, level),
        f"the order of {word}",
    )


def base_point(ctx: RestrictedContext, family: ChainFamily) -> int:
    """The point of X_k fixed by H = delta Gamma_k delta^-1, namely delta.base."""
    action = family.level_action(ctx.k)
    return int(permutation_of(ctx.conjugator, action)[action.base])


def _projection_to(family: ChainFamily, level: int, k: int) -> np.ndarray:
    """Composite projection X_level -> X_k."""
    proj = np.arange(family.level_size(level))
    for l in range(level, k, -1):
        proj = family.level_action(l).project[proj]
    return proj


def restricted_points(ctx: RestrictedContext, level: int, family: ChainFamily) -> np.ndarray:
    """Points of X_level in the H-orbit of the H-fixed coset.

    For level >= k this is the fibre over delta.base_k; below k it is the
    single image of that point.
    """
    y = base_point(ctx, family)
    if level >= ctx.k:
        return np.nonzero(_projection_to(family, level, ctx.k) == y)[0]
    return np.array([int(_projection_to(family, ctx.k, level)[y])])


def in_subgroup(word: Word, ctx: RestrictedContext, family: ChainFamily) -> bool:
    if ctx.is_trivial():
        return True
    if not family.brute_force_ok(ctx.k):
        raise DepthTooLarge(f"cannot test membership in H at level {ctx.k}")
    y = base_point(ctx, family)
    return int(permutation_of(word, family.level_action(ctx.k))[y]) == y


def restricted_order_at(word: Word, ctx: RestrictedContext, level: int, family: ChainFamily) -> Factored:
    """#(<g> / <g> n C^H_l): lcm of the cycle lengths through the H-orbit points.

    g need not lie in H here; for g in H and level >= k this is the order of
    g on the fibre over the H-fixed point.
    """
    family.check_word(word)
    if ctx.is_trivial():
        return element_order_mod_core(word, level, family)
    if level == 0 or word.is_empty():
        return Factored.one()
    return _dual(
        family,
        level,
        lambda: perm_order(permutation_of(word, family.level_action(level)), restricted_points(ctx, level, family)),
        lambda: family.analytic_restricted_order(word, ctx, level),
        f"the restricted order of {word} ({ctx})",
    )


# ---------------------------------------------------------------------------
# Steinitz orders


@dataclass(frozen=True)
class OrderResult:
    word: Word
    ctx: RestrictedContext
    per_level: tuple[Factored, ...]  # m_1 .. m_L
    approx: SteinitzApprox
    type: TypeDescriptor
    profile: PrimeProfile | None = field(default=None, compare=False)


def _statuses(family: ChainFamily, word: Word, ctx: RestrictedContext, per_level: list[Factored], value: Factored):
    prof = family.profile(word, ctx if not ctx.is_trivial() else None)
    status: dict = {}
    if prof is None:
        return prof, status
    depth = len(per_level)
    for p, cert in prof.infinite.items():
        for l, m in enumerate(per_level, start=1):
            if m.exponent(p) < cert.bound(l):
                raise BackendDisagreement(
                    f"{family.describe()}: certificate for {p} in {word} claims v_p >= {cert.bound(l)} at level {l}, got {m.exponent(p)}"
                )
        status[p] = CertifiedInfinite(cert)
    for p, (n, start) in prof.stable.items():
        seen = value.exponent(p)
        if seen > n or (depth >= start and seen != n):
            raise BackendDisagreement(
                f"{family.describe()}: {p}-exponent of {word} is claimed to stabilise at {n} from level {start}, got {seen} at depth {depth}"
            )
        if depth >= start and n > 0:
            status[p] = Stable(n)
    if prof.complete:
        for p in value.primes:
            if p in prof.infinite or p in prof.stable:
                continue
            if prof.tail is not None and prof.tail.exponent(p) > 0:
                continue
            raise BackendDisagreement(f"{family.describe()}: prime {p} divides the order of {word} but is not in its profile")
    return prof, status


def _order_result(word: Word, ctx: RestrictedContext, per_level: list[Factored], family: ChainFamily) -> OrderResult:
    history = []
    value = Factored.one()
    for m in per_level:
        value = value.lcm(m)
        history.append(value)
    prof, status = _statuses(family, word, ctx, per_level, value)
    approx = SteinitzApprox(len(per_level), value, tuple(status.items()), tuple(history))
    if prof is not None and prof.complete:
        desc = TypeDescriptor(frozenset(prof.infinite), prof.tail)
    else:
        desc = type_from_approx(approx)
    return OrderResult(word, ctx, tuple(per_level), approx, desc, prof)


def element_order_result(word: Word, depth: int, family: ChainFamily) -> OrderResult:
    if depth < 1:
        raise ValueError("depth must be >= 1")
    per_level = [element_order_mod_core(word, l, family) for l in range(1, depth + 1)]
    return _order_result(word, RestrictedContext(), per_level, family)


def element_steinitz_order(word: Word, depth: int, family: ChainFamily) -> SteinitzApprox:
    """xi(g) truncated at `depth`, with certified statuses from the family."""
    return element_order_result(word, depth, family).approx


def restricted_order_result(
    word: Word, ctx: RestrictedContext, depth: int, family: ChainFamily, allow_outside: bool = False
) -> OrderResult:
    """xi^H(g) truncated at `depth` for H = delta Gamma_k delta^-1.

    With ``allow_outside`` an element outside H is accepted; its restricted
    order is still the lcm over levels of #(<g>/<g> n C^H_l).
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if ctx.is_trivial():
        return element_order_result(word, depth, family)
    if depth < ctx.k:
        raise ValueError(f"depth {depth} is below the restriction level {ctx.k}")
    if not allow_outside and not in_subgroup(word, ctx, family):
        raise NotInSubgroup(f"{word} does not fix the H-fixed coset at level {ctx.k}")
    per_level = [restricted_order_at(word, ctx, l, family) for l in range(1, depth + 1)]
    return _order_result(word, ctx, per_level, family)


def restricted_order(word: Word, ctx: RestrictedContext, depth: int, family: ChainFamily) -> SteinitzApprox:
    return restricted_order_result(word, ctx, depth, family).approx


# ---------------------------------------------------------------------------
# group images


def group_image_order(level: int, family: ChainFamily, max_points: int = IMAGE_ORDER_MAX_POINTS) -> Factored:
    """#(Gamma / C_l): order of the permutation group the generators induce on X_l.

    The stabiliser chain runs on at most `max_points` points; larger levels
    need a closed form.  Values are cached on the family.
    """
    if level == 0 or not family.generators:
        return Factored.one()
    cache = family.__dict__.setdefault("_image_orders", {})
    if level not in cache:
        cache[level] = _group_image_order(level, family, max_points)
    return cache[level]


def _group_image_order(level: int, family: ChainFamily, max_points: int) -> Factored:
    try:
        analytic = family.analytic_core_order(level)
    except AnalyticUnavailable:
        analytic = None
    size = family.level_size(level)
    if size > max_points or not family.brute_force_ok(level):
        if analytic is None:
            raise DepthTooLarge(
                f"{family.describe()}: |X_{level}| = {size} is too large for the stabiliser chain (bound {max_points})"
            )
        return analytic
    action = family.level_action(level)
    gens = [action.perm(g) for g in family.generators]
    brute = StabilizerChain([g for g in gens if not is_identity(g)], size).order()
    if analytic is not None and analytic != brute:
        raise BackendDisagreement(f"{family.describe()}: #(Gamma/C_{level}) brute {brute}, closed form {analytic}")
    return brute


def index_at(level: int, family: ChainFamily) -> Factored:
    size = Factored.of(family.level_size(level))
    try:
        analytic = family.analytic_index(level)
    except AnalyticUnavailable:
        return size
    if analytic != size:
        raise BackendDisagreement(f"{family.describe()}: [Gamma:Gamma_{level}] = {size} but closed form gives {analytic}")
    return analytic


def profinite_order(depth: int, family: ChainFamily) -> SteinitzApprox:
    """xi(Gamma-hat) truncated at `depth`: lcm of #(Gamma/C_l)."""
    history = []
    value = Factored.one()
    for l in range(1, depth + 1):
        value = value.lcm(group_image_order(l, family))
        history.append(value)
    return SteinitzApprox(depth, value, (), tuple(history))


# ---------------------------------------------------------------------------
# Lagrange divisibility


@dataclass(frozen=True)
class LagrangeRow:
    level: int
    element_order: Factored
    index: Factored
    image_order: Factored

    @property
    def passed(self) -> bool:
        return self.element_order.divides(self.image_order) and self.index.divides(self.image_order)

    @property
    def ratio(self) -> Factored | None:
        if not self.element_order.divides(self.image_order):
            return None
        return self.image_order // self.element_order


@dataclass(frozen=True)
class LagrangeResult:
    word: Word
    rows: tuple[LagrangeRow, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def failed_level(self) -> int | None:
        return next((r.level for r in self.rows if not r.passed), None)


def lagrange_divisibility_check(
    word: Word, depth: int, family: ChainFamily, max_points: int = IMAGE_ORDER_MAX_POINTS
) -> LagrangeResult:
    rows = []
    for l in range(1, depth + 1):
        img = group_image_order(l, family, max_points)
        rows.append(LagrangeRow(l, element_order_mod_core(word, l, family), index_at(l, family), img))
    return LagrangeResult(word, tuple(rows))


# ---------------------------------------------------------------------------
# typesets


@dataclass(frozen=True)
class TypeClass:
    type: TypeDescriptor
    words: tuple[Word, ...]
    # members were merged on apparent data only (some descriptor truncated)
    inconclusive_merge: bool = False


@dataclass(frozen=True)
class TypesetReport:
    family: str
    params: dict
    depth: int
    max_word_length: int
    ctx: RestrictedContext
    results: tuple[OrderResult, ...]
    classes: tuple[TypeClass, ...]

    @property
    def types(self) -> tuple[TypeDescriptor, ...]:
        return tuple(c.type for c in self.classes)

    def labels(self) -> list[str]:
        return [c.type.label() for c in self.classes]

    def base_labels(self) -> set[str]:
        """Labels without the truncation suffix."""
        return {lab.split("@")[0] for lab in self.labels()}


def dedupe_types(results: list[OrderResult]) -> tuple[TypeClass, ...]:
    groups: dict[tuple, list[OrderResult]] = {}
    for r in results:
        groups.setdefault(r.type.key(), []).append(r)
    classes = []
    for key in sorted(groups, key=lambda k: (len(k[0]), k)):
        members = groups[key]
        certified = [m for m in members if m.type.certified]
        rep = certified[0].type if certified else members[0].type
        exact = all(type_equal(rep, m.type) is Verdict.YES for m in members)
        classes.append(TypeClass(rep, tuple(m.word for m in members), inconclusive_merge=not exact))
    return tuple(classes)


def typeset_sample(
    family: ChainFamily,
    max_word_length: int,
    depth: int,
    ctx: RestrictedContext | None = None,
    words: list[Word] | None = None,
) -> TypesetReport:
    """Types of all reduced words up to `max_word_length` (graded shortlex).

    With a nontrivial context the restricted order xi^H is used.  Words
    outside H are included too: for such g, xi^H(g) = m * xi^H(g^m) with m
    the length of the orbit of the H-fixed coset, so the type is well defined.
    """
    ctx = ctx or RestrictedContext()
    if words is None:
        words = list(enumerate_words(family.generators, max_word_length, family.involutions))
    results = []
    for w in words:
        if ctx.is_trivial():
            results.append(element_order_result(w, depth, family))
        else:
            results.append(restricted_order_result(w, ctx, depth, family, allow_outside=True))
    if not results:
        results = [OrderResult(Word(), ctx, (), SteinitzApprox(depth, Factored.one()), TRIVIAL_TYPE)]
    return TypesetReport(
        family.name, family.params(), depth, max_word_length, ctx, tuple(results), dedupe_types(results)
    )


# ---------------------------------------------------------------------------
# commensurability


@dataclass(frozen=True)
class Commensurability:
    verdict: str  # "equal_up_to_depth" | "distinct" | "inconclusive"
    witness: TypeDescriptor | None = None
    witness_side: str | None = None  # "A" or "B": the side containing the witness
    certified: bool = False  # equalities all certified, or the witness provably absent
    unmatched: tuple[str, ...] = ()


def _match(t: TypeDescriptor, others: tuple[TypeDescriptor, ...]) -> str:
    """'exact', 'apparent', 'absent' (provably) or 'unknown'."""
    if any(type_equal(t, o) is Verdict.YES for o in others):
        return "exact"
    if any(equal_up_to_depth(t, o) for o in others):
        return "apparent"
    if all(provably_distinct(t, o) or type_equal(t, o) is Verdict.NO for o in others):
        return "absent"
    return "unknown"


def commensurable(a: TypesetReport, b: TypesetReport) -> Commensurability:
    """Compare two (restricted) typesets at their shared depth."""
    matches = []
    for side, mine, theirs in (("A", a.types, b.types), ("B", b.types, a.types)):
        for t in mine:
            m = _match(t, theirs)
            if m == "absent":
                return Commensurability("distinct", t, side, certified=True)
            matches.append((t, m))
    unknown = tuple(t.label() for t, m in matches if m == "unknown")
    if unknown:
        return Commensurability("inconclusive", unmatched=unknown)
    return Commensurability("equal_up_to_depth", certified=all(m == "exact" for _, m in matches))


def cycle_length_at_base(word: Word, ctx: RestrictedContext, family: ChainFamily) -> int:
    """Length of the orbit of the H-fixed coset under the word, at level k."""
    perm = permutation_of(word, family.level_action(ctx.k))
    return int(cycle_lengths(perm)[base_point(ctx, family)])


__all__ = [
    "DEFAULT_CROSSCHECK_POINTS",
    "CHECK_IMAGE_MAX_POINTS",
    "IMAGE_ORDER_MAX_POINTS",
    "Commensurability",
    "LagrangeResult",
    "LagrangeRow",
    "OrderResult",
    "TypeClass",
    "TypesetReport",
    "commensurable",
    "crosscheck_max_points",
    "cycle_length_at_base",
    "dedupe_types",
    "element_order_mod_core",
    "element_order_result",
    "element_steinitz_order",
    "group_image_order",
    "in_subgroup",
    "index_at",
    "lagrange_divisibility_check",
    "permutation_of",
    "permutation_order",
    "profinite_order",
    "restricted_order",
    "restricted_order_at",
    "restricted_order_result",
    "restricted_points",
    "typeset_sample",
]
