"""Types: asymptotic equivalence classes of Steinitz numbers, and their algebra.

A type is fixed by its infinite prime spectrum together with the tail of its
finite part, since finitely many finite exponents can always be adjusted.
Descriptors computed from a finite-depth truncation carry a
:class:`TruncatedAtDepth` certification and only support "equal up to depth"
or "provably distinct" answers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .steinitz import (
    CertifiedInfinite,
    ExactSteinitz,
    Stable,
    SteinitzApprox,
    TailRule,
    Verdict,
    spectra,
)


@dataclass(frozen=True)
class Certified:
    pass


@dataclass(frozen=True)
class TruncatedAtDepth:
    depth: int
    # primes whose classification is backed by a certificate
    certain_infinite: frozenset[int] = frozenset()
    certain_finite: frozenset[int] = frozenset()


Certification = Union[Certified, TruncatedAtDepth]
CERTIFIED = Certified()


@dataclass(frozen=True)
class TypeDescriptor:
    inf_spectrum: frozenset[int] = frozenset()
    finite_tail: TailRule | None = None  # None means EventuallyZero
    certification: Certification = field(default=CERTIFIED)

    @property
    def certified(self) -> bool:
        return isinstance(self.certification, Certified)

    @property
    def tail_token(self) -> str | None:
        return None if self.finite_tail is None else self.finite_tail.token

    def is_trivial(self) -> bool:
        return not self.inf_spectrum and self.finite_tail is None

    def knows(self, p: int) -> bool | None:
        """True if p is certainly infinite, False if certainly finite, else None."""
        c = self.certification
        if isinstance(c, Certified):
            return p in self.inf_spectrum
        if p in c.certain_infinite:
            return True
        if p in c.certain_finite:
            return False
        return None

    def key(self) -> tuple:
        return (tuple(sorted(self.inf_spectrum)), self.tail_token or "")

    def label(self) -> str:
        if self.is_trivial():
            body = "1"
        else:
            ps = sorted(self.inf_spectrum)
            parts = []
            if ps:
                base = str(ps[0]) if len(ps) == 1 else "(" + "*".join(map(str, ps)) + ")"
                parts.append(f"{base}^inf")
            if self.finite_tail is not None:
                parts.append(f"<{self.finite_tail.token}>")
            body = "*".join(parts)
        suffix = "" if self.certified else f"@{self.certification.depth}"
        return f"[{body}]{suffix}"

    __str__ = label


TRIVIAL_TYPE = TypeDescriptor()


def type_of(x: ExactSteinitz) -> TypeDescriptor:
    return TypeDescriptor(spectra(x).pi_inf, x.tail, CERTIFIED)


def type_from_approx(a: SteinitzApprox, tail: TailRule | None = None, complete: bool = False) -> TypeDescriptor:
    """Descriptor of a truncated order.

    `complete` asserts that no prime outside the statuses can ever appear and
    that every listed prime is decided; the result is then Certified.  An
    undecided prime counts as infinite when its exponent is still growing in
    the second half of the computed levels.
    """
    certain_inf = frozenset(p for p, s in a.status if isinstance(s, CertifiedInfinite))
    certain_fin = frozenset(p for p, s in a.status if isinstance(s, Stable))
    if complete:
        undecided = [p for p in a.value.primes if p not in certain_inf and p not in certain_fin]
        if undecided:
            raise ValueError(f"complete profile leaves primes {undecided} undecided")
        return TypeDescriptor(certain_inf, tail, CERTIFIED)
    return TypeDescriptor(
        certain_inf | _growing_primes(a, certain_inf | certain_fin),
        tail,
        TruncatedAtDepth(a.depth, certain_inf, certain_fin),
    )


def _growing_primes(a: SteinitzApprox, decided: frozenset[int]) -> frozenset[int]:
    history = a.history
    if not history:
        return frozenset(p for p in a.value.primes if p not in decided)
    half = history[len(history) // 2]
    last = history[-1]
    return frozenset(p for p in last.primes if p not in decided and last.exponent(p) > half.exponent(p))


def _combine_certification(a: TypeDescriptor, b: TypeDescriptor, inf: frozenset[int]) -> Certification:
    if a.certified and b.certified:
        return CERTIFIED
    depth = min(c.depth for c in (a.certification, b.certification) if isinstance(c, TruncatedAtDepth))
    ci = frozenset(p for p in inf if a.knows(p) is True or b.knows(p) is True)
    return TruncatedAtDepth(depth, ci, frozenset())


def type_mul(a: TypeDescriptor, b: TypeDescriptor) -> TypeDescriptor:
    inf = a.inf_spectrum | b.inf_spectrum
    if a.finite_tail is None or b.finite_tail is None:
        tail = a.finite_tail or b.finite_tail
    else:
        tail = TailRule.combine("sum", a.finite_tail, b.finite_tail)
    return TypeDescriptor(inf, tail, _combine_certification(a, b, inf))


def type_join(a: TypeDescriptor, b: TypeDescriptor) -> TypeDescriptor:
    inf = a.inf_spectrum | b.inf_spectrum
    if a.finite_tail is None or b.finite_tail is None:
        tail = a.finite_tail or b.finite_tail
    else:
        tail = TailRule.combine("max", a.finite_tail, b.finite_tail)
    return TypeDescriptor(inf, tail, _combine_certification(a, b, inf))


def type_meet(a: TypeDescriptor, b: TypeDescriptor) -> TypeDescriptor:
    inf = a.inf_spectrum & b.inf_spectrum
    if a.finite_tail is None or b.finite_tail is None:
        # min against a tail-free side is 0 off finitely many primes
        tail = None
    else:
        tail = TailRule.combine("min", a.finite_tail, b.finite_tail)
    cert = _combine_certification(a, b, inf)
    if isinstance(cert, TruncatedAtDepth):
        ci = frozenset(p for p in inf if a.knows(p) is True and b.knows(p) is True)
        cert = TruncatedAtDepth(cert.depth, ci, frozenset())
    return TypeDescriptor(inf, tail, cert)


def _tails_leq(ta: TailRule | None, tb: TailRule | None) -> Verdict:
    if ta is None:
        return Verdict.YES
    if tb is None:
        # an infinite tail cannot sit under finitely many INF primes
        return Verdict.NO if ta.infinite else Verdict.INCONCLUSIVE
    if ta.token == tb.token:
        return Verdict.YES
    return Verdict.INCONCLUSIVE


def type_leq(a: TypeDescriptor, b: TypeDescriptor) -> Verdict:
    """a <= b: representatives exist with chi_a <= chi_b pointwise."""
    for p in a.inf_spectrum - b.inf_spectrum:
        if a.knows(p) is True and b.knows(p) is False:
            return Verdict.NO
    if not (a.certified and b.certified):
        return Verdict.INCONCLUSIVE
    if not a.inf_spectrum <= b.inf_spectrum:
        return Verdict.NO
    return _tails_leq(a.finite_tail, b.finite_tail)


def type_equal(a: TypeDescriptor, b: TypeDescriptor) -> Verdict:
    """Definitive equality; INCONCLUSIVE whenever a side is truncated."""
    if provably_distinct(a, b):
        return Verdict.NO
    if not (a.certified and b.certified):
        return Verdict.INCONCLUSIVE
    if a.inf_spectrum != b.inf_spectrum:
        return Verdict.NO
    if a.tail_token == b.tail_token:
        return Verdict.YES
    if a.finite_tail is None or b.finite_tail is None:
        only = a.finite_tail or b.finite_tail
        return Verdict.NO if only.infinite else Verdict.INCONCLUSIVE
    return Verdict.INCONCLUSIVE


def provably_distinct(a: TypeDescriptor, b: TypeDescriptor) -> bool:
    for p in a.inf_spectrum ^ b.inf_spectrum:
        ka, kb = a.knows(p), b.knows(p)
        if ka is not None and kb is not None and ka != kb:
            return True
    return False


def equal_up_to_depth(a: TypeDescriptor, b: TypeDescriptor) -> bool:
    """Same apparent class: matching (observed) infinite spectra and tail tokens."""
    return a.inf_spectrum == b.inf_spectrum and a.tail_token == b.tail_token and not provably_distinct(a, b)


def descriptor_to_json(t: TypeDescriptor) -> dict:
    c = t.certification
    if isinstance(c, Certified):
        cert: dict = {"kind": "certified"}
    else:
        cert = {
            "kind": "truncated",
            "depth": c.depth,
            "certain_infinite": sorted(c.certain_infinite),
            "certain_finite": sorted(c.certain_finite),
        }
    return {
        "label": t.label(),
        "inf_spectrum": sorted(t.inf_spectrum),
        "finite_tail": t.tail_token if t.finite_tail is not None else "eventually_zero",
        "certification": cert,
    }


def descriptor_from_json(d: dict, tails: dict[str, TailRule] | None = None) -> TypeDescriptor:
    """Rebuild a descriptor; tail streams are looked up by token in `tails`."""
    tok = d["finite_tail"]
    tail = None
    if tok != "eventually_zero":
        tail = (tails or {}).get(tok) or TailRule(tok, lambda: iter(()), infinite=True)
    c = d["certification"]
    if c["kind"] == "certified":
        cert: Certification = CERTIFIED
    else:
        cert = TruncatedAtDepth(c["depth"], frozenset(c["certain_infinite"]), frozenset(c["certain_finite"]))
    return TypeDescriptor(frozenset(d["inf_spectrum"]), tail, cert)


