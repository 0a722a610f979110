"""Run configurations and family construction from JSON parameter blocks."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

from .automata import CATALOG, AutomatonError, AutomatonFamily, WreathRecursion, catalog_family
from .chain import ChainFamily, RestrictedContext, Word, enumerate_words
from .families import (
    FamilyError,
    HeisenbergFamily,
    Schedule,
    SemidirectPermutationFamily,
    ZnDiagonalFamily,
    ZScheduleFamily,
)


class ConfigError(ValueError):
    pass


def _only(params: dict, allowed: set[str], family: str) -> None:
    extra = set(params) - allowed
    if extra:
        raise FamilyError(f"params: unknown field(s) {sorted(extra)} for family {family!r}; allowed: {sorted(allowed)}")


def _schedules(params: dict) -> list[Schedule]:
    raw = params.get("schedules")
    if not isinstance(raw, list) or not raw:
        raise FamilyError("params.schedules: expected a non-empty list of schedule objects")
    return [Schedule.parse(s, f"params.schedules[{i}]") for i, s in enumerate(raw)]


def _path(params: dict) -> tuple[int, ...]:
    path = params.get("path", [0])
    if not isinstance(path, list) or not all(isinstance(x, int) for x in path):
        raise FamilyError("params.path: expected a list of tree symbols")
    return tuple(path)


def _z_schedule(params: dict) -> ChainFamily:
    return ZScheduleFamily(Schedule.parse(params))


def _zn_diagonal(params: dict) -> ChainFamily:
    _only(params, {"schedules"}, "zn-diagonal")
    return ZnDiagonalFamily(_schedules(params))


def _semidirect(params: dict) -> ChainFamily:
    _only(params, {"schedules", "delta", "abelian_prefix"}, "semidirect")
    delta = params.get("delta", [])
    if not isinstance(delta, list):
        raise FamilyError("params.delta: expected a list of permutations")
    return SemidirectPermutationFamily(_schedules(params), delta, bool(params.get("abelian_prefix", False)))


def _heisenberg(params: dict) -> ChainFamily:
    _only(params, {"p", "q"}, "heisenberg")
    if "p" not in params:
        raise FamilyError("params.p: required")
    return HeisenbergFamily(params["p"], params.get("q"))


def _catalog(name: str) -> Callable[[dict], ChainFamily]:
    def build(params: dict) -> ChainFamily:
        allowed = {"path", "p"} if name == "gupta-sidki" else {"path"}
        _only(params, allowed, name)
        extra = {}
        if name == "gupta-sidki":
            p = params.get("p", 3)
            if not isinstance(p, int):
                raise FamilyError("params.p: expected an odd prime")
            extra["p"] = p
        return catalog_family(name, path=_path(params), **extra)

    return build


def _automaton(params: dict) -> ChainFamily:
    _only(params, {"automaton", "path", "level_transitive", "name"}, "automaton")
    spec = params.get("automaton")
    if not isinstance(spec, dict):
        raise FamilyError('params.automaton: expected {"arity": d, "states": {...}}')
    wreath = WreathRecursion.from_json(spec, params.get("name", "automaton"))
    lt = params.get("level_transitive")
    return AutomatonFamily(wreath, _path(params), None if lt is None else bool(lt), name="automaton")


FAMILIES: dict[str, tuple[Callable[[dict], ChainFamily], str]] = {
    "z-schedule": (_z_schedule, "Z with M_l Z; params finite_primes, infinite_primes, finite_tail"),
    "zn-diagonal": (_zn_diagonal, "Z^n with one schedule per coordinate; params schedules"),
    "semidirect": (_semidirect, "Z^n x| Delta permuting coordinates; params schedules, delta, abelian_prefix"),
    "heisenberg": (_heisenberg, "integer Heisenberg group, renormalised by p (or p and q); params p, q"),
    "adding-machine": (_catalog("adding-machine"), "binary odometer a = (1, a) sigma; params path"),
    "grigorchuk": (_catalog("grigorchuk"), "first Grigorchuk group on the binary tree; params path"),
    "basilica": (_catalog("basilica"), "Basilica group on the binary tree; params path"),
    "gupta-sidki": (_catalog("gupta-sidki"), "Gupta-Sidki p-group on the p-ary tree; params p, path"),
    "automaton": (_automaton, "user wreath recursion; params automaton, path, level_transitive"),
}
assert set(CATALOG) <= set(FAMILIES)


def build_family(name: str, params: dict | None = None) -> ChainFamily:
    if name not in FAMILIES:
        raise ConfigError(f"family: unknown family {name!r}; known: {sorted(FAMILIES)}")
    params = dict(params or {})
    try:
        return FAMILIES[name][0](params)
    except (TypeError, KeyError) as exc:
        raise FamilyError(f"params: {exc}") from None


@dataclass(frozen=True)
class RunConfig:
    """One run: a family, what to compute, and how far."""

    family: str
    params: dict = field(default_factory=dict)
    word: str | None = None
    words: tuple[str, ...] | None = None
    depth: int = 6
    max_word_length: int = 3
    restrict_level: int = 0
    conjugator: str = ""
    sample_size: int | None = None  # None: every word up to max_word_length
    seed: int = 0
    label: str | None = None

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ConfigError(f"family: unknown family {self.family!r}; known: {sorted(FAMILIES)}")
        for name in ("depth", "max_word_length", "restrict_level", "seed"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool):
                raise ConfigError(f"{name}: expected an integer, got {v!r}")
        if self.depth < 1:
            raise ConfigError(f"depth: must be >= 1, got {self.depth}")
        if self.max_word_length < 0:
            raise ConfigError(f"max_word_length: must be >= 0, got {self.max_word_length}")
        if self.restrict_level < 0:
            raise ConfigError(f"restrict.level: must be >= 0, got {self.restrict_level}")
        if self.restrict_level > self.depth:
            raise ConfigError(f"restrict.level: {self.restrict_level} exceeds depth {self.depth}")
        if self.sample_size is not None and (not isinstance(self.sample_size, int) or self.sample_size < 1):
            raise ConfigError(f"sample.size: must be a positive integer, got {self.sample_size!r}")

    @classmethod
    def from_dict(cls, d: dict) -> RunConfig:
        if not isinstance(d, dict):
            raise ConfigError("config: expected a JSON object")
        known = {"family", "params", "word", "words", "depth", "max_word_length", "restrict", "sample", "label"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"config: unknown field(s) {sorted(extra)}")
        if "family" not in d:
            raise ConfigError("family: required")
        params = d.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError("params: expected an object")
        restrict = d.get("restrict") or {}
        if not isinstance(restrict, dict) or set(restrict) - {"level", "conjugator"}:
            raise ConfigError('restrict: expected {"level": k, "conjugator": word}')
        sample = d.get("sample") or {}
        if not isinstance(sample, dict) or set(sample) - {"size", "seed"}:
            raise ConfigError('sample: expected {"size": n, "seed": s}')
        words = d.get("words")
        if words is not None and (not isinstance(words, list) or not all(isinstance(w, str) for w in words)):
            raise ConfigError("words: expected a list of word strings")
        word = d.get("word")
        if word is not None and not isinstance(word, str):
            raise ConfigError("word: expected a string")
        conj = restrict.get("conjugator", "")
        if not isinstance(conj, str):
            raise ConfigError("restrict.conjugator: expected a word string")
        return cls(
            family=d["family"],
            params=params,
            word=word,
            words=None if words is None else tuple(words),
            depth=d.get("depth", 6),
            max_word_length=d.get("max_word_length", 3),
            restrict_level=restrict.get("level", 0),
            conjugator=conj,
            sample_size=sample.get("size"),
            seed=sample.get("seed", 0),
            label=d.get("label"),
        )

    @classmethod
    def load(cls, path: str | Path) -> RunConfig:
        try:
            data = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: {path} is not valid JSON ({exc.msg} at line {exc.lineno})") from None
        return cls.from_dict(data)

    def with_overrides(self, depth: int | None = None, max_word_length: int | None = None, restrict_level: int | None = None) -> RunConfig:
        changes = {}
        if depth is not None:
            changes["depth"] = depth
        if max_word_length is not None:
            changes["max_word_length"] = max_word_length
        if restrict_level is not None:
            changes["restrict_level"] = restrict_level
        return replace(self, **changes) if changes else self

    def to_json(self) -> dict:
        out: dict = {"family": self.family, "params": self.params, "depth": self.depth,
                     "max_word_length": self.max_word_length}
        if self.word is not None:
            out["word"] = self.word
        if self.words is not None:
            out["words"] = list(self.words)
        if self.restrict_level or self.conjugator:
            out["restrict"] = {"level": self.restrict_level, "conjugator": self.conjugator}
        if self.sample_size is not None:
            out["sample"] = {"size": self.sample_size, "seed": self.seed}
        if self.label is not None:
            out["label"] = self.label
        return out

    # derived objects
    def build_family(self) -> ChainFamily:
        return build_family(self.family, self.params)

    def context(self, family: ChainFamily) -> RestrictedContext:
        conj = family.parse(self.conjugator) if self.conjugator else Word()
        family.check_word(conj)
        return RestrictedContext(self.restrict_level, conj)

    def sample_words(self, family: ChainFamily) -> list[Word]:
        """Words of a typeset run, in graded shortlex order."""
        if self.words is not None:
            out = [family.parse(w) for w in self.words]
            for w in out:
                family.check_word(w)
            return out
        words = list(enumerate_words(family.generators, self.max_word_length, family.involutions))
        if self.sample_size is not None and self.sample_size < len(words):
            keep = sorted(random.Random(self.seed).sample(range(len(words)), self.sample_size))
            words = [words[i] for i in keep]
        return words


__all__ = ["FAMILIES", "AutomatonError", "ConfigError", "FamilyError", "RunConfig", "build_family"]
