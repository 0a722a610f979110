"""Named verification suites and the stored golden reports they diff against."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable

from . import engine
from .automata import Finite, catalog_family, prime_divisors_upto, typeset_bound
from .chain import AnalyticUnavailable, DepthTooLarge, RestrictedContext, Word, enumerate_words
from .config import RunConfig
from .factored import Factored
from .families import HeisenbergFamily, Schedule, SemidirectPermutationFamily, ZnDiagonalFamily, ZScheduleFamily
from .perm import StabilizerChain, perm_order
from .reports import commensurate_report, dumps, finite_spectrum_empty, type_report, typeset_report
from .steinitz import CertifiedInfinite, Stable, spectra


class UnknownSuite(KeyError):
    def __str__(self) -> str:
        return str(self.args[0])


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


# ---------------------------------------------------------------------------
# golden reports

LATTICE_23 = {"schedules": [{"infinite_primes": [2]}, {"infinite_primes": [3]}]}
SEMIDIRECT_23 = dict(LATTICE_23, delta=[[1, 0]])
SEMIDIRECT_23_PREFIX = dict(SEMIDIRECT_23, abelian_prefix=True)

# the Basilica witness: gamma = b a b^-1 acts only below the path vertex 0 and
# delta = b moves that vertex, so delta gamma delta^-1 acts only below vertex 1
BASILICA_GAMMA = "bab'"
BASILICA_DELTA = "b"
BASILICA_LEVEL = 1

GOLDEN: dict[str, tuple[str, list[dict]]] = {
    "z_schedule_type": ("type", [{"family": "z-schedule", "params": {"finite_primes": [[3, 2]], "infinite_primes": [2]},
                                  "word": "a", "depth": 8}]),
    "semidirect_typeset": ("typeset", [{"family": "semidirect", "params": SEMIDIRECT_23, "depth": 6, "max_word_length": 4}]),
    "lattice_typeset": ("typeset", [{"family": "zn-diagonal", "params": LATTICE_23, "depth": 6, "max_word_length": 4}]),
    "semidirect_vs_lattice": ("commensurate", [
        {"family": "semidirect", "params": SEMIDIRECT_23_PREFIX, "depth": 6, "max_word_length": 4, "restrict": {"level": 1}},
        {"family": "zn-diagonal", "params": LATTICE_23, "depth": 6, "max_word_length": 4},
    ]),
    "semidirect_unrestricted_vs_lattice": ("commensurate", [
        {"family": "semidirect", "params": SEMIDIRECT_23, "depth": 6, "max_word_length": 4},
        {"family": "zn-diagonal", "params": LATTICE_23, "depth": 6, "max_word_length": 4},
    ]),
    "heisenberg_2_typeset": ("typeset", [{"family": "heisenberg", "params": {"p": 2}, "depth": 4, "max_word_length": 3}]),
    "heisenberg_2_c_type": ("type", [{"family": "heisenberg", "params": {"p": 2}, "word": "c", "depth": 4}]),
    "heisenberg_2_vs_z": ("commensurate", [
        {"family": "heisenberg", "params": {"p": 2}, "depth": 4, "max_word_length": 3},
        {"family": "z-schedule", "params": {"infinite_primes": [2]}, "depth": 4, "max_word_length": 3},
    ]),
    "heisenberg_23_typeset": ("typeset", [{"family": "heisenberg", "params": {"p": 2, "q": 3}, "depth": 4, "max_word_length": 3}]),
    "adding_machine_type": ("type", [{"family": "adding-machine", "word": "a", "depth": 10}]),
    "grigorchuk_typeset": ("typeset", [{"family": "grigorchuk", "depth": 10, "max_word_length": 4}]),
    "basilica_typeset": ("typeset", [{"family": "basilica", "depth": 10, "max_word_length": 4}]),
    "gupta_sidki_typeset": ("typeset", [{"family": "gupta-sidki", "params": {"p": 3}, "depth": 6, "max_word_length": 5,
                                         "sample": {"size": 50, "seed": 0}}]),
    "basilica_conjugate_type": ("type", [{"family": "basilica", "word": f"{BASILICA_DELTA}{BASILICA_GAMMA}{BASILICA_DELTA}'",
                                          "depth": 12}]),
    "basilica_conjugate_restricted": ("type", [{"family": "basilica", "word": f"{BASILICA_DELTA}{BASILICA_GAMMA}{BASILICA_DELTA}'",
                                                "depth": 12, "restrict": {"level": BASILICA_LEVEL}}]),
}


def build_report(command: str, configs: list[dict]) -> dict:
    cfgs = [RunConfig.from_dict(c) for c in configs]
    if command == "type":
        return type_report(cfgs[0])
    if command == "typeset":
        return typeset_report(cfgs[0])
    return commensurate_report(cfgs[0], cfgs[1])


def golden_dir() -> Path:
    return Path(str(resources.files("otl") / "golden"))


def write_golden(directory: Path | None = None) -> list[Path]:
    directory = directory or golden_dir()
    directory.mkdir(parents=True, exist_ok=True)
    out = []
    for name, (command, configs) in GOLDEN.items():
        path = directory / f"{name}.json"
        path.write_text(dumps(build_report(command, configs)))
        out.append(path)
    return out


def golden_checks(names: list[str] | None = None) -> list[Check]:
    out = []
    for name in names or list(GOLDEN):
        command, configs = GOLDEN[name]
        path = golden_dir() / f"{name}.json"
        if not path.exists():
            out.append(Check(f"golden {name}", False, "missing golden file"))
            continue
        fresh = dumps(build_report(command, configs))
        same = fresh == path.read_text()
        out.append(Check(f"golden {name}", same, "" if same else "report differs from the stored golden file"))
    return out


# ---------------------------------------------------------------------------
# worked examples


def _labels(report: engine.TypesetReport) -> set[str]:
    return set(report.labels())


def check_z_schedule() -> list[Check]:
    fam = ZScheduleFamily(Schedule(finite=((3, 2),), infinite=(2,)))
    target = Factored.from_map({2: 8, 3: 2})
    group = engine.profinite_order(8, fam)
    elem = engine.element_steinitz_order(Word.gen("a"), 8, fam)
    status = elem.status_map
    sp = spectra(fam.schedule.steinitz())
    return [
        Check("z-schedule: xi of the completion at depth 8", group.value == target, str(group.value)),
        Check("z-schedule: xi(a) at depth 8", elem.value == target, str(elem.value)),
        Check("z-schedule: 3 stable with exponent 2", status.get(3) == Stable(2), repr(status.get(3))),
        Check("z-schedule: 2 certified infinite", isinstance(status.get(2), CertifiedInfinite), repr(status.get(2))),
        Check("z-schedule: spectra", sp.pi_f == frozenset({3}) and sp.pi_inf == frozenset({2}), repr(sp)),
    ]


def check_semidirect() -> list[Check]:
    semi = SemidirectPermutationFamily([Schedule(infinite=(2,)), Schedule(infinite=(3,))], [[1, 0]])
    prefix = SemidirectPermutationFamily([Schedule(infinite=(2,)), Schedule(infinite=(3,))], [[1, 0]], abelian_prefix=True)
    lattice = ZnDiagonalFamily([Schedule(infinite=(2,)), Schedule(infinite=(3,))])
    a = engine.typeset_sample(semi, 4, 6)
    b = engine.typeset_sample(lattice, 4, 6)
    ah = engine.typeset_sample(prefix, 4, 6, RestrictedContext(1))
    four = {"[1]", "[2^inf]", "[3^inf]", "[(2*3)^inf]"}
    c = engine.commensurable(ah, b)
    d = engine.commensurable(a, b)
    return [
        Check("semidirect: typeset {[1], [(2*3)^inf]}", _labels(a) == {"[1]", "[(2*3)^inf]"}, str(a.labels())),
        Check("lattice: typeset of four types", _labels(b) == four, str(b.labels())),
        Check("semidirect restricted to the lattice: commensurable", c.verdict == "equal_up_to_depth", c.verdict),
        Check("semidirect unrestricted: distinct from the lattice", d.verdict == "distinct", d.verdict),
    ]


def check_heisenberg_single() -> list[Check]:
    fam = HeisenbergFamily(2)
    idx = all(engine.index_at(l, fam) == Factored.of(2 ** (4 * l)) for l in range(1, 5))
    img = engine.group_image_order(1, fam)
    ts = engine.typeset_sample(fam, 3, 4)
    nontrivial = [r for r in ts.results if not r.word.is_empty() and fam.evaluate(r.word) != (0, 0, 0)]
    all_two = all(r.type.label() == "[2^inf]" for r in nontrivial)
    agree = True
    for w in enumerate_words(fam.generators, 3):
        for l in range(1, 4):
            brute = perm_order(engine.permutation_of(w, fam.level_action(l)))
            agree = agree and brute == fam.analytic_element_order(w, l)
    for l in range(1, 4):
        agree = agree and fam.analytic_index(l) == Factored.of(fam.level_action(l).size)
    return [
        Check("heisenberg p=2: index 2^(4l) for l <= 4", idx),
        Check("heisenberg p=2: image order at level 1 is 2^6", img == Factored.of(64) == fam.analytic_core_order(1), str(img)),
        Check("heisenberg p=2: nontrivial sampled words have type [2^inf]", bool(nontrivial) and all_two),
        Check("heisenberg p=2: brute force equals closed form for l <= 3", agree),
    ]


def check_heisenberg_pair() -> list[Check]:
    doc = typeset_report(RunConfig("heisenberg", {"p": 2, "q": 3}, depth=4, max_word_length=3))
    labels = set(doc["typeset"]["labels"])
    comp = doc["checks"]["companion_typeset"]
    return [
        Check("heisenberg p=2 q=3: typeset {[1], [(2*3)^inf]}", labels == {"[1]", "[(2*3)^inf]"}, str(sorted(labels))),
        Check("heisenberg p=2 q=3: report notes the equal lattice typeset", comp["equal"] and comp["note"] in doc["notes"]),
    ]


def _tree_families():
    return [(catalog_family(n), 10) for n in ("adding-machine", "grigorchuk", "basilica")] + [
        (catalog_family("gupta-sidki", p=3), 6)
    ]


def check_tree_bounds(max_word_length: int = 4) -> list[Check]:
    out = []
    for fam, depth in _tree_families():
        d = fam.arity
        allowed = set(prime_divisors_upto(d))
        ts = engine.typeset_sample(fam, max_word_length, depth)
        stray = {p for r in ts.results for m in r.per_level for p in m.primes} - allowed
        finite = finite_spectrum_empty(list(ts.results))
        out.append(Check(f"{fam.name}: level orders only involve primes dividing L_{d}", not stray, str(sorted(stray))))
        out.append(Check(f"{fam.name}: at most {typeset_bound(d)} types", len(ts.classes) <= typeset_bound(d), str(ts.labels())))
        out.append(Check(f"{fam.name}: certified nontrivial types have empty finite spectrum", finite))
    return out


def check_gupta_sidki() -> list[Check]:
    cfg = RunConfig("gupta-sidki", {"p": 3}, depth=6, max_word_length=5, sample_size=50, seed=0)
    fam = cfg.build_family()
    words = cfg.sample_words(fam)
    finite = all(isinstance(fam.element_order(w), Finite) for w in words)
    ts = engine.typeset_sample(fam, 5, 6, words=words)
    return [
        Check("gupta-sidki: 50 sampled words have finite order", len(words) == 50 and finite),
        Check("gupta-sidki: typeset {[1]}", _labels(ts) == {"[1]"}, str(ts.labels())),
    ]


def check_binary_trees() -> list[Check]:
    g = engine.typeset_sample(catalog_family("grigorchuk"), 4, 10)
    am = catalog_family("adding-machine")
    a = engine.element_order_result(Word.gen("a"), 10, am)
    b = engine.typeset_sample(catalog_family("basilica"), 3, 10)
    return [
        Check("grigorchuk: typeset {[1]}", _labels(g) == {"[1]"}, str(g.labels())),
        Check("adding machine: a has type [2^inf]", a.type.label() == "[2^inf]" and a.type.certified, a.type.label()),
        Check("adding machine: a acts as a 2^10-cycle", a.approx.value == Factored.of(1024)),
        Check("basilica: both [1] and [2^inf] occur", {"[1]", "[2^inf]"} <= _labels(b), str(b.labels())),
    ]


def check_basilica_witness(depth: int = 12) -> list[Check]:
    fam = catalog_family("basilica")
    gamma, delta = fam.parse(BASILICA_GAMMA), fam.parse(BASILICA_DELTA)
    conj = gamma.conjugate_by(delta)
    whole = engine.element_order_result(conj, depth, fam)
    ctx = RestrictedContext(BASILICA_LEVEL)
    restricted = engine.restricted_order_result(conj, ctx, depth, fam)
    return [
        Check("basilica: gamma is supported below vertex 0", fam.wreath.root_perm(gamma) == (0, 1)
              and fam.wreath.section(gamma, 1).is_empty() and not fam.wreath.section(gamma, 0).is_empty()),
        Check("basilica: delta moves vertex 0", fam.wreath.apply(delta, 0) != 0),
        Check(f"basilica: xi(delta gamma delta^-1) nontrivial at depth {depth}", not whole.approx.value.is_one(),
              str(whole.approx.value)),
        Check("basilica: restricted orders all 1", all(m.is_one() for m in restricted.per_level)),
    ]


# ---------------------------------------------------------------------------
# property suites


def _property_families():
    return [
        ZScheduleFamily(Schedule(finite=((3, 2),), infinite=(2,))),
        SemidirectPermutationFamily([Schedule(infinite=(2,)), Schedule(infinite=(3,))], [[1, 0]]),
        HeisenbergFamily(2),
        catalog_family("grigorchuk"),
        catalog_family("basilica"),
        catalog_family("adding-machine"),
        catalog_family("gupta-sidki", p=3),
    ]


def _depth_for(fam) -> int:
    return 5 if fam.arity and fam.arity > 2 else (3 if isinstance(fam, HeisenbergFamily) else 6)


def check_lagrange(max_word_length: int = 3) -> list[Check]:
    out = []
    bound = engine.CHECK_IMAGE_MAX_POINTS
    for fam in _property_families():
        depth = 0
        for l in range(1, _depth_for(fam) + 1):
            try:
                engine.group_image_order(l, fam, bound)
            except DepthTooLarge:
                break
            depth = l
        bad = [str(w) for w in enumerate_words(fam.generators, max_word_length, fam.involutions)
               if not engine.lagrange_divisibility_check(w, depth, fam, bound).passed]
        out.append(Check(f"lagrange {fam.describe()} to level {depth}", not bad, ", ".join(bad[:5])))
    return out


def check_backends(max_level: int = 3) -> list[Check]:
    out = []
    for fam in _property_families():
        ok, detail = True, ""
        levels = [l for l in range(1, max_level + 1) if fam.level_size(l) <= 4096]
        for l in levels:
            try:
                a = fam.analytic_index(l)
                ok = ok and a == Factored.of(fam.level_action(l).size)
            except AnalyticUnavailable:
                pass
            try:
                c = fam.analytic_core_order(l)
                gens = [fam.level_action(l).perm(g) for g in fam.generators]
                ok = ok and c == StabilizerChain(gens, fam.level_size(l)).order()
            except AnalyticUnavailable:
                pass
            for w in enumerate_words(fam.generators, 3, fam.involutions):
                try:
                    a = fam.analytic_element_order(w, l)
                except AnalyticUnavailable:
                    continue
                b = perm_order(engine.permutation_of(w, fam.level_action(l)))
                if a != b:
                    ok, detail = False, f"{w} at level {l}: {a} vs {b}"
        out.append(Check(f"backends {fam.describe()} on levels {levels}", ok, detail))
    return out


def check_properties(max_word_length: int = 3) -> list[Check]:
    out = []
    for fam in _property_families():
        depth = _depth_for(fam)
        words = list(enumerate_words(fam.generators, max_word_length, fam.involutions))
        conj_ok = tower_ok = power_ok = k0_ok = True
        for w in words:
            res = engine.element_order_result(w, depth, fam)
            for x, y in zip(res.per_level, res.per_level[1:]):
                tower_ok = tower_ok and x.divides(y)
            for d in words[1 : 1 + len(fam.generators)]:
                c = w.conjugate_by(d)
                conj_ok = conj_ok and all(
                    engine.element_order_mod_core(c, l, fam) == m for l, m in enumerate(res.per_level, start=1)
                )
            for m in (2, 3):
                pw = engine.element_order_result(w**m, depth, fam)
                ratio_ok = pw.approx.value.divides(res.approx.value)
                if ratio_ok:
                    n = res.approx.value // pw.approx.value
                    ratio_ok = n.divides(Factored.of(m)) and pw.type.inf_spectrum == res.type.inf_spectrum
                power_ok = power_ok and ratio_ok
            k0 = engine.restricted_order_result(w, RestrictedContext(0), depth, fam)
            k0_ok = k0_ok and k0.per_level == res.per_level and k0.type == res.type
        out += [
            Check(f"conjugation invariance {fam.describe()}", conj_ok),
            Check(f"divisibility tower {fam.describe()}", tower_ok),
            Check(f"power stability {fam.describe()}", power_ok),
            Check(f"restriction at k=0 {fam.describe()}", k0_ok),
        ]
    cfg = RunConfig("semidirect", SEMIDIRECT_23, depth=4, max_word_length=2)
    out.append(Check("reports are byte-identical on rerun", dumps(typeset_report(cfg)) == dumps(typeset_report(cfg))))
    return out


def check_paper_examples() -> list[Check]:
    return (
        check_z_schedule()
        + check_semidirect()
        + check_heisenberg_single()
        + check_heisenberg_pair()
        + check_tree_bounds()
        + check_gupta_sidki()
        + check_binary_trees()
        + check_basilica_witness()
        + golden_checks()
    )


SUITES: dict[str, Callable[[], list[Check]]] = {
    "paper-examples": check_paper_examples,
    "golden": golden_checks,
    "lagrange": check_lagrange,
    "backends": check_backends,
    "tree-bounds": check_tree_bounds,
    "properties": check_properties,
}


def run_suite(name: str) -> list[Check]:
    if name == "all":
        return [c for n in SUITES if n != "golden" for c in SUITES[n]()]
    if name not in SUITES:
        raise UnknownSuite(f"unknown suite {name!r}; known: {sorted(SUITES) + ['all']}")
    return SUITES[name]()


__all__ = ["Check", "GOLDEN", "SUITES", "UnknownSuite", "golden_checks", "run_suite", "write_golden"]
