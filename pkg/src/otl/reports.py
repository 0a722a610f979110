"""Deterministic JSON reports for the type, typeset and commensurate commands."""

from __future__ import annotations

import json
from typing import Any

from . import engine
from .automata import AutomatonFamily, Finite, InfiniteCertified, prime_divisors_upto, typeset_bound
from .chain import ChainFamily, DepthTooLarge, RestrictedContext
from .config import RunConfig
from .factored import Factored
from .families import HeisenbergFamily, Schedule, SemidirectPermutationFamily
from .steinitz import Stable, approx_to_json
from .types import descriptor_to_json

SCHEMA_VERSION = "otl-report/1"

IDENTITY_NOTE = "the identity element is part of every sample, so [1] belongs to every typeset"
CLASSIFICATION_NOTE = "classification not attempted: equal typesets of lattice families do not decide isomorphism"


def dumps(doc: dict) -> str:
    """Canonical serialisation: sorted keys, two-space indent, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def context_to_json(ctx: RestrictedContext) -> dict:
    return {"level": ctx.k, "conjugator": str(ctx.conjugator)}


def family_to_json(family: ChainFamily) -> dict:
    return {"name": family.name, "params": family.params(), "generators": list(family.generators)}


def _order_status_json(family: ChainFamily, result: engine.OrderResult) -> dict | None:
    if not isinstance(family, AutomatonFamily):
        return None
    status = family.element_order(result.word)
    if isinstance(status, Finite):
        return {"kind": "finite", "order": str(status.order), "stable_level": status.stable_level}
    if isinstance(status, InfiniteCertified):
        return {"kind": "infinite_certified", "primes": [str(p) for p in status.primes], "cycle": list(status.cycle)}
    return {"kind": "unknown_at_budget", "nodes": status.nodes}


def result_to_json(result: engine.OrderResult, family: ChainFamily, in_subgroup: bool | None = None) -> dict:
    out: dict[str, Any] = {
        "word": str(result.word),
        "levels": [{"level": l, "order": m.to_json()} for l, m in enumerate(result.per_level, start=1)],
        "steinitz": approx_to_json(result.approx),
        "type": descriptor_to_json(result.type),
    }
    prof = result.profile
    out["certificates"] = [] if prof is None else [prof.infinite[p].to_json() for p in sorted(prof.infinite)]
    status = _order_status_json(family, result)
    if status is not None:
        out["element_order"] = status
    if in_subgroup is not None:
        out["in_subgroup"] = in_subgroup
    return out


def typeset_summary(ts: engine.TypesetReport) -> dict:
    classes = [
        {
            "label": c.type.label(),
            "type": descriptor_to_json(c.type),
            "words": [str(w) for w in c.words],
            "inconclusive_merge": c.inconclusive_merge,
        }
        for c in ts.classes
    ]
    return {
        "cardinality": len(ts.classes),
        "labels": ts.labels(),
        "certified": all(c.type.certified for c in ts.classes) and not any(c.inconclusive_merge for c in ts.classes),
        "classes": classes,
    }


# ---------------------------------------------------------------------------
# checks


def _image_orders(family: ChainFamily, depth: int) -> list[Factored]:
    out = []
    for l in range(1, depth + 1):
        try:
            out.append(engine.group_image_order(l, family, engine.CHECK_IMAGE_MAX_POINTS))
        except DepthTooLarge:
            break
    return out


def lagrange_check(family: ChainFamily, results: list[engine.OrderResult], depth: int) -> dict:
    """m_l and [Gamma:Gamma_l] divide #(Gamma/C_l) wherever the image order is computable."""
    images = _image_orders(family, depth)
    failures = []
    for l, img in enumerate(images, start=1):
        if not engine.index_at(l, family).divides(img):
            failures.append({"word": None, "level": l})
        for r in results:
            if not r.per_level[l - 1].divides(img):
                failures.append({"word": str(r.word), "level": l})
    return {
        "passed": not failures,
        "levels_checked": len(images),
        "image_orders": [m.to_json() for m in images],
        "failures": failures,
    }


def backend_check(family: ChainFamily, results: list[engine.OrderResult], depth: int) -> dict:
    """Levels on which brute force re-derived the closed-form values.

    A mismatch raises during the run itself, so a finished report has agreed.
    """
    probe = next((r for r in results if not r.word.is_empty()), None)
    has_closed_form = True
    try:
        if probe is None:
            family.analytic_index(1)
        else:
            family.analytic_restricted_order(probe.word, probe.ctx, 1)
    except engine.AnalyticUnavailable:
        has_closed_form = False
    levels = []
    if has_closed_form:
        levels = [
            l for l in range(1, depth + 1)
            if family.brute_force_ok(l) and family.level_size(l) <= engine.crosscheck_max_points()
        ]
    return {"passed": True, "closed_form": has_closed_form, "cross_checked_levels": levels}


def finite_spectrum_empty(results: list[engine.OrderResult]) -> bool:
    """No certified nontrivial type carries a finite-exponent prime or a finite tail."""
    return all(
        r.type.finite_tail is None and not any(isinstance(s, Stable) for _, s in r.approx.status)
        for r in results
        if r.type.certified and not r.type.is_trivial()
    )


def tree_bound_check(family: ChainFamily, ts: engine.TypesetReport | None, results: list[engine.OrderResult]) -> dict:
    d = family.arity
    if d is None:
        return {"applies": False}
    primes = prime_divisors_upto(d)
    stray = sorted({p for r in results for m in r.per_level for p in m.primes if p not in primes})
    finite_ok = finite_spectrum_empty(results)
    out: dict[str, Any] = {
        "applies": True,
        "arity": d,
        "allowed_primes": [str(p) for p in primes],
        "stray_primes": [str(p) for p in stray],
        "finite_spectrum_empty": finite_ok,
        "typeset_bound": typeset_bound(d),
    }
    passed = not stray and finite_ok
    if ts is not None:
        out["cardinality"] = len(ts.classes)
        passed = passed and len(ts.classes) <= typeset_bound(d)
    out["passed"] = passed
    return out


def _checks(family: ChainFamily, results: list[engine.OrderResult], depth: int, ts=None) -> dict:
    return {
        "lagrange": lagrange_check(family, results, depth),
        "backend_agreement": backend_check(family, results, depth),
        "bound": tree_bound_check(family, ts, results),
    }


def _family_notes(family: ChainFamily) -> list[str]:
    notes = [IDENTITY_NOTE]
    if isinstance(family, SemidirectPermutationFamily):
        notes.append(CLASSIFICATION_NOTE)
    return notes


# ---------------------------------------------------------------------------
# documents


def _header(command: str, family: ChainFamily, cfg: RunConfig) -> dict:
    return {"schema": SCHEMA_VERSION, "command": command, "config": cfg.to_json(), "family": family_to_json(family)}


def type_report(cfg: RunConfig) -> dict:
    family = cfg.build_family()
    word = family.parse(cfg.word or "")
    family.check_word(word)
    ctx = cfg.context(family)
    if ctx.is_trivial():
        result, inside = engine.element_order_result(word, cfg.depth, family), None
    else:
        inside = engine.in_subgroup(word, ctx, family)
        result = engine.restricted_order_result(word, ctx, cfg.depth, family, allow_outside=True)
    doc = _header("type", family, cfg)
    doc["context"] = context_to_json(ctx)
    doc["results"] = [result_to_json(result, family, inside)]
    doc["checks"] = _checks(family, [result], cfg.depth)
    notes = []
    if inside is False:
        notes.append("the word lies outside H; its restricted order is taken over the orbit of the H-fixed coset")
    doc["notes"] = notes
    return doc


def _typeset(cfg: RunConfig) -> tuple[ChainFamily, RestrictedContext, engine.TypesetReport]:
    family = cfg.build_family()
    ctx = cfg.context(family)
    ts = engine.typeset_sample(family, cfg.max_word_length, cfg.depth, ctx, cfg.sample_words(family))
    return family, ctx, ts


def _companion(family: ChainFamily, cfg: RunConfig, ts: engine.TypesetReport) -> dict | None:
    """For the two-prime Heisenberg chain: the lattice with the same primes."""
    if not isinstance(family, HeisenbergFamily) or family.q is None or not ts.ctx.is_trivial():
        return None
    p, q = family.p, family.q
    other = SemidirectPermutationFamily([Schedule(infinite=(p,)), Schedule(infinite=(q,))], [[1, 0]])
    depth = min(cfg.depth, 6)
    ot = engine.typeset_sample(other, min(cfg.max_word_length, 4), depth)
    verdict = engine.commensurable(ts, ot)
    same = verdict.verdict == "equal_up_to_depth" and verdict.certified
    return {
        "family": family_to_json(other),
        "depth": depth,
        "labels": ot.labels(),
        "equal": same,
        "note": (
            f"the typeset equals that of Z^2 x| Z/2 with schedules {p}^l and {q}^l, "
            "although the two group chains are different" if same else
            "the typeset differs from that of the two-prime lattice chain"
        ),
    }


def typeset_report(cfg: RunConfig) -> dict:
    family, ctx, ts = _typeset(cfg)
    results = list(ts.results)
    doc = _header("typeset", family, cfg)
    doc["context"] = context_to_json(ctx)
    doc["results"] = [result_to_json(r, family) for r in results]
    doc["typeset"] = typeset_summary(ts)
    doc["checks"] = _checks(family, results, cfg.depth, ts)
    notes = _family_notes(family)
    companion = _companion(family, cfg, ts)
    if companion is not None:
        doc["checks"]["companion_typeset"] = companion
        notes.append(companion["note"])
    doc["notes"] = notes
    return doc


def commensurate_report(cfg_a: RunConfig, cfg_b: RunConfig) -> dict:
    fa, ca, ta = _typeset(cfg_a)
    fb, cb, tb = _typeset(cfg_b)
    verdict = engine.commensurable(ta, tb)
    sides = []
    for cfg, fam, ctx, ts in ((cfg_a, fa, ca, ta), (cfg_b, fb, cb, tb)):
        sides.append({
            "config": cfg.to_json(),
            "family": family_to_json(fam),
            "context": context_to_json(ctx),
            "typeset": typeset_summary(ts),
        })
    notes = [IDENTITY_NOTE]
    if verdict.verdict == "equal_up_to_depth" and type(fa) is not type(fb):
        notes.append("equal typesets are necessary for commensurability, not sufficient for isomorphism of the actions")
    return {
        "schema": SCHEMA_VERSION,
        "command": "commensurate",
        "sides": sides,
        "result": {
            "verdict": verdict.verdict,
            "certified": verdict.certified,
            "witness": None if verdict.witness is None else descriptor_to_json(verdict.witness),
            "witness_side": verdict.witness_side,
            "unmatched": list(verdict.unmatched),
        },
        "notes": notes,
    }


# ---------------------------------------------------------------------------
# text rendering


def _fmt_factored(d: dict) -> str:
    return str(Factored.from_json(d))


def render_text(doc: dict) -> str:
    cmd = doc.get("command")
    lines = []
    if cmd == "commensurate":
        for name, side in zip("AB", doc["sides"]):
            fam = side["family"]
            lines.append(f"{name}: {fam['name']} {json.dumps(fam['params'], sort_keys=True)} H level {side['context']['level']}")
            lines.append(f"   typeset {{{', '.join(side['typeset']['labels'])}}}")
        r = doc["result"]
        extra = ""
        if r["witness"] is not None:
            extra = f" (witness {r['witness']['label']} on side {r['witness_side']})"
        lines.append(f"verdict: {r['verdict']}{extra}{' [certified]' if r['certified'] else ''}")
    else:
        fam = doc["family"]
        lines.append(f"{fam['name']} {json.dumps(fam['params'], sort_keys=True)}")
        ctx = doc["context"]
        if ctx["level"]:
            conj = f" conjugated by {ctx['conjugator']}" if ctx["conjugator"] else ""
            lines.append(f"restricted to H = level {ctx['level']}{conj}")
        if cmd == "type":
            r = doc["results"][0]
            lines.append(f"word: {r['word'] or '1'}")
            for row in r["levels"]:
                lines.append(f"  level {row['level']:>2}: {_fmt_factored(row['order'])}")
            lines.append(f"xi at depth {r['steinitz']['depth']}: {_fmt_factored(r['steinitz']['value'])}")
            for p, s in sorted(r["steinitz"]["status"].items(), key=lambda kv: int(kv[0])):
                lines.append(f"  prime {p}: {s['kind']}{'' if s['kind'] != 'stable' else ' ' + s['exponent']}")
            lines.append(f"type: {r['type']['label']}")
            if "element_order" in r:
                lines.append(f"element order: {r['element_order']['kind']}")
        else:
            t = doc["typeset"]
            lines.append(f"sampled {len(doc['results'])} words, depth {doc['config']['depth']}")
            lines.append(f"typeset ({t['cardinality']}): {{{', '.join(t['labels'])}}}")
            for c in t["classes"]:
                flag = " (inconclusive merge)" if c["inconclusive_merge"] else ""
                shown = ", ".join(w or "1" for w in c["words"][:6])
                more = f", ... ({len(c['words'])} words)" if len(c["words"]) > 6 else ""
                lines.append(f"  {c['label']}{flag}: {shown}{more}")
        checks = doc["checks"]
        lag = checks["lagrange"]
        lines.append(f"lagrange: {'pass' if lag['passed'] else 'FAIL'} on {lag['levels_checked']} level(s)")
        b = checks["bound"]
        if b["applies"]:
            lines.append(f"tree bound: {'pass' if b['passed'] else 'FAIL'} (primes {', '.join(b['allowed_primes'])}, at most {b['typeset_bound']} types)")
        be = checks["backend_agreement"]
        if be["closed_form"]:
            lines.append(f"backends agree on levels {be['cross_checked_levels']}")
    for n in doc.get("notes", []):
        lines.append(f"note: {n}")
    return "\n".join(lines) + "\n"


__all__ = [
    "SCHEMA_VERSION",
    "commensurate_report",
    "dumps",
    "render_text",
    "result_to_json",
    "type_report",
    "typeset_report",
    "typeset_summary",
]
