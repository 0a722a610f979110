"""Command-line front end: ``otl type|typeset|commensurate|verify|list-families``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .automata import AutomatonError
from .chain import BackendDisagreement, DepthTooLarge, NotInSubgroup, UnknownGenerator
from .config import FAMILIES, ConfigError, RunConfig
from .families import FamilyError
from .reports import commensurate_report, dumps, render_text, type_report, typeset_report
from .verify import SUITES, UnknownSuite, run_suite

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_DEPTH = 3


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit the JSON report instead of text")
    common.add_argument("--depth", type=int, help="override the config depth L")
    common.add_argument("--max-word-length", type=int, help="override the word-length bound")
    common.add_argument("--restrict-level", type=int, help="restrict to H = Gamma_k")
    common.add_argument("--output", "-o", type=Path, help="write the report here instead of stdout")

    p = argparse.ArgumentParser(prog="otl", description="Steinitz orders, types and typesets of group chains.")
    sub = p.add_subparsers(dest="command", required=True)
    t = sub.add_parser("type", parents=[common], help="Steinitz order and type of one element")
    t.add_argument("--config", required=True, type=Path)
    t.add_argument("--word", help="override the config word")
    ts = sub.add_parser("typeset", parents=[common], help="sampled (restricted) typeset")
    ts.add_argument("--config", required=True, type=Path)
    c = sub.add_parser("commensurate", parents=[common], help="compare two restricted typesets")
    c.add_argument("--config", required=True, type=Path, action="append", help="give exactly twice")
    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", nargs="?", default="paper-examples", help=f"one of {sorted(SUITES) + ['all']}")
    v.add_argument("--json", action="store_true")
    sub.add_parser("list-families", help="list family names and their parameters")
    return p


def _load(path: Path, args) -> RunConfig:
    return RunConfig.load(path).with_overrides(args.depth, args.max_word_length, args.restrict_level)


def _emit(text: str, args) -> None:
    if getattr(args, "output", None):
        args.output.write_text(text)
    else:
        sys.stdout.write(text)


def _run(args) -> int:
    if args.command == "list-families":
        width = max(len(n) for n in FAMILIES)
        sys.stdout.write("".join(f"{n:<{width}}  {desc}\n" for n, (_, desc) in FAMILIES.items()))
        return EXIT_OK
    if args.command == "verify":
        checks = run_suite(args.suite)
        if args.json:
            import json

            doc = {"suite": args.suite, "passed": all(c.passed for c in checks),
                   "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks]}
            sys.stdout.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
        else:
            for c in checks:
                extra = f"  ({c.detail})" if c.detail and not c.passed else ""
                sys.stdout.write(f"{'PASS' if c.passed else 'FAIL'}  {c.name}{extra}\n")
            sys.stdout.write(f"{sum(c.passed for c in checks)}/{len(checks)} checks passed\n")
        return EXIT_OK if all(c.passed for c in checks) else EXIT_FAILED
    if args.command == "commensurate":
        if len(args.config) != 2:
            raise ConfigError("commensurate: pass --config exactly twice")
        doc = commensurate_report(_load(args.config[0], args), _load(args.config[1], args))
    else:
        cfg = _load(args.config, args)
        if args.command == "type":
            if args.word is not None:
                cfg = RunConfig.from_dict(dict(cfg.to_json(), word=args.word))
            doc = type_report(cfg)
        else:
            doc = typeset_report(cfg)
    # the whole document exists before anything is written
    _emit(dumps(doc) if args.json else render_text(doc), args)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        return _run(args)
    except DepthTooLarge as exc:
        print(f"otl: depth too large: {exc}", file=sys.stderr)
        return EXIT_DEPTH
    except (ConfigError, FamilyError, AutomatonError, UnknownGenerator, UnknownSuite, NotInSubgroup) as exc:
        print(f"otl: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BackendDisagreement as exc:
        print(f"otl: backends disagree: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
