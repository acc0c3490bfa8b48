"""Command-line front end.

Subcommands: ``check`` (decide precedence of two measures), ``closure``
(emit the closed transitive relation), ``upsets`` (enumerate future-closed
subsets), ``timefn`` (enumerate or sample time functions), ``generate``
(materialize a generator recipe as an explicit spacetime), and ``verify``
(run the property suites).

Exit codes are a stable contract: 0 = feasible / success, 1 = infeasible or
not stably causal or failing suites, 2 = input or usage error, 3 = internal
consistency failure (decision procedure and oracle disagree).  All emitted
JSON is byte-deterministic: sorted keys, two-space indent, rationals as
strings, no timestamps.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from .errors import InputError, KCausalError, NotStablyCausalError
from .harness import SUITES, TrialConfig, report_to_jsonable, run_suite
from .measures import measure_from_jsonable
from .structure import (
    enumerate_upsets,
    generate,
    generator_spec_from_jsonable,
    space_from_jsonable,
    space_to_jsonable,
)
from .timefunctions import (
    enumerate_time_functions,
    sample_time_function,
    timefn_to_jsonable,
)
from .transport import (
    certificate_to_jsonable,
    coupling_to_jsonable,
    decide_k_causal,
    strassen_check,
)

__all__ = ["main"]

SEED_SPAN = 2**64


def _load_json(path: str):
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)


def _render(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(obj, path: str | None):
    text = _render(obj)
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _emit_lines(objs, path: str | None):
    text = "".join(json.dumps(obj, sort_keys=True) + "\n" for obj in objs)
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _cmd_check(args) -> int:
    space = space_from_jsonable(_load_json(args.spacetime))
    mu = measure_from_jsonable(_load_json(args.mu), space.events)
    nu = measure_from_jsonable(_load_json(args.nu), space.events)
    cert = decide_k_causal(space, mu, nu)
    if args.oracle:
        oracle_feasible, _ = strassen_check(space, mu, nu)
        if oracle_feasible != cert.feasible:
            print(
                "error: decision procedure and subset oracle disagree; "
                "this is a bug, please report the inputs",
                file=sys.stderr,
            )
            return 3
    if args.certificate:
        _emit(certificate_to_jsonable(cert), args.certificate)
    if args.witness and cert.feasible:
        _emit(coupling_to_jsonable(cert.witness), args.witness)
    print(cert.verdict)
    return 0 if cert.feasible else 1


def _cmd_closure(args) -> int:
    space = space_from_jsonable(_load_json(args.spacetime))
    _emit(space_to_jsonable(space, relation="kplus"), args.out)
    return 0


def _cmd_upsets(args) -> int:
    space = space_from_jsonable(_load_json(args.spacetime))
    subsets = enumerate_upsets(space, max_events=args.max_events)
    listed = sorted((len(s), sorted(s)) for s in subsets)
    _emit({"upsets": [labels for _, labels in listed]}, args.out)
    return 0


def _cmd_timefn(args) -> int:
    space = space_from_jsonable(_load_json(args.spacetime))
    if args.enumerate:
        timefns = enumerate_time_functions(space, max_events=args.max_events)
    else:
        if args.sample < 1:
            raise InputError("sample count must be positive")
        if args.seed is None:
            raise InputError("--sample requires an explicit --seed")
        rng = random.Random(args.seed)
        timefns = [
            sample_time_function(space, rng.randrange(SEED_SPAN))
            for _ in range(args.sample)
        ]
    _emit_lines((timefn_to_jsonable(t) for t in timefns), args.out)
    return 0


def _cmd_generate(args) -> int:
    recipe = generator_spec_from_jsonable(_load_json(args.recipe))
    space = generate(recipe)
    _emit(space_to_jsonable(space, relation=args.relation), args.out)
    return 0


def _cmd_verify(args) -> int:
    if args.suite == "all":
        suites = SUITES
    else:
        suites = tuple(name.strip() for name in args.suite.split(",") if name.strip())
    config = TrialConfig(
        suites=suites,
        trials=args.trials,
        seed=args.seed,
        max_events=args.max_events,
    )
    report = run_suite(config)
    _emit(report_to_jsonable(report), args.report)
    for suite, passed, failed in report.counts:
        print(f"{suite}: {passed} passed, {failed} failed")
    return 0 if report.ok else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kcausal",
        description="Decide causal precedence of exact-rational measures on "
        "finite causal spaces, with certificates.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    check = sub.add_parser("check", help="decide precedence of two measures")
    check.add_argument("spacetime", help="spacetime JSON path")
    check.add_argument("mu", help="source measure JSON path")
    check.add_argument("nu", help="target measure JSON path")
    check.add_argument("--witness", metavar="PATH", help="write witness coupling JSON")
    check.add_argument("--certificate", metavar="PATH", help="write certificate JSON")
    check.add_argument(
        "--oracle",
        action="store_true",
        help="cross-check against the exponential subset oracle",
    )
    check.set_defaults(handler=_cmd_check)

    closure = sub.add_parser("closure", help="emit the closed transitive relation")
    closure.add_argument("spacetime", help="spacetime JSON path")
    closure.add_argument("--out", metavar="PATH", help="output path (default stdout)")
    closure.set_defaults(handler=_cmd_closure)

    upsets = sub.add_parser("upsets", help="enumerate future-closed subsets")
    upsets.add_argument("spacetime", help="spacetime JSON path")
    upsets.add_argument("--out", metavar="PATH", help="output path (default stdout)")
    upsets.add_argument(
        "--max-events", type=int, default=20, help="refuse larger spaces (default 20)"
    )
    upsets.set_defaults(handler=_cmd_upsets)

    timefn = sub.add_parser("timefn", help="enumerate or sample time functions")
    timefn.add_argument("spacetime", help="spacetime JSON path")
    group = timefn.add_mutually_exclusive_group(required=True)
    group.add_argument(
        "--enumerate", action="store_true", help="one time function per linear extension"
    )
    group.add_argument("--sample", type=int, metavar="N", help="draw N seeded samples")
    timefn.add_argument("--seed", type=int, help="sampling seed (required with --sample)")
    timefn.add_argument(
        "--max-events", type=int, default=8, help="enumeration bound (default 8)"
    )
    timefn.add_argument("--out", metavar="PATH", help="output path (default stdout)")
    timefn.set_defaults(handler=_cmd_timefn)

    gen = sub.add_parser("generate", help="materialize a generator recipe")
    gen.add_argument("recipe", help="generator recipe JSON path")
    gen.add_argument(
        "--relation",
        choices=("raw", "kplus"),
        default="raw",
        help="emit the raw relation or its closure (default raw)",
    )
    gen.add_argument("--out", metavar="PATH", help="output path (default stdout)")
    gen.set_defaults(handler=_cmd_generate)

    verify = sub.add_parser("verify", help="run the property suites")
    verify.add_argument(
        "--suite",
        default="all",
        help="comma-separated suite names, or 'all' (default)",
    )
    verify.add_argument("--trials", type=int, default=200, help="trials per suite")
    verify.add_argument("--seed", type=int, default=0, help="base seed (default 0)")
    verify.add_argument(
        "--max-events", type=int, default=7, help="instance size cap (default 7)"
    )
    verify.add_argument("--report", metavar="PATH", help="report path (default stdout)")
    verify.set_defaults(handler=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except NotStablyCausalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (KCausalError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
