"""``forcing-lab`` command line.

Exit status: 0 success / true, 1 computed false (empty Σ+, failed checks,
relation not forced), 2 usage or validation error. Errors are reported on
stderr as one JSON object ``{"error": <code>, "message": ...}``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import caps_from_env
from .errors import ForcingLabError, ParamError, UnknownCondition
from .forcing import Decision, Relation
from .instances import FAMILIES, gen, load_instance
from .names import format_hf, interpret
from .sigma import Strategy, render_sc, sigma_plus, sort_superconditions
from .verify import SUITES, run_suite

EXIT_OK, EXIT_FALSE, EXIT_ERROR = 0, 1, 2


def _load(args):
    caps = caps_from_env().override(args.caps)
    return load_instance(Path(args.file), caps)


def cmd_validate(args) -> int:
    inst = _load(args)
    print(f"ok digest={inst.digest()}")
    return EXIT_OK


def cmd_sigma(args) -> int:
    inst = _load(args)
    plus, trace = sigma_plus(inst, args.strategy)
    if args.trace:
        for line in trace.lines(inst):
            print(line)
    for sc in sort_superconditions(plus, inst.poset):
        print(render_sc(sc, inst))
    print(f"size={len(plus)}")
    print(f"lambda={trace.lam}")
    return EXIT_OK if plus else EXIT_FALSE


def cmd_generics(args) -> int:
    inst = _load(args)
    for G in inst.generics:
        members = ",".join(inst.poset.sort(G))
        print(f"{{{members}}} t[G]={format_hf(interpret(inst.root, G))}")
    return EXIT_OK


def cmd_forces(args) -> int:
    inst = _load(args)
    if args.p not in inst.poset:
        raise UnknownCondition(f"unknown condition {args.p!r}", condition=args.p)
    decision = inst.forcing.decides(args.p, args.rel, inst.lookup(args.s), inst.lookup(args.s2))
    print(decision.value)
    return EXIT_OK if decision is Decision.FORCES else EXIT_FALSE


def cmd_verify(args) -> int:
    inst = _load(args)
    report = run_suite(inst, args.suite, args.family_rank)
    if args.json:
        print(report.to_json())
    else:
        for line in report.lines():
            print(line)
    return EXIT_OK if report.ok else EXIT_FALSE


def _params(items: list[str]) -> dict:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(f"parameter {item!r} must be key=value")
        out[key] = value
    return out


def cmd_gen(args) -> int:
    caps = caps_from_env().override(args.caps)
    try:
        params = _params(args.params)
    except argparse.ArgumentTypeError as exc:
        raise ParamError(str(exc)) from None
    inst = gen(args.family, params, args.seed, caps)
    text = inst.dumps() + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out} digest={inst.digest()}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="forcing-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def with_file(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file")
        p.add_argument("--caps", help="cap overrides, e.g. poset=64,pe=8")
        p.set_defaults(func=func)
        return p

    with_file("validate", cmd_validate, "load and validate an instance")
    p = with_file("sigma", cmd_sigma, "compute the fixed point of superconditions")
    p.add_argument("--strategy", choices=[s.value for s in Strategy], default=Strategy.MINIMAL_REDUCTION.value)
    p.add_argument("--trace", action="store_true", help="print one line per stage")
    with_file("generics", cmd_generics, "list generic filters and t[G]")
    p = with_file("forces", cmd_forces, "decide p ⊩ s REL s2")
    p.add_argument("p")
    p.add_argument("rel", choices=[r.value for r in Relation])
    p.add_argument("s")
    p.add_argument("s2")
    p = with_file("verify", cmd_verify, "run the verification suite")
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--family-rank", type=int, default=3)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("gen", help="generate an instance file")
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("params", nargs="*", help="family parameters as key=value (n, m, X)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--caps")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ForcingLabError as exc:
        print(json.dumps(exc.as_dict(), ensure_ascii=False), file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
