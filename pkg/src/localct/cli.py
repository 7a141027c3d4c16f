"""Command line front end: ``verify --config scenario.toml`` or a single-task subcommand."""

from __future__ import annotations

import argparse
import json
import sys

from .config import load_config, validate_config
from .errors import LocalCTError, ParseError
from .suite import emit_report, run_suite, write_report

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _int_list(text: str):
    text = text.strip()
    try:
        if text.startswith("["):
            return json.loads(text)
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ParseError(f"cannot read integer list {text!r}", location="command line") from exc


def _common(p: argparse.ArgumentParser, top: bool = False):
    # subcommands repeat the flags without clobbering values given before them
    kw = {} if top else {"default": argparse.SUPPRESS}
    p.add_argument("--json", metavar="OUT", help="write the JSON report here ('-' for stdout)", **kw)
    p.add_argument("--precision", type=int, help="working p-adic precision N", **kw)
    p.add_argument("--seed", type=int, help="seed for sampled checks", **kw)
    p.add_argument("--no-confirm", action="store_true", help="skip the rerun at precision N+8", **kw)
    p.add_argument("--quiet", action="store_true", help="suppress the text summary", **kw)


def _tower_flags(p: argparse.ArgumentParser, required: bool = True):
    p.add_argument("--p", type=int, required=required, help="residue characteristic")
    p.add_argument("--u", help="monic residue modulus, constant term first (e.g. 0,1)")
    p.add_argument("--e-poly", help="Eisenstein polynomial; JSON for ω-coefficient lists")


def _law_flags(p: argparse.ArgumentParser, flag: str):
    p.add_argument(flag, dest="kind", default="units", help="units, additive, multiplicative, lubin-tate or elliptic")
    p.add_argument("--pi", type=int, help="uniformizer of a Lubin-Tate law")
    p.add_argument("--f", help="Frobenius series of a Lubin-Tate law")
    p.add_argument("--a", help="Weierstrass coefficients a1,a2,a3,a4,a6")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="verify", description="Verify cohomological triviality verdicts against brute force.")
    parser.add_argument("--config", help="scenario TOML file")
    parser.add_argument("--text", metavar="OUT", help="also write the text summary here")
    _common(parser, top=True)
    sub = parser.add_subparsers(dest="command")

    r = sub.add_parser("ramification", help="ramification filtration and Herbrand functions")
    _tower_flags(r)
    _common(r)

    c = sub.add_parser("cohomology", help="CT verdicts against brute-force Tate cohomology")
    _tower_flags(c)
    _law_flags(c, "--law")
    c.add_argument("--n", default="1,2,3", help="levels to check")
    c.add_argument("--truncation", type=int, help="upper level m of the quotients")
    _common(c)

    f = sub.add_parser("formal-group", help="construct a formal group law and check its axioms")
    f.add_argument("--p", type=int, required=True)
    _law_flags(f, "--kind")
    f.add_argument("--degree", type=int, default=12, help="truncation degree")
    _common(f)

    e = sub.add_parser("elliptic", help="reduction and norm certificates of a Weierstrass curve")
    _tower_flags(e)
    e.add_argument("--a", required=True, help="Weierstrass coefficients a1,a2,a3,a4,a6")
    e.add_argument("--component-order", type=int)
    _common(e)
    return parser


def _tower_table(args) -> dict:
    if args.u is None or args.e_poly is None:
        raise ParseError("--u and --e-poly are required", location="command line")
    return {"p": args.p, "u": _int_list(args.u), "e_poly": _int_list(args.e_poly)}


def _law_table(args) -> dict:
    law = {"kind": args.kind}
    if args.pi is not None:
        law["pi"] = args.pi
    if args.f is not None:
        law["f"] = _int_list(args.f)
    if args.a is not None:
        law["a"] = _int_list(args.a)
    return law


def config_from_args(args):
    if args.command is None:
        if not args.config:
            raise ParseError("need --config or a subcommand", location="command line")
        cfg = load_config(args.config)
    else:
        data: dict = {}
        if args.command == "ramification":
            data = {"tower": _tower_table(args), "tasks": ["ramification"]}
        elif args.command == "cohomology":
            data = {
                "tower": _tower_table(args),
                "laws": [_law_table(args)],
                "levels": {"n": _int_list(args.n)},
                "tasks": ["cohomology"],
            }
            if args.truncation is not None:
                data["levels"]["truncation"] = args.truncation
        elif args.command == "formal-group":
            if args.kind == "units":
                raise ParseError("--kind must name a formal group law", location="command line")
            # the base field Q_p itself carries the law
            data = {
                "tower": {"p": args.p, "u": [-1, 1], "e_poly": [-args.p, 1]},
                "laws": [_law_table(args)],
                "degree_cap": args.degree,
                "tasks": ["formal-axioms"],
            }
        elif args.command == "elliptic":
            curve = {"a": _int_list(args.a)}
            if args.component_order is not None:
                curve["component_order"] = args.component_order
            data = {"tower": _tower_table(args), "curve": curve, "tasks": ["elliptic-certificates"]}
        cfg = validate_config(data)
    if args.precision is not None:
        if args.precision < 1:
            raise ParseError("precision must be positive", location="--precision")
        cfg.precision = args.precision
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ParseError as exc:
        print(f"verify: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        report = run_suite(cfg, confirm_precision=not args.no_confirm)
    except LocalCTError as exc:
        print(f"verify: {exc}", file=sys.stderr)
        return EXIT_FAIL
    out = args.json or cfg.output
    try:
        if out == "-":
            sys.stdout.write(emit_report(report, "json"))
        elif out:
            write_report(report, out, "json")
        if getattr(args, "text", None):
            write_report(report, args.text, "text")
    except OSError as exc:
        print(f"verify: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not args.quiet and out != "-":
        sys.stdout.write(emit_report(report, "text"))
    return EXIT_OK if report.all_pass else EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
