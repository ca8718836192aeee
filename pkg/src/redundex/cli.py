"""Command-line front end.

Exit codes: 0 ok, 2 bad input, 3 design check failed, 4 enumeration budget
exceeded, 5 output could not be written.
"""

from __future__ import annotations

import argparse
import configparser
import logging
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import designs
from .codes import ALPHABETS, CODE_NAMES, Kind, all_protocols, build_protocol, builtin_code, classify
from .decode import DecodePolicy, build_lookup_table
from .failure import (
    COST_NOTE,
    BudgetExceeded,
    GridSpec,
    both_sectors,
    compare,
    crossover,
    exact_failure,
    expected_cost,
    monte_carlo,
    truncated_failure,
)

EXIT_OK, EXIT_INPUT, EXIT_CHECK, EXIT_BUDGET, EXIT_IO = 0, 2, 3, 4, 5

log = logging.getLogger("redundex")


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


def _probability(text: str) -> float:
    try:
        p = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 <= p <= 1:
        raise argparse.ArgumentTypeError(f"probability {p} outside [0, 1]")
    return p


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get("REDUNDEX_WORKERS", "1")))
    except ValueError:
        return 1


def _add_policy_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--policy", choices=["balanced", "likelihood"], default="balanced",
                   help="explanation ranking (default: balanced)")
    p.add_argument("--policy-pq", type=float, help="p_q for likelihood ranking")
    p.add_argument("--policy-pm", type=float, help="p_m for likelihood ranking")
    p.add_argument("--tie", choices=["ambiguous", "first"], default="ambiguous",
                   help="unresolved ties count as failures (ambiguous) or take the first candidate")


def _add_protocol_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("code", choices=CODE_NAMES)
    p.add_argument("protocol", choices=[k.value for k in Kind if k is not Kind.CUSTOM])
    p.add_argument("--model", choices=list(ALPHABETS),
                   help="error alphabet (default: the code's own; CSS sectors are X-only)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="redundex",
        description="Exact failure rates of redundant syndrome extraction for small stabilizer codes.",
    )
    parser.add_argument("--config", help="key/value config file with one [section] per command")
    parser.add_argument("--verbose", action="store_true", help="print the resolved configuration")
    parser.add_argument("--workers", type=int, default=_default_workers(),
                        help="parallel workers (default: $REDUNDEX_WORKERS or 1)")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("codes", help="list built-in codes and protocols with [[n,k,d,s]] tags")

    p = sub.add_parser("design-check", help="verify a design file and its QEC constraints")
    p.add_argument("path")
    p.add_argument("--no-css", dest="css", action="store_false", help="skip constraint 2")

    p = sub.add_parser("failure", help="failure polynomial of one protocol")
    _add_protocol_args(p)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="full enumeration (default)")
    mode.add_argument("--degree", type=int, help="keep terms up to this total degree")
    p.add_argument("--budget", type=int, default=10**8, help="event budget for --exact")
    p.add_argument("--sectors", choices=["one", "both"], default="one",
                   help="CSS codes: one sector (default) or both sectors combined")
    p.add_argument("--out", help="write the polynomial here instead of stdout")
    _add_policy_flags(p)

    p = sub.add_parser("cost", help="expected number of measurements of one protocol")
    _add_protocol_args(p)
    p.add_argument("--sectors", choices=["one", "both"], default="one")

    p = sub.add_parser("compare", help="CSV grid of failure rates and differences")
    p.add_argument("--codes", default="steane", help="comma-separated code names")
    p.add_argument("--grid", default="0:0.01:11,0:0.01:11", help="pq0:pq1:steps,pm0:pm1:steps")
    p.add_argument("--degree", type=int, help="use truncated polynomials")
    p.add_argument("--sectors", choices=["one", "both"], default="one")
    p.add_argument("--out", help="CSV path (default stdout)")
    _add_policy_flags(p)

    p = sub.add_parser("simulate", help="Monte Carlo estimate next to the exact value")
    _add_protocol_args(p)
    p.add_argument("--pq", type=_probability, required=True)
    p.add_argument("--pm", type=_probability, required=True)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    _add_policy_flags(p)

    p = sub.add_parser("table", help="export a decoder lookup table as CSV")
    _add_protocol_args(p)
    p.add_argument("--out", required=True)
    _add_policy_flags(p)

    p = sub.add_parser("golden", help="regenerate golden polynomial files from full enumeration")
    p.add_argument("--dir", default="tests/golden")
    p.add_argument("--degree", type=int, default=8)
    return parser


def _subparser(parser: argparse.ArgumentParser, name: str) -> argparse.ArgumentParser:
    for action in parser._subparsers._group_actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> None:
    """Install config-file values as parser defaults so explicit flags win."""
    pre, _ = parser.parse_known_args(argv)
    if not pre.config:
        return
    cfg = configparser.ConfigParser()
    try:
        with open(pre.config) as fh:
            cfg.read_file(fh)
    except OSError as exc:
        raise CliError(f"cannot read config {pre.config}: {exc}") from None
    except configparser.Error as exc:
        raise CliError(f"bad config {pre.config}: {exc}") from None

    def install(p, section):
        actions = {a.dest: a for a in p._actions}
        values = {}
        for key, raw in section.items():
            dest = key.replace("-", "_")
            action = actions.get(dest)
            if action is None:
                continue
            if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
                values[dest] = section.getboolean(key) if hasattr(section, "getboolean") else raw
            elif action.type is not None:
                values[dest] = action.type(raw)
            else:
                values[dest] = raw
        p.set_defaults(**values)

    if cfg.has_section("global"):
        install(parser, cfg["global"])
    if pre.command and cfg.has_section(pre.command):
        install(_subparser(parser, pre.command), cfg[pre.command])


def _policy(args) -> DecodePolicy:
    if args.policy == "likelihood":
        if args.policy_pq is None or args.policy_pm is None:
            raise CliError("--policy likelihood needs --policy-pq and --policy-pm")
        return DecodePolicy.likelihood_at(args.policy_pq, args.policy_pm, args.tie)
    return DecodePolicy(tie_outcome=args.tie)


def _protocol(args):
    try:
        return build_protocol(builtin_code(args.code), args.protocol, getattr(args, "model", None))
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EXIT_IO) from None


# -- commands -------------------------------------------------------------------


def cmd_codes(args) -> int:
    for name in CODE_NAMES:
        code = builtin_code(name)
        for p in all_protocols(code):
            cost = expected_cost(p)
            print(f"{name:<9} {p.kind.value:<8} {classify(p)!s:<12} measured={p.m:<3} cost={cost}")
    return EXIT_OK


def cmd_design_check(args) -> int:
    try:
        d = designs.load_design(args.path)
    except designs.DesignParseError as exc:
        print(f"{args.path}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, ValueError) as exc:
        print(f"{args.path}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    params = designs.derive_parameters(d)
    fmt = lambda v: "-" if v is None else str(v)  # noqa: E731
    print(f"n={params.n} m={params.m} w={fmt(params.w)} rho={fmt(params.rho)} lambda={fmt(params.lam)}")
    if not params.is_2design:
        print(f"not a 2-design: {params.violation}")
        return EXIT_CHECK
    print(f"symmetric: {'yes' if params.is_symmetric else 'no'}")
    print(f"m*w = n*rho: {params.m * params.w} = {params.n * params.rho}")
    print(f"lambda*(n-1) = rho*(w-1): {params.lam * (params.n - 1)} = {params.rho * (params.w - 1)}")
    verdict = designs.check_qec_constraints(d, css=args.css)
    print(f"constraint 1 (w even): {'pass' if verdict.constraint1_ok else 'FAIL'}")
    if verdict.constraint2_ok is not None:
        print(f"constraint 2 (even block intersections): {'pass' if verdict.constraint2_ok else 'FAIL'}")
    dists = {designs.signature_distance(d, j, k) for j in range(d.n_points) for k in range(j + 1, d.n_points)}
    print(f"signature distance: {' '.join(map(str, sorted(dists)))} (2*(rho-lambda) = {2 * (params.rho - params.lam)})")
    return EXIT_OK


def cmd_failure(args) -> int:
    p = _protocol(args)
    policy = _policy(args)
    if args.degree is not None:
        poly = truncated_failure(p, args.degree, policy=policy, workers=args.workers)
    else:
        try:
            poly = exact_failure(p, policy=policy, workers=args.workers, budget=args.budget)
        except BudgetExceeded as exc:
            raise CliError(f"{exc} (pass --degree K)", EXIT_BUDGET) from None
    if args.sectors == "both" and p.code.sector.value == "css-sector":
        poly, _ = both_sectors(poly, expected_cost(p))
        if args.degree is not None:
            poly = poly.truncate(args.degree)
    _write(args.out, poly.to_text())
    return EXIT_OK


def cmd_cost(args) -> int:
    p = _protocol(args)
    cost = expected_cost(p)
    if args.sectors == "both" and p.code.sector.value == "css-sector":
        cost = cost * 2
    sys.stdout.write(cost.to_text())
    if p.kind is Kind.FT:
        print(f"# {COST_NOTE}")
    return EXIT_OK


def cmd_compare(args) -> int:
    try:
        grid = GridSpec.parse(args.grid)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    codes = [c.strip() for c in args.codes.split(",") if c.strip()]
    for c in codes:
        if c not in CODE_NAMES:
            raise CliError(f"unknown code {c!r}")
    try:
        report = compare(codes, grid, degree=args.degree, policy=_policy(args),
                         workers=args.workers, sectors=args.sectors)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    except BudgetExceeded as exc:
        raise CliError(str(exc), EXIT_BUDGET) from None
    _write(args.out, report.csv_text())
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.trials < 1:
        raise CliError("--trials must be at least 1")
    p = _protocol(args)
    policy = _policy(args)
    res = monte_carlo(p, args.pq, args.pm, args.trials, args.seed, policy=policy, workers=args.workers)
    try:
        exact = float(exact_failure(p, policy=policy).evaluate(Fraction(args.pq), Fraction(args.pm)))
    except BudgetExceeded:
        exact = math.nan
    if res.stderr > 0:
        z = (res.estimate - exact) / res.stderr
    else:
        z = 0.0 if res.estimate == exact else math.inf
    print(f"protocol: {p.name}")
    print(f"pq={args.pq} pm={args.pm} trials={args.trials} seed={args.seed} workers={args.workers}")
    print(f"estimate: {res.estimate:.12g} +/- {res.stderr:.6g}")
    print(f"exact: {exact:.12g}")
    print(f"z: {z:.4g}")
    return EXIT_OK


def cmd_table(args) -> int:
    p = _protocol(args)
    try:
        build_lookup_table(p, _policy(args)).to_csv(args.out)
    except OSError as exc:
        raise CliError(f"cannot write {args.out}: {exc}", EXIT_IO) from None
    return EXIT_OK


def cmd_golden(args) -> int:
    out = Path(args.dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create {out}: {exc}", EXIT_IO) from None
    for name in CODE_NAMES:
        code = builtin_code(name)
        exact = {}
        for p in all_protocols(code):
            exact[p.kind] = exact_failure(p, workers=args.workers)
            _write(str(out / f"{p.name}.poly"), exact[p.kind].truncate(args.degree).to_text())
            print(f"wrote {out / f'{p.name}.poly'}")
        if Kind.MR in exact:
            cx = crossover(exact[Kind.FT], exact[Kind.MR])
            _write(str(out / f"crossover_{name}_ft-mr.txt"), f"{cx.slope}\n")
    return EXIT_OK


COMMANDS = {
    "codes": cmd_codes,
    "design-check": cmd_design_check,
    "failure": cmd_failure,
    "cost": cmd_cost,
    "compare": cmd_compare,
    "simulate": cmd_simulate,
    "table": cmd_table,
    "golden": cmd_golden,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ValueError, argparse.ArgumentTypeError) as exc:
        print(f"error: bad config value: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.verbose:
        for key, value in sorted(vars(args).items()):
            print(f"# {key} = {value}", file=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
