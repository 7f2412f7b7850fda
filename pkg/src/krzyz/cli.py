"""Command-line interface.

Exit codes: 0 success, 1 a condition fails, 2 unconverged or only
approximate verdicts, 64 bad usage, 65 bad input data.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from .checker import APPROXIMATE, FAILS, Tolerances, check_conditions
from .measure import conjectured_extremal, load_candidate
from .optimizer import SearchOptions, multistart, sweep_N
from .semigroup import generate, interval_semigroup, is_inductive
from .series import ComplexSeries, exp_series, log_series, wiener_transform

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INCOMPLETE = 2
EXIT_USAGE = 64
EXIT_DATA = 65

# options whose values may legitimately start with '-'
_VALUE_FLAGS = ("--coeffs", "--generators-complement", "--inductive", "--interval")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


@dataclass(frozen=True)
class CliConfig:
    command: str
    options: dict
    output_path: str | None
    format: str


def parse_complex(text: str) -> complex:
    """Parse ``a+bi`` style literals: ``2``, ``-1.5``, ``3i``, ``-i``, ``1-2.5i``."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty coefficient")
    if s.endswith(("i", "j")):
        s = s[:-1]
        if s in ("", "+", "-"):
            s += "1"
        s += "j"
    return complex(s)


def parse_complex_list(text: str) -> list[complex]:
    return [parse_complex(tok) for tok in text.split(",")]


def parse_int_set(text: str) -> set[int]:
    text = text.strip()
    if not text:
        return set()
    try:
        return {int(tok) for tok in text.split(",")}
    except ValueError as exc:
        raise UsageError(f"not a comma-separated integer list: {text!r}") from exc


def format_complex(z: complex) -> str:
    re, im = z.real + 0.0, z.imag + 0.0  # the +0.0 turns -0.0 into 0.0
    if im == 0:
        return format(re, ".12g")
    if re == 0:
        return f"{im:.12g}i"
    return f"{re:.12g}{im:+.12g}i"


def _preprocess(argv: list[str]) -> list[str]:
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="krzyz", description="Coefficient extremal problem toolkit.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    opt = sub.add_parser("optimize", help="maximize |a_n| over atomic measures")
    opt.add_argument("--n", type=int, required=True)
    opt.add_argument("--restarts", type=int, default=SearchOptions.restarts)
    opt.add_argument("--seed", type=int, default=SearchOptions.seed)
    opt.add_argument("--max-iters", type=int, default=SearchOptions.max_iters)
    opt.add_argument("--atoms", type=int, default=None, help="atom count N (default n)")
    opt.add_argument("--sweep-N", action="store_true", help="search every atom count 1..n")
    opt.add_argument("--parallel", action="store_true")
    opt.add_argument("--out", default=None, help="write the result JSON here")
    opt.add_argument("--csv", default=None, help="write the per-restart log here")
    opt.add_argument("--format", choices=("json", "csv", "text"), default="json")

    chk = sub.add_parser("check", help="evaluate the seventeen conditions on a candidate")
    src = chk.add_mutually_exclusive_group(required=True)
    src.add_argument("--candidate", help="candidate JSON file")
    src.add_argument("--conjectured", type=int, help="use exp((z^n - 1)/(z^n + 1))")
    chk.add_argument("--tol", type=float, default=Tolerances.eq_tol, help="equality tolerance")
    chk.add_argument("--out", default=None)
    chk.add_argument("--format", choices=("json", "text"), default="json")

    sg = sub.add_parser("semigroup", help="semigroup membership and inductivity")
    mode = sg.add_mutually_exclusive_group(required=True)
    mode.add_argument("--generators-complement", metavar="K", help="print G(K) up to the bound")
    mode.add_argument("--interval", metavar="A,B", help="semigroup generated by A..B")
    mode.add_argument("--inductive", metavar="I", help="decide whether I is inductive")
    sg.add_argument("--n", type=int)
    sg.add_argument("--bound", type=int)
    sg.add_argument("--format", choices=("json", "text"), default="text")

    se = sub.add_parser("series", help="truncated power series utilities")
    op = se.add_mutually_exclusive_group(required=True)
    op.add_argument("--exp", action="store_true")
    op.add_argument("--log", action="store_true")
    op.add_argument("--wiener", type=int, metavar="N")
    se.add_argument("--coeffs", required=True, help='comma-separated, e.g. "1,0.5-2i,3i"')
    se.add_argument("--degree", type=int, default=None)
    se.add_argument("--format", choices=("json", "text"), default="text")
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_optimize(cfg: CliConfig) -> int:
    o = cfg.options
    n = o["n"]
    if n < 1:
        raise UsageError("--n must be at least 1")
    N = n if o["atoms"] is None else o["atoms"]
    if not 1 <= N <= n:
        raise UsageError("--atoms must lie in 1..n")
    try:
        opts = SearchOptions(o["restarts"], o["max_iters"], seed=o["seed"], parallel=o["parallel"])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    result = sweep_N(n, opts) if o["sweep_N"] else multistart(n, N, opts)
    payload = json.dumps(result.to_dict(), indent=2, sort_keys=True) + "\n"
    if cfg.output_path:
        Path(cfg.output_path).write_text(payload, encoding="utf-8")
    if o["csv"]:
        Path(o["csv"]).write_text(result.history_csv(), encoding="utf-8")
    if cfg.format == "json":
        sys.stdout.write(payload)
    elif cfg.format == "csv":
        sys.stdout.write(result.history_csv())
    else:
        value = f"{result.value:.15f}" if result.defined else "undefined"
        sys.stdout.write(
            f"n={n} value={value} converged={result.converged} clusters={result.cluster_count}\n"
        )
        for k, v in sorted(result.per_N.items()):
            sys.stdout.write(f"  N={k}: {v:.15f}\n")
    return EXIT_OK if result.converged else EXIT_INCOMPLETE


def cmd_check(cfg: CliConfig) -> int:
    o = cfg.options
    try:
        tol = Tolerances(eq_tol=o["tol"])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if o["conjectured"] is not None:
        if o["conjectured"] < 1:
            raise UsageError("--conjectured must be at least 1")
        cand = conjectured_extremal(o["conjectured"])
    else:
        try:
            cand = load_candidate(o["candidate"])
        except (OSError, ValueError) as exc:
            raise DataError(f"cannot read candidate: {exc}") from exc
    report = check_conditions(cand, tol)
    if cfg.format == "json":
        text = report.to_json() + "\n"
    else:
        text = "".join(
            f"({k}) {r.verdict:<11} residual={r.residual:.3e} {r.note}\n"
            for k, r in report.conditions.items()
        )
    _emit(text, cfg.output_path)
    verdicts = report.verdicts().values()
    if FAILS in verdicts:
        return EXIT_FAIL
    if APPROXIMATE in verdicts:
        return EXIT_INCOMPLETE
    return EXIT_OK


def _format_set(members) -> str:
    return "{" + ",".join(str(x) for x in members) + "}"


def cmd_semigroup(cfg: CliConfig) -> int:
    o = cfg.options
    try:
        if o["interval"] is not None:
            parts = o["interval"].split(",")
            if len(parts) != 2 or o["bound"] is None:
                raise UsageError("--interval needs A,B and --bound")
            a, b = (int(p) for p in parts)
            table = interval_semigroup(a, b, o["bound"])
            data, text = {"members": table.members}, _format_set(table.members)
        else:
            if o["n"] is None:
                raise UsageError("--n is required")
            if o["inductive"] is not None:
                answer = is_inductive(parse_int_set(o["inductive"]), o["n"])
                data, text = {"inductive": answer}, str(answer).lower()
            else:
                K = parse_int_set(o["generators_complement"])
                table = generate(K, o["n"], o["bound"])
                data, text = {"members": table.members}, _format_set(table.members)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if cfg.format == "json":
        sys.stdout.write(json.dumps(data, sort_keys=True) + "\n")
    else:
        sys.stdout.write(text + "\n")
    return EXIT_OK


def cmd_series(cfg: CliConfig) -> int:
    o = cfg.options
    try:
        coeffs = parse_complex_list(o["coeffs"])
    except ValueError as exc:
        raise UsageError(f"bad coefficient list: {exc}") from exc
    degree = len(coeffs) - 1 if o["degree"] is None else o["degree"]
    if degree < 0:
        raise UsageError("--degree must be non-negative")
    s = ComplexSeries(coeffs).resized(degree)
    try:
        if o["exp"]:
            out = exp_series(s)
        elif o["log"]:
            out = log_series(s)
        else:
            out = wiener_transform(s, o["wiener"])
    except ValueError as exc:
        if o["log"]:
            raise DataError(str(exc)) from exc
        raise UsageError(str(exc)) from exc
    if cfg.format == "json":
        data = {"coeffs": [[z.real, z.imag] for z in out.coeffs.tolist()]}
        sys.stdout.write(json.dumps(data) + "\n")
    else:
        sys.stdout.write(",".join(format_complex(z) for z in out.coeffs.tolist()) + "\n")
    return EXIT_OK


_COMMANDS = {
    "optimize": cmd_optimize,
    "check": cmd_check,
    "semigroup": cmd_semigroup,
    "series": cmd_series,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_preprocess(argv))
    except SystemExit as exc:
        # --help exits 0 through here as well
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    options = vars(args).copy()
    cfg = CliConfig(args.command, options, options.pop("out", None), options.pop("format", "text"))
    try:
        return _COMMANDS[args.command](cfg)
    except UsageError as exc:
        sys.stderr.write(f"krzyz {args.command}: {exc}\n")
        return EXIT_USAGE
    except DataError as exc:
        sys.stderr.write(f"krzyz {args.command}: {exc}\n")
        return EXIT_DATA


if __name__ == "__main__":
    raise SystemExit(main())
