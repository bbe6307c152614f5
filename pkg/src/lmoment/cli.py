"""Command-line front end: ``lmoment <subcommand> ...``.

Exit codes: 0 success, 1 a verification failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import asdict

from . import analytic, moments, predict, verify
from .characters import build_group, parse_character

CSV_DIGITS = 15


class UsageError(Exception):
    pass


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return format(v, f".{CSV_DIGITS}g")
    if v is None:
        return ""
    return str(v)


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _workers(args) -> int:
    if args.workers is not None:
        n = args.workers
    else:
        env = os.environ.get("LMOMENT_WORKERS")
        try:
            n = int(env) if env else 1
        except ValueError:
            raise UsageError(f"LMOMENT_WORKERS must be an integer, got {env!r}")
    if n < 1:
        raise UsageError("worker count must be at least 1")
    return n


# --------------------------------------------------------------------------
# subcommands; each returns (columns, rows, ok)
# --------------------------------------------------------------------------


def cmd_predict(args):
    tab = predict.prediction_table(args.q, args.T)
    cols = list(tab.as_dict())
    return cols, [tab.as_dict()], True


MOMENT_COLUMNS = ["q", "T", "order", "empirical", "predicted", "ratio", "quad_error", "char_count"]


def _moment_row(r: moments.MomentResult) -> dict:
    s = r.spec
    return {
        "q": s.q,
        "T": float(s.T),
        "order": s.order,
        "empirical": r.empirical,
        "predicted": r.predicted,
        "ratio": r.ratio,
        "quad_error": r.quadrature_error,
        "char_count": r.char_count,
    }


def _spec(args, q, T, order) -> moments.MomentSpec:
    return moments.MomentSpec(q, T, order, args.panel, args.points, args.eps, getattr(args, "parity", None))


def cmd_moment(args):
    res = moments.moment(args.q, args.T, args.order, _spec(args, args.q, args.T, args.order), _workers(args))
    if args.breakdown:
        cols = ["character", "q", "T", "order", "integral"]
        rows = [
            {"character": cid, "q": args.q, "T": float(args.T), "order": args.order, "integral": v}
            for cid, v in res.per_character.items()
        ]
        return cols, rows, True
    return MOMENT_COLUMNS, [_moment_row(res)], True


def cmd_sweep(args):
    rows = []
    workers = _workers(args)
    for order in args.order:
        for q in args.q_list:
            for T in args.T_list:
                res = moments.moment(q, T, order, _spec(args, q, T, order), workers)
                rows.append(_moment_row(res))
    return MOMENT_COLUMNS, rows, True


DECOMPOSE_TOL = 1e-5


def cmd_decompose(args):
    d = moments.decomposed_fourth_moment(args.q, args.T, _spec(args, args.q, args.T, 4), _workers(args))
    row = asdict(d)
    row["in_hypothesis"] = predict.in_hypothesis(args.q, args.T)
    ok = d.cauchy_ok and (d.relative_difference < DECOMPOSE_TOL or d.fourth_moment == 0)
    return list(row), [row], ok


def cmd_lvalue(args):
    if ":" in args.chi:
        chi = parse_character(args.chi)
        if args.q is not None and args.q != chi.q:
            raise UsageError(f"--q {args.q} disagrees with character {args.chi}")
    else:
        if args.q is None:
            raise UsageError("--q is required when --chi gives exponents only")
        chi = parse_character(f"{args.q}:{args.chi}")
    cols = ["character", "t", "method", "re", "im", "abs_sq", "error_estimate"]
    if args.method == "oracle":
        r = analytic.l_oracle(0.5 + 1j * args.t, chi)
        row = {
            "character": chi.id,
            "t": args.t,
            "method": "oracle",
            "re": r.value.real,
            "im": r.value.imag,
            "abs_sq": abs(r.value) ** 2,
            "error_estimate": r.error_estimate,
        }
    else:
        val = analytic.abs_L_sq_smoothed(args.t, chi, args.eps)
        row = {
            "character": chi.id,
            "t": args.t,
            "method": "smoothed",
            "re": None,
            "im": None,
            "abs_sq": val,
            "error_estimate": args.eps,
        }
    return cols, [row], True


def cmd_weight(args):
    w = analytic.weight_W(args.x, args.t, args.parity)
    cols = ["x", "t", "parity", "tau", "value", "quad_error", "line"]
    row = {"x": w.x, "t": w.t, "parity": w.parity_a, "tau": w.tau, "value": w.value,
           "quad_error": w.quad_error, "line": w.line}
    return cols, [row], w.quad_error <= 1e-10


REPORT_COLUMNS = ["lemma", "params", "lhs", "rhs", "residual", "implied_constant", "pass"]


def _report_row(r: verify.LemmaReport) -> dict:
    return {
        "lemma": r.lemma,
        "params": r.params_str(),
        "lhs": float(r.lhs),
        "rhs": float(r.rhs),
        "residual": float(r.residual),
        "implied_constant": r.implied_constant,
        "pass": r.passed,
    }


def _verify_reports(args, which: str) -> list[verify.LemmaReport]:
    if which == "lemma3":
        return verify.lemma3_sweep(args.q_max or 100, args.pairs, args.seed)
    if which == "lemma4":
        return [verify.lemma4_E(k, Z, Z) for k in args.k_list for Z in args.Z_list]
    if which == "lemma5":
        return [verify.lemma5_sum(x, q) for q in range(2, (args.q_max or 210) + 1) for x in args.x_list]
    if which == "lemma6":
        reps = [verify.lemma6_sums(x, q) for q in args.q_list for x in args.x_list]
        return reps + [verify.lemma6_trend(q, tuple(args.x_list)) for q in args.q_list]
    if which == "bijection":
        return [verify.bijection_all_levels(args.z_max)]
    raise UsageError(f"unknown lemma {which!r}")


def cmd_verify(args):
    targets = ["lemma3", "lemma4", "lemma5", "lemma6", "bijection"] if args.lemma == "all" else [args.lemma]
    reports = []
    for which in targets:
        reports.extend(_verify_reports(args, which))
    rows = [_report_row(r) for r in reports]
    return REPORT_COLUMNS, rows, all(r.passed for r in reports)


# --------------------------------------------------------------------------
# parser and driver
# --------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", "-o", default=None, help="output file (default: stdout)")
    p.add_argument("--workers", type=int, default=None, help="worker processes (env LMOMENT_WORKERS)")
    p.add_argument("--seed", type=int, default=0)


def _quadrature(p: argparse.ArgumentParser) -> None:
    p.add_argument("--panel", type=float, default=0.25, help="Gauss-Legendre panel width")
    p.add_argument("--points", type=int, default=8, help="nodes per panel")
    p.add_argument("--eps", type=float, default=1e-6, help="tail tolerance of the smoothed series")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lmoment", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("predict", help="closed-form main terms")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--T", type=float, required=True)
    _common(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("moment", help="moment over primitive characters")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--order", type=int, choices=(2, 4), default=4)
    p.add_argument("--parity", type=int, choices=(0, 1), default=None)
    p.add_argument("--breakdown", action="store_true", help="one row per character")
    _quadrature(p)
    _common(p)
    p.set_defaults(func=cmd_moment)

    p = sub.add_parser("decompose", help="A/B split of the fourth moment")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--T", type=float, required=True)
    _quadrature(p)
    _common(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("lvalue", help="L(1/2 + it, chi)")
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--chi", required=True, help="character id 'q:e1,e2' or exponents 'e1,e2' with --q")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--method", choices=("oracle", "smoothed"), default="oracle")
    p.add_argument("--eps", type=float, default=1e-8)
    _common(p)
    p.set_defaults(func=cmd_lvalue)

    p = sub.add_parser("weight", help="the weight W_a(x; t)")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--parity", type=int, choices=(0, 1), default=0)
    _common(p)
    p.set_defaults(func=cmd_weight)

    p = sub.add_parser("verify", help="brute-force lemma checks")
    p.add_argument("lemma", choices=("lemma3", "lemma4", "lemma5", "lemma6", "bijection", "all"))
    p.add_argument("--q-max", type=int, default=None, help="lemma3 (default 100) and lemma5 (default 210)")
    p.add_argument("--pairs", type=int, default=200)
    p.add_argument("--k-list", type=_int_list, default=[3, 5, 7, 11])
    p.add_argument("--Z-list", type=_float_list, default=[4, 16, 64, 256])
    p.add_argument("--x-list", type=_float_list, default=[1e2, 1e4, 1e6])
    p.add_argument("--q-list", type=_int_list, default=[2, 3, 4, 5, 6, 7, 10, 12, 30, 210])
    p.add_argument("--z-max", type=int, default=1000)
    _common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="moment ratio table over a (q, T) grid")
    p.add_argument("--q-list", type=_int_list, default=[3, 4, 5, 7, 8, 9, 11, 13])
    p.add_argument("--T-list", type=_float_list, default=[10, 40, 160])
    p.add_argument("--order", type=_int_list, default=[4])
    _quadrature(p)
    _common(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def render(fmt: str, command: str, config: dict, cols, rows, elapsed_ms: float) -> str:
    if fmt == "json":
        payload = {
            "command": command,
            "config": _jsonable(config),
            "results": _jsonable(rows),
            "timing_ms": round(elapsed_ms, 3),
        }
        return json.dumps(payload, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for row in rows:
        w.writerow([_fmt(row.get(c)) for c in cols])
    return buf.getvalue()


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    config = {k: v for k, v in vars(args).items() if k not in ("func", "output")}
    start = time.perf_counter()
    try:
        if getattr(args, "order", None) is not None and args.command == "sweep":
            bad = [o for o in args.order if o not in (2, 4)]
            if bad:
                raise UsageError(f"order must be 2 or 4, got {bad}")
        cols, rows, ok = args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"lmoment {args.command}: error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 2
    text = render(args.format, args.command, config, cols, rows, 1000 * (time.perf_counter() - start))
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
