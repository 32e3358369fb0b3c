"""Command-line entry point: ``nomakit {table1,region,alloc,multicell,myths}``.

Exit codes: 0 success, 1 a myth check found a counterexample, 2 usage error.
SNRs given in dB are converted to linear here and nowhere else.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import verify
from .allocation import max_sum_rate, max_weighted_sum_rate, qos_interval
from .errors import NomaError
from .multicell import load_config, simulate
from .rates import SnrVector, noma_two_user
from .region import noma_boundary, oma_boundary, to_csv

EXIT_OK, EXIT_COUNTEREXAMPLE, EXIT_USAGE = 0, 1, 2

# the reference channel: |h1| = 10 |h2| = sqrt(5), P = 40, i.e. gammas (200, 2)
DEFAULT_POWER = 40.0


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def _g12(x: float) -> str:
    return f"{x:.12g}"


def _round12(obj):
    if isinstance(obj, float):
        return float(_g12(obj))
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    return obj


def _add_channel_args(p: argparse.ArgumentParser):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--gamma", nargs=2, type=float, metavar=("G1", "G2"), help="linear SNRs (default 200 2)")
    g.add_argument("--snr-db", nargs=2, type=float, metavar=("DB1", "DB2"), help="SNRs in dB")
    g.add_argument("--gains", nargs=2, type=float, metavar=("H1", "H2"), help="channel magnitudes |h|")
    p.add_argument("--power", type=float, default=DEFAULT_POWER, help="transmit power used with --gains")


def _gammas(args) -> tuple[float, float]:
    if args.gamma:
        return tuple(args.gamma)
    if args.snr_db:
        return tuple(db_to_linear(d) for d in args.snr_db)
    if args.gains:
        return tuple(SnrVector.from_gains(args.gains, args.power).gammas)
    return verify.TABLE1_GAMMAS


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_table1(args) -> int:
    g1, g2 = verify.TABLE1_GAMMAS
    rows = []
    for name, alpha, *_ in verify.TABLE1:
        r1, r2 = noma_two_user(g1, g2, alpha)
        rows.append((name, alpha, r1, r2, r1 + r2))
    print(f"{'point':<6}{'alpha':>7}{'R1':>7}{'R2':>7}{'R_sum':>8}")
    for name, alpha, r1, r2, rs in rows:
        print(f"{name:<6}{alpha:>7g}{r1:>7.2f}{r2:>7.2f}{rs:>8.2f}")
    if args.csv:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("point", "alpha", "r1", "r2", "r_sum"))
        for name, *vals in rows:
            w.writerow((name, *map(_g12, vals)))
        Path(args.csv).write_text(buf.getvalue())
    return EXIT_OK


def cmd_region(args) -> int:
    g1, g2 = _gammas(args)
    text = to_csv([noma_boundary(g1, g2, args.n), oma_boundary(g1, g2, args.n)])
    _emit(text, args.out)
    return EXIT_OK


def cmd_alloc(args) -> int:
    g1, g2 = _gammas(args)
    if args.problem == "sum":
        a = max_sum_rate(g1, g2)
        result = {"problem": "sum", "alpha": a.alpha, "rates": list(a.rates), "sum_rate": a.sum_rate,
                  "degenerate": a.degenerate}
    elif args.problem == "wsr":
        a = max_weighted_sum_rate(g1, g2, args.mu)
        result = {"problem": "wsr", "mu": args.mu, "alpha": a.alpha, "rates": list(a.rates),
                  "weighted_sum_rate": a.rates[0] + args.mu * a.rates[1], "degenerate": a.degenerate}
    else:
        iv = qos_interval(g1, g2, (args.r1, args.r2))
        result = {"problem": "qos", "r1": args.r1, "r2": args.r2, **iv.to_dict()}
    result["gamma1"], result["gamma2"] = g1, g2
    print(json.dumps(_round12(result), indent=2))
    return EXIT_OK


def cmd_multicell(args) -> int:
    layout, plan, config = load_config(args.config)
    report = simulate(layout, plan, config, threads=args.threads)
    _emit(report.to_json() + "\n", args.out)
    return EXIT_OK


def cmd_myths(args) -> int:
    try:
        reports = verify.run_checks(args.seed, args.only)
    except KeyError as e:
        print(f"nomakit: {e.args[0]}", file=sys.stderr)
        return EXIT_USAGE
    text = verify.reports_json(reports) + "\n"
    _emit(text, args.out)
    for r in reports:
        print(f"myth {r.myth}: {r.verdict}", file=sys.stderr)
    return EXIT_OK if all(r.confirmed for r in reports) else EXIT_COUNTEREXAMPLE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nomakit", description="Downlink NOMA vs OMA analysis toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table1", help="rates at the five marked boundary points (A-E)")
    p.add_argument("--csv", metavar="PATH", help="also write exact values to CSV")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("region", help="NOMA and OMA boundary CSV (scheme,param,r1,r2)")
    _add_channel_args(p)
    p.add_argument("-n", type=int, default=101, help="grid points per boundary")
    p.add_argument("-o", "--out", metavar="PATH")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("alloc", help="power allocation problems")
    asub = p.add_subparsers(dest="problem", required=True)
    for name, helptext in (("sum", "maximize R1 + R2"), ("wsr", "maximize R1 + mu R2"),
                           ("qos", "alpha range meeting R1 >= r1, R2 >= r2")):
        q = asub.add_parser(name, help=helptext)
        _add_channel_args(q)
        if name == "wsr":
            q.add_argument("--mu", type=float, required=True)
        if name == "qos":
            q.add_argument("--r1", type=float, required=True)
            q.add_argument("--r2", type=float, required=True)
        q.set_defaults(func=cmd_alloc)

    p = sub.add_parser("multicell", help="Monte Carlo multi-cell simulation from a YAML/JSON config")
    p.add_argument("config")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("-o", "--out", metavar="PATH")
    p.set_defaults(func=cmd_multicell)

    p = sub.add_parser("myths", help="run the myth checks; exit 0 iff all are confirmed")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--only", type=int, nargs="+", metavar="N")
    p.add_argument("-o", "--out", metavar="PATH")
    p.set_defaults(func=cmd_myths)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (NomaError, OSError) as e:
        print(f"nomakit: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
