"""``pass-ma`` command line: solve, sweep-n, sweep-rate, placement-demo, validate.

Exit codes: 0 success, 1 usage or config error, 2 solver failure, 3 validation failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .channel import UserPos
from .errors import ConfigError, PassError
from .experiments import (DEFAULT_GAMMA1_VALUES, DEFAULT_N_VALUES, PLACEMENT_DEMO, ScenarioConfig,
                          drop_users, load_config, placement_demo, rows_to_csv, run_sweep,
                          solve_scenario, write_sweep)
from .power import watt_to_dbm
from .validate import run_validation

EXIT_OK, EXIT_USAGE, EXIT_SOLVER, EXIT_VALIDATION = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _u64(text):
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="scenario file (key = value lines)")
    common.add_argument("--seed", type=_u64, help="override the config seed")
    common.add_argument("--out", metavar="PATH", help="output CSV path")
    common.add_argument("--workers", type=_positive_int, default=1, help="parallel drops (processes)")
    common.add_argument("--svg", action="store_true", help="also write an SVG chart of the medians")

    p = _Parser(prog="pass-ma", description="Minimum-power pinching-antenna placement for two-user "
                                            "NOMA, FDMA and TDMA.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", parents=[common], help="solve one scenario")
    s.add_argument("--drop", type=int, default=0, help="drop id used to draw users (default 0)")
    s.add_argument("--users", type=float, nargs=4, metavar=("X1", "Y1", "X2", "Y2"),
                   help="explicit user positions instead of a random drop")

    s = sub.add_parser("sweep-n", parents=[common], help="power versus the number of PAs")
    s.add_argument("--values", type=_positive_int, nargs="+", default=list(DEFAULT_N_VALUES))

    s = sub.add_parser("sweep-rate", parents=[common], help="power versus the target rate of user 1")
    s.add_argument("--values", type=float, nargs="+", default=list(DEFAULT_GAMMA1_VALUES))

    sub.add_parser("placement-demo", parents=[common], help="the two L = 30 m placement cases")

    s = sub.add_parser("validate", parents=[common], help="oracle and invariant checks")
    s.add_argument("--quick", action="store_true", help="fewer scenarios per check")
    return p


def _config(args) -> ScenarioConfig:
    cfg = load_config(args.config) if args.config else ScenarioConfig()
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    return cfg


def _fmt_w(w):
    return f"{w:.6e} W ({watt_to_dbm(w):.4f} dBm)"


def cmd_solve(args, cfg) -> int:
    if args.users:
        x1, y1, x2, y2 = args.users
        users = (UserPos(x1, y1), UserPos(x2, y2))
    else:
        users = drop_users(cfg.seed, args.drop, cfg.geometry())
    print(f"users: ({users[0].x:.4f}, {users[0].y:.4f}) ({users[1].x:.4f}, {users[1].y:.4f})  "
          f"N={cfg.N} gamma=({cfg.gamma1_bpshz:g}, {cfg.gamma2_bpshz:g})")
    rows = solve_scenario(cfg, users, drop_id=args.drop)
    failed = False
    for r in rows:
        if r.error:
            print(f"{r.scheme:10s} ERROR {r.error}", file=sys.stderr)
            failed = True
            continue
        print(f"{r.scheme:10s} total {_fmt_w(r.total_power_w)}  sic={r.sic_order or '-'}  "
              f"iters={r.sca_iters}  placement={r.placement}")
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(rows_to_csv(rows))
    return EXIT_SOLVER if failed else EXIT_OK


def cmd_sweep(args, cfg, variable) -> int:
    result = run_sweep(cfg, variable, args.values, workers=args.workers)
    out = args.out or ("sweep_n.csv" if variable == "N" else "sweep_rate.csv")
    for path in write_sweep(result, out, svg=args.svg):
        print(f"wrote {path}")
    errors = sum(1 for r in result.rows if r.error)
    if errors:
        print(f"{errors} of {len(result.rows)} rows failed; see the error column", file=sys.stderr)
    return EXIT_OK


def cmd_demo(args, cfg) -> int:
    reports = placement_demo(cfg)
    for case, users in PLACEMENT_DEMO.items():
        print(f"{case}: users ({users[0].x}, {users[0].y}) ({users[1].x}, {users[1].y}), L=30 m")
        for scheme, rep in reports[case].items():
            centers = ", ".join(f"{np.mean(p):.3f}" for p in rep.placements)
            print(f"  {scheme:5s} total {_fmt_w(rep.total_power)}  cluster center(s) {centers}")
    return EXIT_OK


def cmd_validate(args, cfg) -> int:
    results = run_validation(cfg, quick=args.quick)
    for r in results:
        print(r.format_line())
    ok = all(r.passed for r in results)
    print(f"SUMMARY {'PASS' if ok else 'FAIL'} {sum(r.passed for r in results)}/{len(results)}")
    return EXIT_OK if ok else EXIT_VALIDATION


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "solve":
            return cmd_solve(args, cfg)
        if args.command == "sweep-n":
            return cmd_sweep(args, cfg, "N")
        if args.command == "sweep-rate":
            return cmd_sweep(args, cfg, "gamma1")
        if args.command == "placement-demo":
            return cmd_demo(args, cfg)
        return cmd_validate(args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PassError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
