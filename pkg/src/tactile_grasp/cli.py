"""``grasp`` command line: run batches, plot traces, replay slip detection."""

from __future__ import annotations

import argparse
import csv
import dataclasses
import logging
import sys

from .harness import (FingerDropSpec, InputError, OutputError, load_config, load_dataset,
                      read_trace, run_batch)
from .kinematics import DIGITS
from .slip import detect_stream

EXIT_OK, EXIT_INPUT, EXIT_OUTPUT = 0, 2, 3

log = logging.getLogger("tactile_grasp")


def _cmd_run(args) -> int:
    dataset = load_dataset(args.dataset)
    config = load_config(args.config)
    if args.disable_slip_comp:
        config = dataclasses.replace(
            config, controller=dataclasses.replace(config.controller, slip_compensation=False))
    drops = [FingerDropSpec.parse(s) for s in args.drop_fingers]
    if args.trials < 1:
        raise InputError("--trials must be >= 1")
    if args.parallel < 1:
        raise InputError("--parallel must be >= 1")
    report = run_batch(dataset, config, args.trials, args.seed, args.out, args.parallel, drops)
    print(report.table(), end="")
    log.info("wrote %s/report.json, %s/report.md and %d traces", args.out, args.out,
             report.total_trials)
    return EXIT_OK


def _cmd_plot(args) -> int:
    from .plotting import plot_summary

    out = plot_summary(args.trace, args.out)
    log.info("wrote %s", out)
    return EXIT_OK


def _cmd_replay(args) -> int:
    header, body = read_trace(args.trace)
    config = load_config(args.config)
    idx = {h: i for i, h in enumerate(header)}
    rows = body
    if not args.all_rows:
        rows = [r for r in body if r[idx["phase"]] == "LiftAndHold"]
        if not rows:
            raise InputError(f"trace {args.trace} has no LiftAndHold rows (use --all-rows)")
    try:
        t = [float(r[idx["t_s"]]) for r in rows]
        per_digit = {d: [float(r[idx[f"{d.value}_s_biotac"]]) for r in rows] for d in DIGITS}
    except ValueError as exc:
        raise InputError(f"trace {args.trace}: non-numeric value ({exc})") from exc
    if len(t) < 2:
        raise InputError("need at least two rows to estimate slopes")
    period = t[1] - t[0]
    if not period > 0:
        raise InputError("trace timestamps are not increasing")

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["t_s", "digit", "slope", "delta_slope", "severity", "slipping"])
    flagged = 0
    for d, s in per_digit.items():
        for e in detect_stream(t, s, config.controller.slip, period):
            w.writerow([f"{e.t:.4f}", d.value, f"{e.slope:.9g}", f"{e.delta_slope:.9g}",
                        f"{e.severity:.9g}", int(e.slipping)])
            flagged += e.slipping
    log.info("%d slipping windows across %d digits", flagged, len(DIGITS))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="grasp", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a seeded batch of grasp trials")
    r.add_argument("--dataset", help="object dataset YAML (default: bundled 10-object set)")
    r.add_argument("--config", help="config YAML overriding defaults")
    r.add_argument("--trials", type=int, default=20, help="trials per object")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out", required=True, help="output directory")
    r.add_argument("--parallel", type=int, default=1, metavar="K")
    r.add_argument("--disable-slip-comp", action="store_true")
    r.add_argument("--drop-fingers", action="append", default=[], metavar="LIST@T",
                   help="disable digits at trial time T (s), e.g. RF,LF@5.0; repeatable")
    r.set_defaults(func=_cmd_run)

    pl = sub.add_parser("plot", help="render a trace to a three-panel vector figure")
    pl.add_argument("--trace", required=True)
    pl.add_argument("--out", required=True)
    pl.set_defaults(func=_cmd_plot)

    rs = sub.add_parser("replay-slip", help="offline slip detection on a recorded trace")
    rs.add_argument("--trace", required=True)
    rs.add_argument("--config", help="config YAML (slip section used)")
    rs.add_argument("--all-rows", action="store_true",
                    help="analyse every row, not only the lift-and-hold phase")
    rs.set_defaults(func=_cmd_replay)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    logging.getLogger("tactile_grasp.controller").setLevel(logging.INFO)
    try:
        return args.func(args)
    except InputError as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    except OutputError as exc:
        log.error("%s", exc)
        return EXIT_OUTPUT


if __name__ == "__main__":
    raise SystemExit(main())
