"""Command line entry point.

Exit status: 0 on success, 1 for bad configuration or arguments, 2 when a
simulation aborts.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import load_config
from .errors import ConfigInvalid, QuadArmError, Unreachable
from .kinematics import DEFAULT_GEOMETRY, inverse_kinematics
from .logio import read_log_csv, write_log_csv
from .metrics import RmsReport
from .sim import run_scenario

EXIT_CONFIG = 1
EXIT_ABORT = 2


def _on_off(text: str) -> bool:
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected on or off")
    return text == "on"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quadarm",
                                     description="Quadcopter with a 3-link arm: simulate "
                                                 "missions and score tracking error.")
    sub = parser.add_subparsers(dest="command", required=True)

    def overrides(p):
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.add_argument("--controller", choices=("pid", "mrac"))
        p.add_argument("--payload", type=_on_off, metavar="{on,off}")
        p.add_argument("--no-plots", action="store_true", help="skip the PNG figures")

    p = sub.add_parser("run", help="run one scenario, write the CSV log and RMS report")
    p.add_argument("config", type=Path)
    overrides(p)

    p = sub.add_parser("ik", help="joint angles (deg) for a target point and wrist angle")
    p.add_argument("x", type=float)
    p.add_argument("y", type=float)
    p.add_argument("z", type=float)
    p.add_argument("psi", type=float, help="wrist azimuth in rad")
    p.add_argument("--branch", choices=("elbow-down", "elbow-up"), default="elbow-down")

    p = sub.add_parser("sweep", help="run every *.cfg in a directory and tabulate RMS")
    p.add_argument("config_dir", type=Path)
    overrides(p)
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")

    p = sub.add_parser("report", help="recompute the RMS report of a written log")
    p.add_argument("log", type=Path)
    p.add_argument("--no-plots", action="store_true")
    return parser


def _stem(cfg) -> str:
    return f"{cfg.name}_{cfg.controller}_payload-{'on' if cfg.payload.enabled else 'off'}"


def _run_one(cfg, out: Path, plots: bool) -> RmsReport:
    log = run_scenario(cfg)
    stem = out / _stem(cfg)
    write_log_csv(log, stem.with_suffix(".csv"))
    report = RmsReport.from_log(log)
    stem.with_name(stem.name + "_rms.csv").write_text(report.text())
    if plots:
        from .plotting import render_report
        render_report(log, stem)
    return report


def cmd_run(args) -> int:
    cfg = load_config(args.config).with_overrides(args.controller, args.payload)
    args.out.mkdir(parents=True, exist_ok=True)
    report = _run_one(cfg, args.out, not args.no_plots)
    sys.stdout.write(report.text())
    return 0


def cmd_ik(args) -> int:
    try:
        q = inverse_kinematics((args.x, args.y, args.z), args.psi, DEFAULT_GEOMETRY,
                               branch=args.branch)
    except Unreachable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    deg = q.degrees()
    names = ("theta1", "theta2", "theta3", "theta4")
    print(" ".join(f"{n}={d:.6f}" for n, d in zip(names, deg)))
    return 0


def _sweep_job(item):
    cfg, out, plots = item
    return _run_one(cfg, out, plots)


def cmd_sweep(args) -> int:
    paths = sorted(args.config_dir.glob("*.cfg"))
    if not paths:
        print(f"error: no .cfg files in {args.config_dir}", file=sys.stderr)
        return EXIT_CONFIG
    configs = [load_config(p) for p in paths]
    controllers = (args.controller,) if args.controller else ("pid", "mrac")
    payloads = (args.payload,) if args.payload is not None else (True, False)
    jobs = [(c.with_overrides(ctrl, pl), args.out, not args.no_plots)
            for c in configs for ctrl in controllers for pl in payloads]
    args.out.mkdir(parents=True, exist_ok=True)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_sweep_job, jobs))
    else:
        reports = [_sweep_job(j) for j in jobs]
    reports.sort(key=lambda r: (r.name, r.controller, not r.payload))
    lines = [",".join(RmsReport.HEADER)] + [",".join(r.as_row()) for r in reports]
    table = "\n".join(lines) + "\n"
    (args.out / "sweep_rms.csv").write_text(table)
    sys.stdout.write(table)
    return 0


def cmd_report(args) -> int:
    try:
        log = read_log_csv(args.log)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    report = RmsReport.from_log(log)
    sys.stdout.write(report.text())
    if not args.no_plots and len(log):
        from .plotting import render_report
        render_report(log, args.log.with_suffix(""))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"run": cmd_run, "ik": cmd_ik, "sweep": cmd_sweep, "report": cmd_report}
    try:
        return handler[args.command](args)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QuadArmError as exc:
        print(f"simulation aborted: {exc}", file=sys.stderr)
        return EXIT_ABORT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
