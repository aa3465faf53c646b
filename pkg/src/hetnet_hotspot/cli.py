"""Command-line entry point: ``hetnet-hotspot <command> [options]``.

Distances are in km and angles in radians on the command line; dB values
live only in the config file.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import harness
from .config import Config, ConfigError, dump_config, load_config
from .evaluator import Placement, eval_scenario1, eval_scenario2, eval_scenario3
from .simkernel import McSpec
from .traffic import Hotspot


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _sign(text: str) -> int:
    if text in ("+", "+1", "plus"):
        return 1
    if text in ("-", "-1", "minus"):
        return -1
    raise argparse.ArgumentTypeError("error sign must be '+' or '-'")


def _common(p: argparse.ArgumentParser, mc: bool = False):
    p.add_argument("--config", type=Path, help="TOML configuration file")
    p.add_argument("--out", type=Path, help="write output here instead of stdout")
    p.add_argument("--workers", type=int, default=1, help="parallel evaluations (default 1)")
    if mc:
        p.add_argument("--seed", type=int, default=0, help="Monte Carlo base seed")
        p.add_argument("--samples", type=int, default=1_000_000, help="Monte Carlo UEs per point")
        p.add_argument("--rings", type=int, default=30, help="lattice rings in the Monte Carlo kernel")
        p.add_argument("--per-tier-exponents", action="store_true",
                       help="use the distinct macro/small path-loss slopes in the Monte Carlo kernel")


def _position(p: argparse.ArgumentParser):
    p.add_argument("--rh", type=float, help="hotspot radius R_h (km)")
    p.add_argument("--theta-h", type=float, help="hotspot angle (rad)")
    p.add_argument("--rs", type=float, help="small-cell radius R_s (km)")
    p.add_argument("--theta-s", type=float, help="small-cell angle (rad)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hetnet-hotspot",
        description="Mean user throughput and small-cell absorption in a hexagonal HetNet with a traffic hotspot.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a single configuration")
    _common(p)
    _position(p)
    p.add_argument("--scenario", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("sweep", help="sweep one coordinate and write CSV")
    _common(p)
    _position(p)
    p.add_argument("--variable", choices=harness.VARIABLES, required=True)
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--offsets", type=_floats, default=(0.0,),
                   help="comma-separated position errors (km or rad)")
    p.add_argument("--offset-kind", choices=("radial", "angular"), default="radial")
    p.add_argument("--error-sign", type=_sign, default=1)
    p.add_argument("--no-baseline", action="store_true", help="omit the macro-only rows")

    for name, text in (("fig3", "hotspot radius sweep with radial errors 0/60/120 m"),
                       ("fig4", "hotspot angle sweep at R_h = R_s = 0.4 km with angular errors 0, pi/6, pi/3"),
                       ("fig5", "small-cell radius sweep for hotspots at 0.35e^{i pi/6} and 0.52e^{i pi/2}"),
                       ("fig6", "small-cell angle sweep for the same two hotspots")):
        p = sub.add_parser(name, help=text)
        _common(p)
        if name in ("fig3", "fig4"):
            p.add_argument("--error-sign", type=_sign, default=1)

    p = sub.add_parser("validate", help="analytic vs Monte Carlo on a grid; nonzero exit on any violation")
    _common(p, mc=True)
    p.add_argument("--grid-rh", type=_floats, default=harness.DEFAULT_GRID_RH)
    p.add_argument("--errors", type=_floats, default=harness.DEFAULT_GRID_ERRORS,
                   help="radial placement errors (km)")
    p.add_argument("--theta", type=float, default=math.pi / 3, help="theta_h = theta_s (rad)")
    p.add_argument("--error-sign", type=_sign, default=-1,
                   help="R_s = R_h + sign*error; default '-' keeps the grid inside the cell")
    p.add_argument("--no-baseline", action="store_true")

    p = sub.add_parser("dump-config", help="print the effective configuration")
    _common(p)
    return parser


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def run_eval(cfg: Config, args) -> str:
    base = cfg.hotspot
    hs = Hotspot(base.r_h_km if args.rh is None else args.rh,
                 base.theta_h_rad if args.theta_h is None else args.theta_h, base.sigma_km)
    has_sc = args.rs is not None or args.theta_s is not None
    model = cfg.model
    if args.scenario in (1, 2) and has_sc:
        raise ValueError(f"scenario {args.scenario} takes no small-cell position "
                         "(scenario 1 has none, scenario 2 puts it on the hotspot)")
    if args.scenario == 1:
        res = eval_scenario1(hs, model, cfg.linkcurve, cfg.numerics)
        pl = None
    elif args.scenario == 2:
        res = eval_scenario2(hs, model, cfg.linkcurve, cfg.numerics)
        pl = Placement.on_hotspot(hs)
    else:
        if args.rs is None:
            raise ValueError("scenario 3 needs --rs")
        pl = Placement.at(args.rs, hs.theta_h_rad if args.theta_s is None else args.theta_s)
        res = eval_scenario3(hs, pl, model, cfg.linkcurve, cfg.numerics)
    if args.json:
        doc = {"rh_km": hs.r_h_km, "theta_h_rad": hs.theta_h_rad,
               "rs_km": None if pl is None else pl.r_s_km,
               "theta_s_rad": None if pl is None else pl.theta_s_rad, **res.as_dict()}
        return json.dumps(doc, indent=2) + "\n"
    lines = [f"scenario     {res.scenario}",
             f"hotspot      R_h = {hs.r_h_km:.9g} km, theta_h = {hs.theta_h_rad:.9g} rad, sigma = {hs.sigma_km:.9g} km"]
    if pl is not None:
        lines.append(f"small cell   R_s = {pl.r_s_km:.9g} km, theta_s = {pl.theta_s_rad:.9g} rad")
    lines += [f"eta_m        {res.eta_m_mbps:.9g} Mbps",
              f"eta_s        {res.eta_s_mbps:.9g} Mbps",
              f"eta          {res.eta_mbps:.9g} Mbps",
              f"mu           {res.mu:.9g}",
              f"gain         {res.gain:.9g}"]
    return "\n".join(lines) + "\n"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.workers < 1:
        parser.error("--workers must be >= 1")
    try:
        cfg = load_config(args.config)
        cmd = args.command
        if cmd == "dump-config":
            _emit(dump_config(cfg), args.out)
        elif cmd == "eval":
            _emit(run_eval(cfg, args), args.out)
        elif cmd == "sweep":
            spec = harness.SweepSpec(args.variable, args.start, args.stop, args.step,
                                     error_offsets=args.offsets, offset_kind=args.offset_kind,
                                     error_sign=args.error_sign, r_h=args.rh, theta_h=args.theta_h,
                                     r_s=args.rs, theta_s=args.theta_s,
                                     include_baseline=not args.no_baseline)
            _emit(harness.format_csv(harness.run_sweep(spec, cfg, args.workers)), args.out)
        elif cmd in ("fig3", "fig4", "fig5", "fig6"):
            specs = {"fig3": lambda: harness.fig3_specs(cfg, args.error_sign),
                     "fig4": lambda: harness.fig4_specs(cfg, args.error_sign),
                     "fig5": lambda: harness.fig5_specs(cfg),
                     "fig6": lambda: harness.fig6_specs(cfg)}[cmd]()
            _emit(harness.format_csv(harness.run_sweep(specs, cfg, args.workers)), args.out)
        elif cmd == "validate":
            mc = McSpec(n_samples=args.samples, seed=args.seed, ring_count=args.rings,
                        per_tier_exponents=args.per_tier_exponents)
            report = harness.run_validate(cfg, args.grid_rh, args.errors, mc, args.error_sign,
                                          args.theta, not args.no_baseline, args.workers)
            _emit(harness.format_report(report), args.out)
            return 0 if report.passed else 1
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
