"""Command-line front end: ``hdbs <subcommand> [--config FILE] [flags]``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from typing import Optional, Sequence

from . import experiments as ex
from .calibration import CalibrationError
from .config import ConfigError, parse_config

SUBCOMMANDS = ("region", "sumrate", "outage", "fairness", "calibrate")

log = logging.getLogger("hdbs")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hdbs", description="Half-duplex base-station scheduling "
                                "experiments (rate region, sum rate, outage, fairness).")
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--config", help="INI config file; defaults are used when omitted")
    p.add_argument("--output-dir", help="output directory (overrides HDBS_OUTPUT_DIR)")
    p.add_argument("--mu-points", type=int, help="cosine-spaced mu grid size for region")
    p.add_argument("--snr", help="SNR grid in dB as start:stop:step")
    p.add_argument("--r0", type=float, help="single rate of the outage study")
    p.add_argument("--threads", type=int, help="worker processes (0 = all cores)")
    p.add_argument("--seed", type=int, help="base seed")
    p.add_argument("--slots", type=int, help="calibration and evaluation trace length")
    p.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                   help="override any config key; repeatable")
    p.add_argument("--strict", action="store_true",
                   help="exit nonzero when any point fails")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def overrides_from_args(args: argparse.Namespace) -> dict:
    """Flag values as ``section.key`` overrides; explicit flags beat ``--set``."""
    out = {}
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects SECTION.KEY=VALUE, got {item!r}")
        out[key.strip()] = value.strip()
    if args.output_dir is not None:
        out["run.output_dir"] = args.output_dir
    if args.mu_points is not None:
        out["region.mu_points"] = str(args.mu_points)
        out["region.mu_grid"] = ""
    if args.snr is not None:
        out["snr.snr_grid"] = args.snr
    if args.r0 is not None:
        out["outage.r0"] = repr(args.r0)
    if args.threads is not None:
        out["run.threads"] = str(args.threads)
    if args.seed is not None:
        out["run.seed"] = str(args.seed)
    if args.slots is not None:
        out["slots.calibration"] = out["slots.evaluation"] = str(args.slots)
    return out


def run(config_path: Optional[str], subcommand: str, overrides: Optional[dict] = None,
        strict: bool = False, out=None) -> int:
    """Execute one experiment; returns the process exit status."""
    out = sys.stdout if out is None else out
    t0 = time.perf_counter()
    try:
        cfg = parse_config(config_path, overrides)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if subcommand not in SUBCOMMANDS:
        print(f"error: unknown subcommand {subcommand!r}", file=sys.stderr)
        return 2
    outdir = ex.ensure_dir(cfg.output_dir)
    with open(os.path.join(outdir, "config.ini"), "w", encoding="utf-8", newline="") as fh:
        fh.write(cfg.to_ini())

    failed = 0
    lines = []
    try:
        if subcommand == "region":
            pts = ex.sweep_region(cfg)
            ex.write_region(os.path.join(outdir, "region.csv"), pts)
            failed = sum(not p.ok for p in pts)
            pb1, pbB = cfg.budgets()
            err = [abs(p.p1_consumed / pb1 - 1) for p in pts
                   if p.ok and 0 < p.mu and not p.scheme.startswith("fdd")]
            err += [abs(p.pB_consumed / pbB - 1) for p in pts
                    if p.ok and p.mu < 1 and not p.scheme.startswith("fdd")]
            lines.append(f"region: {len(pts)} points ({failed} failed), largest "
                         f"out-of-sample budget error {max(err, default=0.0):.3%}")
        elif subcommand == "sumrate":
            pts = ex.sweep_sum_rate(cfg)
            ex.write_sum_rate(os.path.join(outdir, "sumrate.csv"), pts)
            failed = sum(not p.ok for p in pts)
            lines.append(f"sumrate: {len(pts)} points ({failed} failed)")
        elif subcommand == "outage":
            res = ex.sweep_outage(cfg)
            ex.write_outage(os.path.join(outdir, "outage.csv"), res)
            low = [r for r in res if r.low_confidence]
            failed = len(low)
            lines.append(f"outage: {len(res)} points, {len(low)} below "
                         f"{cfg.min_events} events")
            for scheme in ("discrete", "fdd"):
                try:
                    d = ex.fit_diversity_order(res, (15.0, 30.0), scheme)
                    lines.append(f"  diversity [{scheme}] uplink {d['1']:.3f} "
                                 f"downlink {d['B']:.3f} (15-30 dB)")
                except ValueError as exc:
                    lines.append(f"  diversity [{scheme}] not fitted: {exc}")
        elif subcommand == "fairness":
            result = ex.run_fairness(cfg)
            ex.write_fairness(os.path.join(outdir, "fairness.csv"), result)
            s = result.state
            lines.append(f"fairness ({cfg.fairness_mode}, target {cfg.fairness_target:g}): "
                         f"{s.slot} slots, mu {s.mu:.4f}, r1avg {s.r1avg:.4f}, "
                         f"rBavg {s.rBavg:.4f}")
        else:
            cals = ex.calibrate_schemes(cfg)
            with open(os.path.join(outdir, "calibration.json"), "w", encoding="utf-8",
                      newline="") as fh:
                json.dump([c.to_record() for c in cals], fh, indent=2, sort_keys=True)
                fh.write("\n")
            for c in cals:
                r = c.residuals
                lines.append(f"calibrate [{c.scheme}] mu={c.mu:g}: zeta=({c.zeta1:.6g}, "
                             f"{c.zetaB:.6g}) p=({c.p1:.6g}, {c.pB:.6g}) power residuals "
                             f"({r['power1']:+.2e}, {r['powerB']:+.2e})")
    except (CalibrationError, ValueError, OSError) as exc:
        print(f"error: {subcommand} failed: {exc}", file=sys.stderr)
        return 1
    lines.append(f"output: {outdir}  wall time {time.perf_counter() - t0:.1f} s")
    print("\n".join(lines), file=out)
    if strict and failed:
        print(f"error: {failed} point(s) failed (--strict)", file=sys.stderr)
        return 1
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        overrides = overrides_from_args(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(args.config, args.subcommand, overrides, strict=args.strict)


if __name__ == "__main__":
    sys.exit(main())
