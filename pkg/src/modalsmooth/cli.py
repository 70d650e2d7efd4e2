"""Command-line entry point: ``modalsmooth <command> [options]``."""

import argparse
import json
import logging
import os
import sys

from . import config as config_mod
from . import harness, io
from .music import eigenvalues_db, estimate_signal_count, hermitian_eig
from .synthesis import ConditioningError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONDITIONING = 3
EXIT_ACCEPTANCE = 4


def _load_config(args):
    cfg = config_mod.load(args.config) if args.config else config_mod.default_config()
    overrides = {}
    if args.seed is not None:
        overrides["noise"] = {"seed": args.seed}
    analysis = {}
    if getattr(args, "method", None):
        analysis["method"] = args.method
    if getattr(args, "grid_deg", None) is not None:
        analysis["grid_deg"] = args.grid_deg
    if getattr(args, "truncation_order", None) is not None:
        analysis["truncation_order"] = args.truncation_order
    if analysis:
        overrides["analysis"] = analysis
    return cfg.with_overrides(**overrides) if overrides else cfg


def _out_dir(args, cfg):
    out = args.out or cfg.output.directory
    os.makedirs(out, exist_ok=True)
    return out


def cmd_simulate(args, cfg):
    out = _out_dir(args, cfg)
    sim = harness.simulate(cfg)
    files = harness.write_simulation(sim, cfg, out)
    A = harness.plane_wave_matrices(sim, cfg)
    io.write_spectrum_csv(os.path.join(out, "plane_wave_spectrum.csv"), A)
    files["plane_wave_spectrum"] = "plane_wave_spectrum.csv"
    config_mod.save(cfg, os.path.join(out, "config.cfg"))
    print(json.dumps({"reflections": len(sim.truth), "files": files}, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_smooth(args, cfg):
    out = _out_dir(args, cfg)
    sim = harness.simulate(cfg)
    S = harness.smooth(harness.plane_wave_matrices(sim, cfg), cfg)
    eig = hermitian_eig(S)
    files = harness.write_cross_spectrum(S, eig, out)
    doc = {
        "method": cfg.analysis.method,
        "signal_count": estimate_signal_count(eig),
        "eigenvalues_db": [float(v) for v in eigenvalues_db(eig)],
        "files": files,
    }
    print(json.dumps(doc, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_music(args, cfg):
    out = _out_dir(args, cfg)
    summary = harness.run_experiment(cfg, out)
    print(json.dumps(summary, indent=2, sort_keys=True))
    if args.strict and not summary["doa_pass"]:
        return EXIT_ACCEPTANCE
    return EXIT_OK


def cmd_reproduce(args, cfg):
    out = _out_dir(args, cfg)
    report = harness.reproduce_paper(cfg, out)
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK if report["all_match"] else EXIT_ACCEPTANCE


def build_parser():
    parser = argparse.ArgumentParser(prog="modalsmooth", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, analysis=True):
        p.add_argument("--config", help="experiment config file (default: shipped demonstration scene)")
        p.add_argument("--seed", type=int, help="noise seed override")
        p.add_argument("--out", help="output directory (default: [output] directory)")
        if analysis:
            p.add_argument("--method", choices=config_mod.METHODS)
            p.add_argument("--grid-deg", type=float, dest="grid_deg")
            p.add_argument("--truncation-order", type=int, dest="truncation_order")

    p = sub.add_parser("simulate", help="write reflections, RIR excerpt and transfer spectra")
    common(p)
    p.set_defaults(func=cmd_simulate)
    p = sub.add_parser("smooth", help="write the smoothed cross-spectrum and its eigenvalues")
    common(p)
    p.set_defaults(func=cmd_smooth)
    p = sub.add_parser("music", help="run the full pipeline and write the MUSIC spectrum and DOAs")
    common(p)
    p.add_argument("--strict", action="store_true", help="exit 4 when any DOA misses the tolerance")
    p.set_defaults(func=cmd_music)
    p = sub.add_parser("reproduce-paper", help="run the four canonical experiments")
    common(p, analysis=False)
    p.add_argument("--grid-deg", type=float, dest="grid_deg")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = _load_config(args)
    except (config_mod.ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args, cfg)
    except ConditioningError as exc:
        print(f"conditioning error: {exc}", file=sys.stderr)
        return EXIT_CONDITIONING


if __name__ == "__main__":
    sys.exit(main())
