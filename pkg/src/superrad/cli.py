"""Command-line entry point: ``superrad <experiment> [--config file.json] [flags]``."""

from __future__ import annotations

import argparse
import datetime as _dt
import logging
import platform
import sys
import time
from pathlib import Path

import numpy as np
import scipy

from superrad import __version__
from superrad.config import KINDS, ConfigError, ExperimentConfig, parse_config
from superrad.errors import NumericError, SuperradError
from superrad.experiments import RUNNERS, emit_plot_data
from superrad.io import write_json

__all__ = ["run", "main", "build_parser", "config_from_args", "emit_plot_data"]

log = logging.getLogger("superrad")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

DESCRIPTION = """\
Zero-photon amplitude dynamics of L collectively decaying two-level atoms.

Basis convention: basis index q has bit j set when atom j is excited and
clear when it is in the ground level (atom 0 is the least significant bit).
Units: every time (t_end, fit window, dt) is in units of 1/gamma and every
reported rate is in units of gamma.
"""

# flag name -> (config field, argparse kwargs)
_FLAGS = {
    "--L": ("L", dict(type=int, help="atom count")),
    "--L-list": ("L_list", dict(type=lambda s: [int(x) for x in s.split(",")],
                                help="comma-separated atom counts, e.g. 2,4,6")),
    "--twice-m": ("twice_m", dict(type=int, help="2*M = n_excited - n_ground")),
    "--gamma": ("gamma", dict(type=float, help="single-atom decay rate")),
    "--delta-omega": ("delta_omega", dict(type=float, help="Lamb shift")),
    "--omega-a": ("omega_a", dict(type=float, help="transition angular frequency")),
    "--initial": ("initial", dict(help="symmetric | uniform | dfs | basis | random | file")),
    "--basis-index": ("basis_index", dict(type=int)),
    "--amplitude-file": ("amplitude_file", dict(help=".npy or CSV with re,im columns")),
    "--qubit": ("qubit", dict(type=int, help="qubit index for channel analysis")),
    "--t-end": ("t_end", dict(type=float, help="final time in units of 1/gamma")),
    "--steps": ("steps", dict(type=int, help="RK4 steps")),
    "--fit-window": ("fit_window", dict(type=lambda s: [float(x) for x in s.split(",")],
                                        help="lo,hi in units of 1/gamma")),
    "--metric": ("metric", dict(help="M1 | M2 | M3 | all")),
    "--delta": ("delta", dict(type=float, help="perturbation amplitude")),
    "--target": ("target", dict(type=lambda s: int(s) if s.isdigit() else s,
                                help="support | excitation | basis index")),
    "--gate-count": ("gate_count", dict(type=float, help="total gate count R(L)")),
    "--dt": ("dt", dict(type=float, help="gate time in units of 1/gamma")),
    "--d": ("d", dict(type=float, help="qubit spacing")),
    "--lambda-a": ("lambda_a", dict(type=float, help="wavelength, same unit as --d")),
    "--lambda-over-d": ("lambda_over_d", dict(type=float)),
    "--threshold": ("threshold", dict(type=float, help="feasibility threshold for '<< 1'")),
    "--top-k": ("top_k", dict(type=int, help="keep only k probability columns")),
    "--out": ("out_dir", dict(help="output directory")),
    "--seed": ("seed", dict(type=int)),
    "--workers": ("workers", dict(type=int)),
    "--L-max": ("L_max", dict(type=int)),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="superrad", description=DESCRIPTION,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"superrad {__version__}")
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        p = sub.add_parser(kind, description=DESCRIPTION,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--config", help="JSON config; flags override its values")
        for flag, (dest, kw) in _FLAGS.items():
            p.add_argument(flag, dest=dest, default=None, **kw)
        p.add_argument("--raw", dest="normalize", action="store_false", default=None,
                       help="fit raw zero-photon entries instead of trace-normalised ones")
        p.add_argument("--dump-generator", dest="dump_generator", action="store_true",
                       default=None, help="also write the generator as row,col,multiplicity")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    data = {}
    if args.config:
        data = parse_config(Path(args.config).read_text()).to_dict()
    data["kind"] = args.kind
    for dest, _ in list(_FLAGS.values()) + [("normalize", None), ("dump_generator", None)]:
        value = getattr(args, dest)
        if value is not None:
            data[dest] = value
    return ExperimentConfig.from_dict(data)


def _versions() -> dict:
    return {
        "superrad": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
    }


def run(config: ExperimentConfig) -> int:
    """Validate and execute one experiment; returns the process exit status."""
    started = time.perf_counter()
    try:
        config.validate()
    except ConfigError as exc:
        print(f"superrad: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        outputs = RUNNERS[config.kind](config)
    except ConfigError as exc:
        print(f"superrad: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericError, FloatingPointError) as exc:
        print(f"superrad: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"superrad: I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    except SuperradError as exc:
        print(f"superrad: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if config.kind == "budget" and config.lambda_over_d is not None:
        from superrad.scaling import LARGE_SAMPLE_CAVEAT

        print(f"note: {LARGE_SAMPLE_CAVEAT}", file=sys.stderr)
    manifest = {
        "config": config.to_dict(),
        "config_sha256": config.digest(),
        "versions": _versions(),
        "started_utc": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "wall_time_s": round(time.perf_counter() - started, 6),
        "outputs": sorted(Path(p).name for p in outputs),
    }
    try:
        write_json(Path(config.out_dir) / "manifest.json", manifest)
    except OSError as exc:
        print(f"superrad: I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    for p in outputs:
        print(p)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = config_from_args(args)
    except ConfigError as exc:
        print(f"superrad: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"superrad: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
