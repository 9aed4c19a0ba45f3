"""Command-line entry point: ``su2lgt {spectrum,evolve,calibrate,verify}``.

Exit codes: 0 success, 2 usage, 3 configuration, 4 numerical failure,
5 acceptance failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .config import ConfigError, load_config

EXIT_OK = 0
EXIT_CONFIG = 3
EXIT_NUMERIC = 4
EXIT_ACCEPTANCE = 5


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="su2lgt", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("spectrum", "exact diagonalization report"),
        ("evolve", "noiseless, noisy and mitigated Trotter evolution"),
        ("calibrate", "sample the readout calibration matrix"),
        ("verify", "run the acceptance criteria"),
    ):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", type=Path, default=None, help="YAML experiment config")
        sp.add_argument("--out", type=Path, default=None, help="output directory")
        sp.add_argument("--seed", type=int, default=None, help="override the config seed")
        sp.add_argument("--format", choices=("csv", "tsv"), default=None, help="delimited output format")
        if name == "evolve":
            sp.add_argument("--workers", type=int, default=None, help="process pool size")
        if name == "verify":
            sp.add_argument("--only", type=int, nargs="+", default=None, help="criterion numbers to run")
    return p


def _resolve(args):
    cfg = load_config(args.config)
    changes = {}
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("--seed must be non-negative")
        changes["seed"] = args.seed
    if args.format is not None:
        changes["output_format"] = args.format
    if getattr(args, "workers", None) is not None:
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        changes["workers"] = args.workers
    if changes:
        cfg = dataclasses.replace(cfg, **changes)
    out = args.out if args.out is not None else Path(cfg.output_directory)
    return cfg, out


def _cmd_spectrum(cfg, out) -> int:
    from .experiments import run_spectrum

    report = run_spectrum(cfg, out)
    for line in report.lines():
        print(line)
    for g2, density, gap in report.sweep:
        print(f"g2={g2:g} energy_density={density:.6f} gap={gap:.6f}")
    return EXIT_OK if report.passed else EXIT_ACCEPTANCE


def _cmd_evolve(cfg, out) -> int:
    from .experiments import run_evolution

    result = run_evolution(cfg, out)
    for n, raw, mit, ratio in result["summary"]:
        print(f"n_trot={n} mean|raw-noiseless|={raw:.5f} mean|mitigated-noiseless|={mit:.5f} ratio={ratio:.3f}")
    for err in result["errors"]:
        print(f"error: {err}", file=sys.stderr)
    print(f"wrote {len(result['files'])} files to {out}")
    return EXIT_NUMERIC if result["errors"] else EXIT_OK


def _cmd_calibrate(cfg, out) -> int:
    from .experiments import run_calibration

    cal, dev = run_calibration(cfg, out)
    print(f"calibration matrix {cal.dimension}x{cal.dimension}, {cal.shots_per_state} shots per state")
    print(f"max deviation from model confusion {dev:.5f}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    from .acceptance import format_result, run_all

    results = run_all(args.only)
    for res in results:
        print(format_result(res), flush=True)
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return EXIT_ACCEPTANCE if failed else EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "verify":
            return _cmd_verify(args)
        cfg, out = _resolve(args)
        handler = {"spectrum": _cmd_spectrum, "evolve": _cmd_evolve, "calibrate": _cmd_calibrate}[args.command]
        return handler(cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
