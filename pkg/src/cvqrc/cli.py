"""Command-line front end.

Subcommands: ``jsa``, ``run-task``, ``sweep``, ``fit-noise``.
Exit codes: 0 success, 2 configuration error, 3 runtime divergence.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import csvio, plots
from .config import load_config
from .exceptions import ConfigError, DivergenceError
from .presets import default_source, make_covariance_model
from .reservoir import Normalizer, ObservableSelection, fit_noise
from .runner import run_jsa_dump, run_sweep, run_task


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="JSON configuration file")
    parser.add_argument("--seed", type=int, action="append", default=None,
                        help="seed override (repeatable)")
    parser.add_argument("--seeds", default=None,
                        help="comma-separated seed list override")
    parser.add_argument("--out", default=None, help="output directory override")
    parser.add_argument("--backend", default=None,
                        choices=("analytic", "pipeline"), help="backend override")
    parser.add_argument("--quiet", action="store_true", help="suppress summaries")


def _seed_override(args) -> tuple[int, ...] | None:
    seeds: list[int] = []
    if args.seeds:
        try:
            seeds += [int(s) for s in args.seeds.split(",") if s.strip()]
        except ValueError as exc:
            raise ConfigError(f"malformed --seeds list: {exc}") from exc
    if args.seed:
        seeds += args.seed
    return tuple(seeds) or None


def _load_task_config(args):
    config = load_config(args.config, out_override=args.out)
    seeds = _seed_override(args)
    if seeds:
        config = config.replace(seeds=seeds)
    if args.backend:
        config = config.replace(backend=args.backend)
    return config


def _cmd_run_task(args) -> int:
    run_task(_load_task_config(args), quiet=args.quiet)
    return 0


def _cmd_sweep(args) -> int:
    config = _load_task_config(args)
    if args.axis or args.values:
        sweep = dict(config.sweep)
        if args.axis:
            sweep["axis"] = args.axis
        if args.values:
            sweep["values"] = [_parse_value(v) for v in args.values.split(",") if v]
        config = config.replace(sweep=sweep)
    run_sweep(config, quiet=args.quiet)
    return 0


def _cmd_jsa(args) -> int:
    path = Path(args.config)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    out = Path(args.out or raw.get("out", "results/jsa"))
    run_jsa_dump(raw, out, quiet=args.quiet)
    return 0


def _cmd_fit_noise(args) -> int:
    source_overrides = {}
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            source_overrides = json.loads(path.read_text()).get("source", {})
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc

    source = default_source(**source_overrides)
    selection = ObservableSelection.single_mode("minmax")
    model = make_covariance_model(source, 1, 1, "analytic")
    normalizer = Normalizer.exact_phase_extremes(model, selection)

    def predicted(phase: float) -> np.ndarray:
        return normalizer(selection.extract(model.covariance([phase])))

    all_phases, all_values = [], []
    labels = selection.labels()
    for trace in args.traces:
        phases, values, trace_labels = csvio.read_phase_scan(trace)
        if trace_labels != labels:
            raise ConfigError(
                f"{trace}: observable labels {trace_labels} do not match the "
                f"single-mode set {labels}"
            )
        all_phases.append(phases)
        all_values.append(values)
    phases = np.concatenate(all_phases)
    values = np.vstack(all_values)
    noise = fit_noise(phases, values, predicted)

    out = Path(args.out or "noise_fit.json")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(
        {
            "labels": labels,
            "std": [float(s) for s in np.atleast_1d(noise.std)],
            "std_mean": float(np.mean(noise.std)),
        },
        indent=2, sort_keys=True,
    ) + "\n")
    model_values = np.array([predicted(p) for p in phases])
    plots.save_phase_scan_figure(
        phases, values, model_values, labels, out.with_suffix(".png")
    )
    if not args.quiet:
        for label, std in zip(labels, np.atleast_1d(noise.std)):
            print(f"  {label}: std = {std:.6f}")
    return 0


def _parse_value(text: str):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvqrc",
        description="Digital twin of a feedback quantum reservoir computer "
        "on multimode squeezed light",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_jsa = sub.add_parser("jsa", help="dump JSA, Schmidt spectrum and mode profiles")
    _add_common(p_jsa)
    p_jsa.set_defaults(func=_cmd_jsa)

    p_run = sub.add_parser("run-task", help="run a benchmark task over seeds")
    _add_common(p_run)
    p_run.set_defaults(func=_cmd_run_task)

    p_sweep = sub.add_parser("sweep", help="run a parameter sweep")
    _add_common(p_sweep)
    p_sweep.add_argument("--axis", default=None,
                         help="sweep axis (train_size, tau, R, n, N, noise)")
    p_sweep.add_argument("--values", default=None, help="comma-separated axis values")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_fit = sub.add_parser("fit-noise", help="fit a noise model from scan traces")
    p_fit.add_argument("traces", nargs="+", help="phase-scan CSV files")
    p_fit.add_argument("--config", default=None, help="source override JSON")
    p_fit.add_argument("--out", default=None, help="output noise preset file")
    p_fit.add_argument("--quiet", action="store_true")
    p_fit.set_defaults(func=_cmd_fit_noise)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
