"""Experiment orchestration: seeded runs, sweeps, persistence.

Each task run produces flat metric records {task, preset, seed, metric,
value, config_hash, version}; ``metrics.json`` is byte-deterministic for a
given config, while wall-clock timing lives in the separate run record.
"""

from __future__ import annotations

import dataclasses
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import csvio, plots
from .config import SCHEMA_VERSION, SWEEP_AXES, ExperimentConfig
from .exceptions import ConfigError, DivergenceError
from .presets import SourceConfig, build_ensemble, default_source, noise_preset
from .readout import accuracy, capacity, closed_loop_forecast, train_readout
from .reservoir import kernel_quality, run_sequence
from .rng import derive_seed, stream
from .tasks import (
    double_scroll_dataset,
    memory_dataset,
    parity_dataset,
    xor_dataset,
)

DOUBLE_SCROLL_CHANNELS = ["v1", "v2", "i"]


@dataclass
class RunRecord:
    """Provenance of one harness invocation."""

    config_hash: str
    schema_version: int = SCHEMA_VERSION
    metrics: list[dict] = field(default_factory=list)
    timing_s: float = 0.0
    artifacts: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True)


@dataclass
class SeedOutcome:
    metrics: dict[str, float]
    target: np.ndarray
    predicted: np.ndarray
    channels: list[str]
    features: np.ndarray | None = None
    observable_labels: list[str] | None = None
    reservoir_count: int = 1


def _resolved_source(config: ExperimentConfig) -> SourceConfig:
    return default_source(**config.source)


def _build_task_ensemble(config: ExperimentConfig, source: SourceConfig, seed: int):
    noise = noise_preset(config.noise, seed=derive_seed(seed, "noise"))
    normalization = "raw" if config.task == "kernel" else "minmax"
    return build_ensemble(
        config.preset,
        source=source,
        reservoirs=config.reservoirs,
        segments=config.segments,
        modes=config.modes,
        backend=config.backend,
        noise=noise,
        seed=seed,
        normalization=normalization,
    )


def _train_eval_split(config, dataset, features, targets, seed):
    """Post-washout train/test arrays, optionally reshuffled before the split."""
    train = config.sizes.train
    if config.shuffle_split:
        order = stream(seed, "split").permutation(len(features))
        features, targets = features[order], targets[order]
    return features[:train], targets[:train], features[train:], targets[train:]


def _run_binary_task(config: ExperimentConfig, source, seed: int) -> SeedOutcome:
    sizes = config.sizes
    tau = 1 if config.task == "xor" else config.tau
    length = sizes.washout + sizes.train + sizes.test
    if config.task == "xor":
        dataset = xor_dataset(length, seed)
    else:
        dataset = parity_dataset(length, tau, seed)
    washout = max(dataset.washout, sizes.washout)
    ensemble = _build_task_ensemble(config, source, seed)
    features = run_sequence(dataset.inputs, ensemble, washout)
    targets = dataset.targets[washout:]
    x_tr, y_tr, x_te, y_te = _train_eval_split(config, dataset, features, targets, seed)
    readout = train_readout(x_tr, y_tr, config.regularization)
    predicted = readout.predict(x_te)
    return SeedOutcome(
        metrics={"accuracy": accuracy(predicted, y_te)},
        target=y_te,
        predicted=(predicted > 0.5).astype(int),
        channels=["bit"],
        features=features,
        observable_labels=ensemble.selection.labels(),
        reservoir_count=ensemble.size,
    )


def _run_memory_task(config: ExperimentConfig, source, seed: int) -> SeedOutcome:
    sizes = config.sizes
    length = sizes.washout + sizes.train + sizes.test
    dataset = memory_dataset(length, config.tau, seed)
    washout = max(dataset.washout, sizes.washout)
    ensemble = _build_task_ensemble(config, source, seed)
    features = run_sequence(dataset.inputs, ensemble, washout)
    targets = dataset.targets[washout:]
    x_tr, y_tr, x_te, y_te = _train_eval_split(config, dataset, features, targets, seed)
    readout = train_readout(x_tr, y_tr, config.regularization)
    predicted = readout.predict(x_te)
    return SeedOutcome(
        metrics={"capacity": capacity(predicted, y_te)},
        target=y_te,
        predicted=predicted,
        channels=["value"],
        features=features,
        observable_labels=ensemble.selection.labels(),
        reservoir_count=ensemble.size,
    )


def _run_double_scroll_task(
    config: ExperimentConfig, source, seed: int, train_rows: int | None = None
) -> SeedOutcome:
    """Closed-loop forecast; the test window stays anchored at sizes.train.

    ``train_rows`` (<= sizes.train) trains the readout on the most recent
    rows only, so sweeps over training size compare on the same test data.
    """
    sizes = config.sizes
    dataset = double_scroll_dataset(sizes.train, sizes.test, sizes.washout)
    ensemble = _build_task_ensemble(config, source, seed)
    features = run_sequence(dataset.inputs[: dataset.split], ensemble, dataset.washout)
    rows = min(train_rows or sizes.train, sizes.train)
    readout = train_readout(
        features[-rows:],
        dataset.targets[dataset.split - rows : dataset.split],
        config.regularization,
    )
    try:
        predicted = closed_loop_forecast(
            ensemble, readout, [], sizes.test, initial_features=features[-1]
        )
    except DivergenceError as exc:
        raise DivergenceError(f"{exc} (seed {seed})") from exc
    truth = dataset.inputs[dataset.split : dataset.split + sizes.test]
    metrics = {
        f"capacity_{name}": capacity(predicted[:, c], truth[:, c])
        for c, name in enumerate(DOUBLE_SCROLL_CHANNELS)
    }
    return SeedOutcome(
        metrics=metrics,
        target=truth,
        predicted=predicted,
        channels=DOUBLE_SCROLL_CHANNELS,
        features=features,
        observable_labels=ensemble.selection.labels(),
        reservoir_count=ensemble.size,
    )


def _run_kernel_task(config: ExperimentConfig, source, seed: int) -> SeedOutcome:
    if config.noise != "off":
        raise ConfigError("kernel-quality runs require the 'off' noise preset")
    n = config.modes
    d = n * (2 * n + 1)
    ensemble = _build_task_ensemble(config, source, seed)
    inputs = stream(seed, "kernel-inputs").uniform(-1.0, 1.0, size=config.sizes.washout + d)
    features = run_sequence(inputs, ensemble, config.sizes.washout)
    rank = kernel_quality(features)
    return SeedOutcome(
        metrics={"kernel_quality": float(rank)},
        target=np.zeros(0),
        predicted=np.zeros(0),
        channels=[],
        features=features,
        observable_labels=ensemble.selection.labels(),
        reservoir_count=ensemble.size,
    )


def run_seed(
    config: ExperimentConfig, source, seed: int, train_rows: int | None = None
) -> SeedOutcome:
    if config.task in ("xor", "parity"):
        return _run_binary_task(config, source, seed)
    if config.task == "memory":
        return _run_memory_task(config, source, seed)
    if config.task == "double-scroll":
        return _run_double_scroll_task(config, source, seed, train_rows)
    if config.task == "kernel":
        return _run_kernel_task(config, source, seed)
    raise ConfigError(f"unknown task {config.task!r}")


def run_task(config: ExperimentConfig, quiet: bool = False) -> RunRecord:
    """Run all seeds of a task, write metrics/predictions/figures."""
    started = time.perf_counter()
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    source = _resolved_source(config)
    record = RunRecord(config_hash=config.hash())

    per_metric: dict[str, list[float]] = {}
    for index, seed in enumerate(config.seeds):
        outcome = run_seed(config, source, seed)
        for metric, value in outcome.metrics.items():
            record.metrics.append(_metric_record(config, seed, metric, value))
            per_metric.setdefault(metric, []).append(value)
        if index == 0 and outcome.features is not None:
            trace = out / f"observables_seed{seed}.csv"
            csvio.write_observable_trace(
                outcome.features,
                outcome.observable_labels,
                outcome.reservoir_count,
                trace,
            )
            record.artifacts.append(str(trace))
        if outcome.channels:
            pred_csv = out / f"predictions_seed{seed}.csv"
            target_csv = out / f"targets_seed{seed}.csv"
            csvio.write_series(outcome.predicted, outcome.channels, pred_csv)
            csvio.write_series(outcome.target, outcome.channels, target_csv)
            figure = out / f"predictions_seed{seed}.png"
            plots.save_prediction_figure(
                outcome.target, outcome.predicted, figure, outcome.channels
            )
            record.artifacts += [str(pred_csv), str(target_csv), str(figure)]

    metrics_path = out / "metrics.json"
    _write_metrics(record.metrics, metrics_path)
    record.artifacts.append(str(metrics_path))
    record.timing_s = time.perf_counter() - started
    (out / "run_record.json").write_text(record.to_json())
    if not quiet:
        print(f"task={config.task} preset={config.preset} noise={config.noise} "
              f"seeds={len(config.seeds)}")
        for metric, values in per_metric.items():
            print(f"  {metric}: {np.mean(values):.4f} +- {np.std(values):.4f}")
    return record


def _sweep_config(config: ExperimentConfig, axis: str, value) -> ExperimentConfig:
    if axis == "train_size":
        if config.task == "double-scroll":
            return config  # anchored: the readout window shrinks instead
        return config.replace(sizes=dataclasses.replace(config.sizes, train=int(value)))
    if axis == "tau":
        return config.replace(tau=int(value))
    if axis == "R":
        sub = config.replace(reservoirs=int(value))
        if config.preset.startswith("memory"):
            sub = sub.replace(preset=f"memory_r{int(value)}")
        return sub
    if axis == "n":
        sub = config.replace(modes=int(value))
        if config.sweep.get("match_segments"):
            sub = sub.replace(segments=int(value))
            if int(value) > 1:
                sub = sub.replace(backend="pipeline")
        return sub
    if axis == "N":
        sub = config.replace(segments=int(value))
        if int(value) > 1:
            sub = sub.replace(backend="pipeline")
        return sub
    if axis == "noise":
        return config.replace(noise=str(value))
    raise ConfigError(f"unknown sweep axis {axis!r} (expected one of {SWEEP_AXES})")


def run_sweep(config: ExperimentConfig, quiet: bool = False) -> list[dict]:
    """Grid of runs along one axis; emits a long-format CSV and a figure."""
    axis = config.sweep.get("axis")
    values = config.sweep.get("values")
    if axis not in SWEEP_AXES:
        raise ConfigError(f"sweep.axis must be one of {SWEEP_AXES}, got {axis!r}")
    if not values:
        raise ConfigError("sweep.values must be a non-empty list")
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)

    rows: list[dict] = []
    for value in values:
        sub = _sweep_config(config, axis, value)
        source = _resolved_source(sub)
        train_rows = (
            int(value)
            if axis == "train_size" and config.task == "double-scroll"
            else None
        )
        for seed in sub.seeds:
            outcome = run_seed(sub, source, seed, train_rows=train_rows)
            for metric, result in outcome.metrics.items():
                rows.append(
                    {"axis": axis, "value": value, "seed": seed,
                     "metric": metric, "result": result}
                )
        if not quiet:
            latest = [r for r in rows if r["value"] == value]
            summary = ", ".join(
                f"{m}={np.mean([r['result'] for r in latest if r['metric'] == m]):.4f}"
                for m in sorted({r["metric"] for r in latest})
            )
            print(f"  {axis}={value}: {summary}")

    table = out / "sweep.csv"
    csvio.write_sweep(rows, table)
    plots.save_sweep_figure(rows, out / "sweep.png")
    return rows


def run_jsa_dump(config_raw: dict, out: Path, quiet: bool = False) -> list[str]:
    """Build the JSA/Schmidt artifacts for the configured source."""
    from .crystal import load_crystal, optimal_poling_period
    from .jsa import build_jsa, default_grids
    from .pump import PumpSpec
    from .schmidt import schmidt_decompose

    out.mkdir(parents=True, exist_ok=True)
    source_cfg = dict(config_raw.get("source", {}))
    crystal_path = config_raw.get("crystal_file")
    if crystal_path:
        crystal = load_crystal(crystal_path)
        try:
            pump = PumpSpec(
                center=float(source_cfg["pump_center_m"]),
                sigma=float(source_cfg["pump_sigma_m"]),
            )
        except KeyError as exc:
            raise ConfigError(f"missing source key {exc} for explicit crystal file")
        if crystal.poling_period is None:
            try:
                crystal = crystal.with_poling_period(
                    optimal_poling_period(2 * pump.center, 2 * pump.center, crystal)
                )
            except ValueError:
                pass  # already phase matched (e.g. dispersionless toy crystal)
        samples = int(source_cfg.get("grid_samples", 256))
        n_kept = int(source_cfg.get("n_kept", 12))
        r_scale = float(source_cfg.get("squeezing_db", 0.45)) * np.log(10.0) / 20.0
    else:
        source = default_source(**source_cfg)
        pump, crystal = source.pump, source.crystal
        samples, n_kept, r_scale = source.grid_samples, source.n_kept, source.r_scale

    grids = default_grids(pump, crystal, samples=samples)
    jsa = build_jsa(pump, crystal, *grids)
    schmidt = schmidt_decompose(jsa, n_kept, r_scale)

    artifacts = []
    for name, writer, obj in (
        ("jsa_magnitude.csv", csvio.write_jsa_magnitude, jsa),
        ("schmidt_spectrum.csv", csvio.write_schmidt_spectrum, schmidt),
        ("mode_profiles.csv", csvio.write_mode_profiles, schmidt),
    ):
        writer(obj, out / name)
        artifacts.append(str(out / name))
    plots.save_jsa_figure(jsa, out / "jsa_magnitude.png")
    plots.save_schmidt_figure(schmidt, out / "schmidt_spectrum.png")
    plots.save_mode_figure(schmidt, out / "mode_profiles.png")
    artifacts += [str(out / n) for n in
                  ("jsa_magnitude.png", "schmidt_spectrum.png", "mode_profiles.png")]
    if not quiet:
        print(f"modes above 1%: {schmidt.mode_count(0.01)}")
        print(f"leading squeezing parameter: {schmidt.r[0]:.4f}")
    return artifacts


def _metric_record(config: ExperimentConfig, seed: int, metric: str, value: float) -> dict:
    return {
        "task": config.task,
        "preset": config.preset,
        "seed": seed,
        "metric": metric,
        "value": float(value),
        "config_hash": config.hash(),
        "version": SCHEMA_VERSION,
    }


def _write_metrics(records: list[dict], path: Path) -> None:
    ordered = sorted(records, key=lambda r: (r["seed"], r["metric"]))
    path.write_text(json.dumps(ordered, indent=2, sort_keys=True) + "\n")
