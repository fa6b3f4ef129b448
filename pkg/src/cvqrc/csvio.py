"""CSV writers and loaders for every table the harness emits.

All files are comma-separated UTF-8 with a mandatory header row and '.'
decimal separator; each writer has a loader that round-trips losslessly.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .exceptions import ConfigError
from .jsa import JointSpectralAmplitude
from .schmidt import SchmidtDecomposition


def _open_writer(path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    return path.open("w", newline="", encoding="utf-8")


def write_jsa_magnitude(jsa: JointSpectralAmplitude, path: str | Path) -> None:
    """Magnitude table: header = idler wavelengths, first column = signal."""
    path = Path(path)
    with _open_writer(path) as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["signal_m"] + [repr(float(v)) for v in jsa.idler_grid.samples]
        )
        for lam, row in zip(jsa.signal_grid.samples, np.abs(jsa.values)):
            writer.writerow([repr(float(lam))] + [repr(float(v)) for v in row])


def read_jsa_magnitude(path: str | Path):
    rows = _read_rows(path)
    idler = np.array([float(v) for v in rows[0][1:]])
    signal = np.array([float(r[0]) for r in rows[1:]])
    values = np.array([[float(v) for v in r[1:]] for r in rows[1:]])
    return signal, idler, values


def write_schmidt_spectrum(schmidt: SchmidtDecomposition, path: str | Path) -> None:
    """Mode index, normalized singular value, weight (sums to 1), squeezing r."""
    path = Path(path)
    r = np.zeros_like(schmidt.weights)
    r[: schmidt.n_kept] = schmidt.r
    with _open_writer(path) as fh:
        writer = csv.writer(fh)
        writer.writerow(["mode", "coefficient", "weight", "squeezing_r"])
        for k, w in enumerate(schmidt.weights):
            writer.writerow([k, repr(float(w)), repr(float(w * w)), repr(float(r[k]))])


def read_schmidt_spectrum(path: str | Path):
    rows = _read_rows(path)
    body = rows[1:]
    return {
        "mode": np.array([int(r[0]) for r in body]),
        "coefficient": np.array([float(r[1]) for r in body]),
        "weight": np.array([float(r[2]) for r in body]),
        "squeezing_r": np.array([float(r[3]) for r in body]),
    }


def write_mode_profiles(schmidt: SchmidtDecomposition, path: str | Path, count: int = 6) -> None:
    count = min(count, schmidt.n_kept)
    path = Path(path)
    with _open_writer(path) as fh:
        writer = csv.writer(fh)
        writer.writerow(["wavelength_m"] + [f"mode_{k}" for k in range(count)])
        for i, lam in enumerate(schmidt.signal_grid.samples):
            writer.writerow(
                [repr(float(lam))]
                + [repr(float(np.real(schmidt.modes_signal[k, i]))) for k in range(count)]
            )


def read_mode_profiles(path: str | Path):
    rows = _read_rows(path)
    wavelengths = np.array([float(r[0]) for r in rows[1:]])
    modes = np.array([[float(v) for v in r[1:]] for r in rows[1:]]).T
    return wavelengths, modes


def write_observable_trace(
    features: np.ndarray,
    labels: list[str],
    reservoirs: int,
    path: str | Path,
    first_step: int = 0,
) -> None:
    """Long-format trace: (step, reservoir, observable, value)."""
    width = len(labels)
    path = Path(path)
    with _open_writer(path) as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "reservoir", "observable", "value"])
        for k, row in enumerate(features):
            for r in range(reservoirs):
                for m, label in enumerate(labels):
                    writer.writerow(
                        [first_step + k, r, label, repr(float(row[r * width + m]))]
                    )


def read_observable_trace(path: str | Path):
    rows = _read_rows(path, expected_header=["step", "reservoir", "observable", "value"])
    body = rows[1:]
    return {
        "step": np.array([int(r[0]) for r in body]),
        "reservoir": np.array([int(r[1]) for r in body]),
        "observable": np.array([r[2] for r in body]),
        "value": np.array([float(r[3]) for r in body]),
    }


def write_series(series: np.ndarray, channels: list[str], path: str | Path) -> None:
    """Long-format sequence table: (step, channel, value)."""
    values = np.atleast_2d(np.asarray(series, dtype=float).T).T
    path = Path(path)
    with _open_writer(path) as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "channel", "value"])
        for k, row in enumerate(values):
            for c, name in enumerate(channels):
                writer.writerow([k, name, repr(float(row[c]))])


def read_series(path: str | Path):
    rows = _read_rows(path, expected_header=["step", "channel", "value"])
    body = rows[1:]
    channels = sorted({r[1] for r in body}, key=[r[1] for r in body].index)
    steps = sorted({int(r[0]) for r in body})
    out = np.full((len(steps), len(channels)), np.nan)
    for r in body:
        out[steps.index(int(r[0])), channels.index(r[1])] = float(r[2])
    return np.array(steps), channels, out


def write_phase_scan(
    phases: np.ndarray, values: np.ndarray, labels: list[str], path: str | Path
) -> None:
    """Repeated-scan records for noise fitting: (phase, observable, value)."""
    path = Path(path)
    with _open_writer(path) as fh:
        writer = csv.writer(fh)
        writer.writerow(["phase", "observable", "value"])
        for phase, row in zip(phases, np.atleast_2d(values)):
            for label, v in zip(labels, row):
                writer.writerow([repr(float(phase)), label, repr(float(v))])


def read_phase_scan(path: str | Path):
    """Returns (phases, values, labels) with one row per scan record."""
    rows = _read_rows(path, expected_header=["phase", "observable", "value"])
    body = rows[1:]
    labels = list(dict.fromkeys(r[1] for r in body))
    records: dict[float, dict[str, list[float]]] = {}
    order: list[tuple[float, str, float]] = [
        (float(r[0]), r[1], float(r[2])) for r in body
    ]
    n_labels = len(labels)
    if len(order) % n_labels:
        raise ConfigError(f"{path}: incomplete observable rows")
    phases = np.array([order[i][0] for i in range(0, len(order), n_labels)])
    values = np.array(
        [[v for _, _, v in order[i : i + n_labels]] for i in range(0, len(order), n_labels)]
    )
    return phases, values, labels


def write_sweep(rows: list[dict], path: str | Path) -> None:
    """Long-format sweep table: (axis, value, seed, metric, result)."""
    path = Path(path)
    with _open_writer(path) as fh:
        writer = csv.writer(fh)
        writer.writerow(["axis", "value", "seed", "metric", "result"])
        for row in rows:
            writer.writerow(
                [row["axis"], row["value"], row["seed"], row["metric"], repr(float(row["result"]))]
            )


def read_sweep(path: str | Path) -> list[dict]:
    rows = _read_rows(path, expected_header=["axis", "value", "seed", "metric", "result"])
    return [
        {
            "axis": r[0],
            "value": r[1],
            "seed": int(r[2]),
            "metric": r[3],
            "result": float(r[4]),
        }
        for r in rows[1:]
    ]


def _read_rows(path: str | Path, expected_header: list[str] | None = None) -> list[list[str]]:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"CSV file not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise ConfigError(f"{path}: empty CSV (line 1: missing header)")
    if expected_header is not None and rows[0] != expected_header:
        raise ConfigError(
            f"{path}: line 1: expected header {expected_header}, got {rows[0]}"
        )
    return rows
