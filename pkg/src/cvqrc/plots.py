"""Figure rendering for the report paths of the CLI.

Every figure is written next to its CSV counterpart; the data files remain
the primary output and round-trip through the loaders in ``csvio``.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .jsa import JointSpectralAmplitude
from .schmidt import SchmidtDecomposition


def _save(fig, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def save_jsa_figure(jsa: JointSpectralAmplitude, path: str | Path) -> None:
    fig, ax = plt.subplots(figsize=(5, 4))
    extent = [
        jsa.idler_grid.samples[0] * 1e9,
        jsa.idler_grid.samples[-1] * 1e9,
        jsa.signal_grid.samples[0] * 1e9,
        jsa.signal_grid.samples[-1] * 1e9,
    ]
    im = ax.imshow(
        np.abs(jsa.values), origin="lower", extent=extent, aspect="auto", cmap="magma"
    )
    fig.colorbar(im, ax=ax, label="|JSA| (arb.)")
    ax.set_xlabel("idler wavelength (nm)")
    ax.set_ylabel("signal wavelength (nm)")
    _save(fig, path)


def save_schmidt_figure(schmidt: SchmidtDecomposition, path: str | Path) -> None:
    fig, ax = plt.subplots(figsize=(5, 3.2))
    weights = schmidt.weights[:60] ** 2
    ax.bar(np.arange(weights.size), weights, width=0.8)
    ax.set_xlabel("mode index")
    ax.set_ylabel("normalized weight")
    ax.set_yscale("log")
    _save(fig, path)


def save_mode_figure(schmidt: SchmidtDecomposition, path: str | Path, count: int = 4) -> None:
    fig, ax = plt.subplots(figsize=(5.5, 3.2))
    lam = schmidt.signal_grid.samples * 1e9
    for k in range(min(count, schmidt.n_kept)):
        ax.plot(lam, np.real(schmidt.modes_signal[k]), lw=1, label=f"mode {k}")
    ax.set_xlabel("signal wavelength (nm)")
    ax.set_ylabel("mode amplitude")
    ax.legend(fontsize=8)
    _save(fig, path)


def save_prediction_figure(
    target: np.ndarray,
    predicted: np.ndarray,
    path: str | Path,
    channels: list[str] | None = None,
) -> None:
    target = np.atleast_2d(np.asarray(target, dtype=float).T).T
    predicted = np.atleast_2d(np.asarray(predicted, dtype=float).T).T
    n_ch = target.shape[1]
    channels = channels or [f"channel {c}" for c in range(n_ch)]
    fig, axes = plt.subplots(n_ch, 1, figsize=(6, 1.8 * n_ch + 1), sharex=True, squeeze=False)
    for c in range(n_ch):
        ax = axes[c, 0]
        ax.plot(target[:, c], "o-", ms=2.5, lw=0.8, label="target")
        ax.plot(predicted[:, c], "s--", ms=2.5, lw=0.8, label="predicted")
        ax.set_ylabel(channels[c])
    axes[0, 0].legend(fontsize=8, ncol=2)
    axes[-1, 0].set_xlabel("step")
    _save(fig, path)


def save_sweep_figure(rows: list[dict], path: str | Path) -> None:
    """Seed-averaged metric vs axis value, one line per metric."""
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    metrics = sorted({r["metric"] for r in rows})
    for metric in metrics:
        sel = [r for r in rows if r["metric"] == metric]
        values = sorted({r["value"] for r in sel}, key=_axis_key)
        means, stds = [], []
        for v in values:
            res = [r["result"] for r in sel if r["value"] == v]
            means.append(np.mean(res))
            stds.append(np.std(res))
        x = np.arange(len(values))
        ax.errorbar(x, means, yerr=stds, marker="o", capsize=3, label=metric)
        ax.set_xticks(x, [str(v) for v in values])
    ax.set_xlabel(rows[0]["axis"] if rows else "value")
    ax.set_ylabel("metric")
    ax.legend(fontsize=8)
    _save(fig, path)


def save_phase_scan_figure(
    phases: np.ndarray,
    values: np.ndarray,
    model_values: np.ndarray,
    labels: list[str],
    path: str | Path,
) -> None:
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    order = np.argsort(phases)
    for m, label in enumerate(labels):
        (line,) = ax.plot(phases[order], values[order, m], ".", ms=3, alpha=0.5)
        ax.plot(
            phases[order], model_values[order, m], "-", lw=1.2,
            color=line.get_color(), label=label,
        )
    ax.set_xlabel("encoding phase (rad)")
    ax.set_ylabel("normalized observable")
    ax.legend(fontsize=8)
    _save(fig, path)


def _axis_key(value):
    try:
        return (0, float(value))
    except (TypeError, ValueError):
        return (1, str(value))
