"""Joint spectral amplitude of the parametric process.

The JSA over a signal x idler wavelength grid is the product of the complex
pump amplitude, evaluated at the energy-conserving pump wavelength of each
grid cell, and the sinc phase-matching function of the poled waveguide.
The result is normalized to unit Frobenius norm; absolute brightness is
reintroduced later through the squeezing-scale calibration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .crystal import CrystalSpec, phase_mismatch, pump_wavelength
from .pump import PumpSpec, pump_amplitude


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform, strictly increasing wavelength samples (metres)."""

    samples: np.ndarray

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", samples)
        if samples.ndim != 1 or samples.size < 2:
            raise ValueError("a spectral grid needs at least two samples")
        steps = np.diff(samples)
        if np.any(steps <= 0):
            raise ValueError("grid samples must be strictly increasing")
        if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
            raise ValueError("grid samples must be uniformly spaced")

    @classmethod
    def centered(cls, center: float, half_span: float, count: int) -> "SpectralGrid":
        return cls(np.linspace(center - half_span, center + half_span, count))

    @property
    def count(self) -> int:
        return int(self.samples.size)

    @property
    def spacing(self) -> float:
        return float(self.samples[1] - self.samples[0])

    @property
    def span(self) -> tuple[float, float]:
        return float(self.samples[0]), float(self.samples[-1])


@dataclass(frozen=True)
class JointSpectralAmplitude:
    """Complex JSA values indexed by (signal grid, idler grid)."""

    values: np.ndarray
    signal_grid: SpectralGrid
    idler_grid: SpectralGrid

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "values", values)
        if values.shape != (self.signal_grid.count, self.idler_grid.count):
            raise ValueError("JSA shape does not match its grids")
        if not np.all(np.isfinite(values)):
            raise ValueError("JSA contains non-finite entries")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.values))


def pump_wavelength_matrix(
    signal_grid: SpectralGrid, idler_grid: SpectralGrid
) -> np.ndarray:
    """Energy-conserving pump wavelength for every (signal, idler) cell."""
    return pump_wavelength(
        signal_grid.samples[:, None], idler_grid.samples[None, :]
    )


def phase_matching_matrix(
    crystal: CrystalSpec, signal_grid: SpectralGrid, idler_grid: SpectralGrid
) -> np.ndarray:
    """sinc(L Delta k / 2) over the grid; fixed once the crystal is fixed."""
    dk = phase_mismatch(
        signal_grid.samples[:, None], idler_grid.samples[None, :], crystal
    )
    # np.sinc(x) = sin(pi x) / (pi x)
    return np.sinc(crystal.length * dk / (2.0 * np.pi))


def build_jsa(
    pump: PumpSpec,
    crystal: CrystalSpec,
    signal_grid: SpectralGrid,
    idler_grid: SpectralGrid,
) -> JointSpectralAmplitude:
    """Assemble and normalize the JSA; raises if it is identically zero."""
    lam_p = pump_wavelength_matrix(signal_grid, idler_grid)
    values = pump_amplitude(lam_p, pump) * phase_matching_matrix(
        crystal, signal_grid, idler_grid
    )
    norm = np.linalg.norm(values)
    if norm == 0.0:
        raise ValueError(
            "JSA is identically zero: pump support does not intersect the "
            "energy-conservation band of the grids"
        )
    return JointSpectralAmplitude(values / norm, signal_grid, idler_grid)


def default_grids(
    pump: PumpSpec,
    crystal: CrystalSpec,
    samples: int = 256,
    marginal_sigmas: float = 4.0,
    trial_samples: int = 512,
    trial_half_span: float | None = None,
) -> tuple[SpectralGrid, SpectralGrid]:
    """Choose signal/idler grids covering +-4 sigma of the JSA marginals.

    A generous trial grid around the degenerate wavelength 2 lambda_P^c is
    used to measure the centroid and spread of the intensity marginals; the
    final grids span ``marginal_sigmas`` standard deviations around the
    centroid.
    """
    center = 2.0 * pump.center
    if trial_half_span is None:
        # Covers the pump band (x4 wavelength scaling signal-side) with room
        # for the phase-matching extent along the anti-diagonal.
        trial_half_span = max(40.0 * pump.sigma, 0.05 * center)
    trial = SpectralGrid.centered(center, trial_half_span, trial_samples)
    jsa = build_jsa(pump, crystal, trial, trial)
    weight = np.abs(jsa.values) ** 2

    grids = []
    for axis in (1, 0):
        marg = weight.sum(axis=axis)
        marg = marg / marg.sum()
        mean = float(np.dot(marg, trial.samples))
        std = float(np.sqrt(np.dot(marg, (trial.samples - mean) ** 2)))
        half = min(marginal_sigmas * std, trial_half_span)
        grids.append(SpectralGrid.centered(mean, half, samples))
    return grids[0], grids[1]
