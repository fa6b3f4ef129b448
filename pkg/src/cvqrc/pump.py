"""Segmented Gaussian pump envelope.

The pump amplitude is a Gaussian of width sigma (in wavelength), truncated
at +-3 sigma.  Its support is split into N contiguous, non-overlapping
frequency segments of equal wavelength width; each segment carries one
programmable phase.  A single segment reproduces plain global-phase
modulation.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

SUPPORT_SIGMAS = 3.0


@dataclass(frozen=True)
class PumpSpec:
    """Pump envelope: centre/width in metres plus per-segment phases (rad)."""

    center: float
    sigma: float
    phases: tuple[float, ...] = (0.0,)

    def __post_init__(self) -> None:
        if self.sigma <= 0:
            raise ValueError("pump sigma must be positive")
        if len(self.phases) < 1:
            raise ValueError("at least one pump segment is required")
        object.__setattr__(self, "phases", tuple(float(p) for p in self.phases))

    @property
    def segments(self) -> int:
        return len(self.phases)

    def with_phases(self, phases) -> "PumpSpec":
        phases = tuple(float(p) for p in np.atleast_1d(phases))
        if len(phases) != self.segments:
            raise ValueError(
                f"expected {self.segments} segment phases, got {len(phases)}"
            )
        return dataclasses.replace(self, phases=phases)


def segment_edges(pump: PumpSpec) -> np.ndarray:
    """Wavelengths bounding the N segments of the +-3 sigma support."""
    half = SUPPORT_SIGMAS * pump.sigma
    return np.linspace(pump.center - half, pump.center + half, pump.segments + 1)


def segment_index(wavelength_m, pump: PumpSpec) -> np.ndarray:
    """Segment containing each wavelength; -1 outside the +-3 sigma support.

    Bins are half-open on the right except the last, which is closed, so the
    support is partitioned without overlap.
    """
    lam = np.asarray(wavelength_m, dtype=float)
    edges = segment_edges(pump)
    idx = np.searchsorted(edges, lam, side="right") - 1
    idx = np.where(lam == edges[-1], pump.segments - 1, idx)
    outside = (lam < edges[0]) | (lam > edges[-1])
    return np.where(outside, -1, np.clip(idx, 0, pump.segments - 1))


def pump_envelope(wavelength_m, pump: PumpSpec) -> np.ndarray:
    """Real Gaussian amplitude, zero outside the +-3 sigma support."""
    lam = np.asarray(wavelength_m, dtype=float)
    amp = np.exp(-((lam - pump.center) ** 2) / (2.0 * pump.sigma**2))
    inside = np.abs(lam - pump.center) <= SUPPORT_SIGMAS * pump.sigma
    return np.where(inside, amp, 0.0)


def pump_amplitude(wavelength_m, pump: PumpSpec):
    """Complex pump amplitude: Gaussian envelope times the segment phase."""
    lam = np.asarray(wavelength_m, dtype=float)
    idx = segment_index(lam, pump)
    phase = np.where(idx >= 0, np.take(pump.phases, np.clip(idx, 0, None)), 0.0)
    value = pump_envelope(lam, pump) * np.exp(1j * phase)
    return value if lam.ndim else complex(value)
