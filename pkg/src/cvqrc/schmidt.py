"""Schmidt decomposition of the JSA into squeezed supermodes.

A singular value decomposition of the discretized JSA yields orthonormal
signal/idler spectral modes and a non-negative coefficient per mode.  The
coefficients are rescaled so the leading one equals a configurable
squeezing parameter; this is the single calibration hook tying the
normalized kernel to physical squeezing levels.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .jsa import JointSpectralAmplitude, SpectralGrid

RANK_TOLERANCE = 1e-12

# -0.45 dB of squeezed-quadrature noise reduction: exp(-2 r) = 10^(-0.45/10)
DEFAULT_R_SCALE = 0.45 * np.log(10.0) / 20.0


@dataclass(frozen=True)
class SchmidtDecomposition:
    """Squeezing parameters and spectral supermodes of the source.

    Attributes:
        r: squeezing parameter per kept mode, descending.
        modes_signal: (n_kept, n_s) mode functions, unit L2 norm under the
            midpoint rule on ``signal_grid``.
        modes_idler: (n_kept, n_i) idler-side counterparts.
        weights: full unit-norm singular-value spectrum of the JSA, before
            truncation and rescaling (sum of squares is 1).
    """

    r: np.ndarray
    modes_signal: np.ndarray
    modes_idler: np.ndarray
    weights: np.ndarray
    signal_grid: SpectralGrid
    idler_grid: SpectralGrid

    @property
    def n_kept(self) -> int:
        return int(self.r.size)

    def mode_count(self, threshold: float = 0.01) -> int:
        """Number of modes whose weight exceeds ``threshold`` of the leading one."""
        return int(np.sum(self.weights > threshold * self.weights[0]))

    def rotated(self, phase: float) -> "SchmidtDecomposition":
        """Copy with every supermode multiplied by exp(-i phase).

        A common pump phase rotates each squeezing ellipse rigidly; carrying
        the phase on the modes makes any downstream overlap matrix complex
        and reproduces that rotation through the symplectic construction.
        """
        factor = np.exp(-1j * phase)
        return dataclasses.replace(
            self,
            modes_signal=self.modes_signal * factor,
            modes_idler=self.modes_idler * factor,
        )


def _fix_mode_phases(u: np.ndarray, vt: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Make each signal mode's largest-magnitude entry real-positive.

    The compensating phase is pushed onto the idler mode so the decomposed
    kernel is unchanged.  This pins the gauge freedom of the SVD and keeps
    results identical across linear-algebra backends.
    """
    u = u.copy()
    vt = vt.copy()
    for k in range(u.shape[1]):
        col = u[:, k]
        lead = col[np.argmax(np.abs(col))]
        if lead == 0:
            continue
        phase = lead / abs(lead)
        u[:, k] = col / phase
        vt[k, :] = vt[k, :] * phase
    return u, vt


def _real_if_close(a: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    if np.iscomplexobj(a) and np.max(np.abs(a.imag)) <= tol * max(
        np.max(np.abs(a.real)), 1.0
    ):
        return np.ascontiguousarray(a.real)
    return a


def schmidt_decompose(
    jsa: JointSpectralAmplitude,
    n_kept: int,
    r_scale: float = DEFAULT_R_SCALE,
) -> SchmidtDecomposition:
    """Decompose the JSA and keep the ``n_kept`` strongest supermodes."""
    if r_scale <= 0:
        raise ValueError("r_scale must be positive")
    if n_kept < 1 or n_kept > min(jsa.values.shape):
        raise ValueError(f"n_kept={n_kept} outside 1..{min(jsa.values.shape)}")
    u, s, vt = np.linalg.svd(jsa.values)
    weights = s / np.linalg.norm(s)
    rank = int(np.sum(s > RANK_TOLERANCE * s[0]))
    if n_kept > rank:
        raise ValueError(
            f"n_kept={n_kept} exceeds the numerical rank {rank} of the JSA"
        )
    u, vt = _fix_mode_phases(u[:, :n_kept], vt[:n_kept, :])

    # Matrix singular vectors have unit Euclidean norm; dividing by the
    # square root of the grid step gives unit L2 norm under the midpoint rule.
    modes_signal = _real_if_close(u.T / np.sqrt(jsa.signal_grid.spacing))
    modes_idler = _real_if_close(vt / np.sqrt(jsa.idler_grid.spacing))

    r = r_scale * s[:n_kept] / s[0]
    return SchmidtDecomposition(
        r=r,
        modes_signal=modes_signal,
        modes_idler=modes_idler,
        weights=weights,
        signal_grid=jsa.signal_grid,
        idler_grid=jsa.idler_grid,
    )
