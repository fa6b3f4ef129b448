"""Measurement bases, symplectic transforms and covariance matrices.

Quadratures use the grouped ordering [q_1..q_n, p_1..p_n] with vacuum
variance 1 (commutator [q, p] = 2i).  A mode basis change U maps to phase
space as the block matrix

    S_U = [[Re U, -Im U], [Im U, Re U]]

and the covariance of the squeezed supermodes, diagonal in their own basis,
transforms by congruence sigma' = S_U^T sigma S_U.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .schmidt import SchmidtDecomposition

SYMMETRY_TOL = 1e-10


@dataclass(frozen=True)
class MeasurementBasis:
    """Overlap of the leading supermodes with rectangular frequency bins.

    ``overlap`` has one row per supermode and one column per frexel; each
    row is normalized to unit norm, compensating the part of the mode that
    falls outside the finite frexel window.
    """

    overlap: np.ndarray
    half_span: float
    center: float
    edges: np.ndarray

    @property
    def frexel_count(self) -> int:
        return int(self.overlap.shape[1])

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.overlap)


def supermode_basis(n: int) -> MeasurementBasis:
    """Identity basis: measure the first ``n`` supermodes directly."""
    return MeasurementBasis(
        overlap=np.eye(n), half_span=0.0, center=0.0, edges=np.zeros(n + 1)
    )


def frexel_half_span(
    schmidt: SchmidtDecomposition,
    n: int,
    center: float | None = None,
    coverage: float = 0.999,
) -> float:
    """Smallest half-span capturing ``coverage`` of each leading mode's mass."""
    grid = schmidt.signal_grid
    if center is None:
        center = 0.5 * (grid.samples[0] + grid.samples[-1])
    if not grid.samples[0] <= center <= grid.samples[-1]:
        raise ValueError("frexel center lies outside the signal grid")
    radius = np.abs(grid.samples - center)
    order = np.argsort(radius)
    half = 0.0
    for k in range(min(n, schmidt.n_kept)):
        mass = np.abs(schmidt.modes_signal[k]) ** 2 * grid.spacing
        cum = np.cumsum(mass[order])
        stop = int(np.searchsorted(cum, coverage * cum[-1]))
        half = max(half, float(radius[order][min(stop, grid.count - 1)]))
    # High-order modes can extend past the simulated window; the measured
    # band can never be wider than the grid itself.
    return min(half, center - grid.samples[0], grid.samples[-1] - center)


def build_measurement_matrix(
    schmidt: SchmidtDecomposition,
    n: int,
    half_span: float,
    center: float,
) -> MeasurementBasis:
    """Integrate the first ``n`` supermodes over ``n`` contiguous frexels.

    The frexels uniformly partition [center - half_span, center + half_span],
    which must lie inside the signal grid.  Integrals use the midpoint rule;
    rows are normalized afterwards.
    """
    if n < 1:
        raise ValueError("frexel count must be at least 1")
    if n > schmidt.n_kept:
        raise ValueError(f"need {n} supermodes but only {schmidt.n_kept} were kept")
    grid = schmidt.signal_grid
    lo, hi = center - half_span, center + half_span
    if lo < grid.samples[0] or hi > grid.samples[-1]:
        raise ValueError("frexel window extends outside the signal grid")

    edges = np.linspace(lo, hi, n + 1)
    bins = np.searchsorted(edges, grid.samples, side="right") - 1
    bins = np.where(grid.samples == edges[-1], n - 1, bins)
    inside = (bins >= 0) & (bins < n)

    overlap = np.zeros((n, n), dtype=schmidt.modes_signal.dtype)
    for j in range(n):
        mask = inside & (bins == j)
        overlap[:, j] = schmidt.modes_signal[:n, mask].sum(axis=1) * grid.spacing

    norms = np.linalg.norm(overlap, axis=1)
    if np.any(norms < 1e-300):
        dead = int(np.argmin(norms))
        raise ValueError(f"supermode {dead} has zero overlap with every frexel")
    overlap = overlap / norms[:, None]
    return MeasurementBasis(
        overlap=overlap, half_span=half_span, center=center, edges=edges
    )


def symplectic_from_unitary(u: np.ndarray) -> np.ndarray:
    """Phase-space block matrix [[Re U, -Im U], [Im U, Re U]] of a mode map."""
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError("mode transformation must be a square matrix")
    re, im = u.real, u.imag
    return np.block([[re, -im], [im, re]])


def omega(n: int) -> np.ndarray:
    """Symplectic form [[0, I], [-I, 0]] in grouped quadrature ordering."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def mode_rotation_symplectic(phase: float, n: int) -> np.ndarray:
    """Rigid phase-space rotation of all n modes by ``phase``."""
    return symplectic_from_unitary(np.exp(-1j * phase) * np.eye(n))


@dataclass(frozen=True)
class CovarianceMatrix:
    """Real symmetric quadrature covariance in grouped [q.., p..] ordering."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=float)
        object.__setattr__(self, "matrix", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise ValueError("covariance must be a 2n x 2n matrix")
        if not np.allclose(m, m.T, atol=SYMMETRY_TOL, rtol=0.0):
            raise ValueError("covariance matrix is not symmetric")

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2

    def symplectic_eigenvalues(self) -> np.ndarray:
        """Ascending symplectic spectrum; all ones for a pure state."""
        ev = np.linalg.eigvals(omega(self.n_modes) @ self.matrix)
        return np.sort(np.abs(ev))[::2]

    def is_positive_definite(self) -> bool:
        try:
            np.linalg.cholesky(self.matrix)
            return True
        except np.linalg.LinAlgError:
            return False


def diagonal_covariance(r: np.ndarray) -> np.ndarray:
    """Supermode-basis covariance diag(e^{2r} .., e^{-2r} ..)."""
    r = np.asarray(r, dtype=float)
    return np.diag(np.concatenate([np.exp(2.0 * r), np.exp(-2.0 * r)]))


def covariance_in_basis(
    schmidt: SchmidtDecomposition,
    basis: MeasurementBasis,
    pump_phase: float = 0.0,
) -> CovarianceMatrix:
    """Covariance of the measured modes, sigma' = S_U^T sigma S_U.

    ``pump_phase`` rotates every squeezing ellipse rigidly before the basis
    change, which is how a common phase on the pump acts on the output
    state.
    """
    n = basis.frexel_count
    if schmidt.n_kept < n:
        raise ValueError(
            f"basis uses {n} modes but the decomposition kept {schmidt.n_kept}"
        )
    sigma = diagonal_covariance(schmidt.r[:n])
    if pump_phase != 0.0:
        rot = mode_rotation_symplectic(pump_phase, n)
        sigma = rot.T @ sigma @ rot
    s_u = symplectic_from_unitary(basis.overlap)
    out = s_u.T @ sigma @ s_u
    return CovarianceMatrix(0.5 * (out + out.T))


def global_phase_covariance(
    phase: float, u: np.ndarray, r: np.ndarray
) -> CovarianceMatrix:
    """Closed-form covariance for single-segment pumping and a real basis.

    Each 2x2 mode block is a sum over supermodes ``a`` of
    U[a, l] U[a, j] times the rotated single-mode block

        [[A c^2 + B s^2, (A - B) c s], [(A - B) c s, A s^2 + B c^2]]

    with A = e^{2 r_a}, B = e^{-2 r_a}, c = cos(phase), s = sin(phase).
    Only valid for a real overlap matrix.
    """
    u = np.asarray(u)
    if np.iscomplexobj(u):
        raise ValueError("the closed form requires a real overlap matrix")
    r = np.atleast_1d(np.asarray(r, dtype=float))
    n = u.shape[1]
    if u.shape != (n, n) or r.size < n:
        raise ValueError("overlap matrix and squeezing list sizes disagree")
    a = np.exp(2.0 * r[:n])
    b = np.exp(-2.0 * r[:n])
    c, s = np.cos(phase), np.sin(phase)

    qq = u.T @ np.diag(a * c * c + b * s * s) @ u
    pp = u.T @ np.diag(a * s * s + b * c * c) @ u
    qp = u.T @ np.diag((a - b) * c * s) @ u
    return CovarianceMatrix(np.block([[qq, qp], [qp.T, pp]]))
