"""Covariance models mapping pump phases to measured-mode covariances.

Two interchangeable backends provide ``covariance(phases) -> 2n x 2n array``:

* ``AnalyticCovariance`` evaluates the closed form valid for a single pump
  segment (global phase) and a real mode basis.
* ``PipelineCovariance`` runs the full chain: segmented pump -> JSA ->
  Schmidt decomposition -> frexel (or supermode) basis -> congruence
  transform.  For a single segment the spectral decomposition is phase
  independent, so it is cached and the phase enters as a rigid rotation of
  the squeezing ellipses; with several segments the JSA is rebuilt at every
  call.
"""

from __future__ import annotations

import numpy as np

from .crystal import CrystalSpec
from .jsa import (
    JointSpectralAmplitude,
    SpectralGrid,
    default_grids,
    phase_matching_matrix,
    pump_wavelength_matrix,
)
from .measurement import (
    MeasurementBasis,
    build_measurement_matrix,
    covariance_in_basis,
    frexel_half_span,
    global_phase_covariance,
    supermode_basis,
)
from .pump import PumpSpec, pump_envelope, segment_index
from .schmidt import DEFAULT_R_SCALE, SchmidtDecomposition, schmidt_decompose

DEFAULT_N_KEPT = 12


class AnalyticCovariance:
    """Closed-form covariance for global-phase pumping."""

    def __init__(self, r, u: np.ndarray | None = None):
        self.r = np.atleast_1d(np.asarray(r, dtype=float))
        self.u = np.eye(self.r.size) if u is None else np.asarray(u)
        if np.iscomplexobj(self.u):
            raise ValueError("analytic backend requires a real mode basis")
        if self.u.shape[0] != self.u.shape[1]:
            raise ValueError("mode basis must be square")
        if self.r.size < self.u.shape[0]:
            raise ValueError("need one squeezing parameter per measured mode")

    @property
    def segments(self) -> int:
        return 1

    @property
    def modes(self) -> int:
        return self.u.shape[1]

    def covariance(self, phases) -> np.ndarray:
        phases = np.atleast_1d(phases)
        if phases.size != 1:
            raise ValueError("the analytic backend supports one pump segment only")
        return global_phase_covariance(float(phases[0]), self.u, self.r).matrix


class PipelineCovariance:
    """Covariance through the full nonlinear-optics chain."""

    def __init__(
        self,
        pump: PumpSpec,
        crystal: CrystalSpec,
        modes: int,
        signal_grid: SpectralGrid | None = None,
        idler_grid: SpectralGrid | None = None,
        samples: int = 256,
        n_kept: int | None = None,
        r_scale: float = DEFAULT_R_SCALE,
        basis: str = "frexel",
        frexel_coverage: float = 0.999,
    ):
        if basis not in ("frexel", "supermode"):
            raise ValueError(f"unknown basis kind {basis!r}")
        if signal_grid is None or idler_grid is None:
            signal_grid, idler_grid = default_grids(pump, crystal, samples=samples)
        self.pump = pump
        self.crystal = crystal
        self.signal_grid = signal_grid
        self.idler_grid = idler_grid
        self._modes = modes
        self.n_kept = max(n_kept or DEFAULT_N_KEPT, modes)
        self.r_scale = r_scale
        self.basis_kind = basis

        # Phase-only segment updates leave |J| unchanged, so the envelope,
        # phase matching, segment map and norm are all computed once.
        lam_p = pump_wavelength_matrix(signal_grid, idler_grid)
        base = pump_envelope(lam_p, pump) * phase_matching_matrix(
            crystal, signal_grid, idler_grid
        )
        norm = np.linalg.norm(base)
        if norm == 0.0:
            raise ValueError(
                "pump support does not intersect the energy-conservation band"
            )
        self._base = base / norm
        self._segment = np.clip(segment_index(lam_p, pump), 0, None)

        self._schmidt0 = self._decompose(np.zeros(pump.segments))
        if basis == "frexel":
            self._frexel_center = 2.0 * pump.center
            self._frexel_half_span = frexel_half_span(
                self._schmidt0, modes, self._frexel_center, frexel_coverage
            )
        self._basis0 = self._build_basis(self._schmidt0)

    @property
    def segments(self) -> int:
        return self.pump.segments

    @property
    def modes(self) -> int:
        return self._modes

    @property
    def schmidt(self) -> SchmidtDecomposition:
        """Decomposition at zero encoding phases."""
        return self._schmidt0

    @property
    def measurement_basis(self) -> MeasurementBasis:
        """Measurement basis at zero encoding phases."""
        return self._basis0

    def _decompose(self, phases: np.ndarray) -> SchmidtDecomposition:
        values = self._base * np.exp(1j * np.asarray(phases)[self._segment])
        jsa = JointSpectralAmplitude(values, self.signal_grid, self.idler_grid)
        return schmidt_decompose(jsa, self.n_kept, self.r_scale)

    def _build_basis(self, schmidt: SchmidtDecomposition) -> MeasurementBasis:
        if self.basis_kind == "supermode":
            return supermode_basis(self._modes)
        return build_measurement_matrix(
            schmidt, self._modes, self._frexel_half_span, self._frexel_center
        )

    def covariance(self, phases) -> np.ndarray:
        phases = np.atleast_1d(np.asarray(phases, dtype=float))
        if phases.size != self.pump.segments:
            raise ValueError(
                f"expected {self.pump.segments} segment phases, got {phases.size}"
            )
        if self.pump.segments == 1:
            # A common pump phase rotates every squeezing ellipse rigidly;
            # the spectral decomposition itself is unchanged.
            sigma = covariance_in_basis(
                self._schmidt0, self._basis0, pump_phase=float(phases[0])
            )
            return sigma.matrix
        schmidt = self._decompose(phases)
        basis = self._build_basis(schmidt)
        return covariance_in_basis(schmidt, basis).matrix
