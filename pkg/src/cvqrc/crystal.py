"""Dispersion and quasi-phase-matching of the nonlinear waveguide.

Refractive indices follow the two-pole Sellmeier form

    n^2(lambda) = C1 + C2 / (lambda^2 - C3) + C4 / (lambda^2 - C5)

with lambda in micrometres, plus an additive per-axis offset that stands in
for the effective-index shift of waveguide confinement.  Wavevectors are
k(lambda) = 2 pi n(lambda) / lambda and the collinear mismatch of the
parametric process includes the first-order grating vector 2 pi / Lambda of
the periodic poling.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .exceptions import ConfigError

AXES = ("x", "y", "z")
FIELDS = ("pump", "signal", "idler")


@dataclass(frozen=True)
class CrystalSpec:
    """Material and geometry data of the poled waveguide.

    Attributes:
        sellmeier: per-axis coefficient tuples (C1..C5), wavelengths in um.
        length: interaction length in metres.
        poling_period: first-order poling period in metres, or ``None`` for
            an unpoled medium (drops the grating term from the mismatch).
        axes: polarization axis of each field; all ``"z"`` for Type-0.
        index_offset: additive waveguide correction per axis.
    """

    sellmeier: Mapping[str, tuple[float, float, float, float, float]]
    length: float
    poling_period: float | None = None
    axes: Mapping[str, str] = field(
        default_factory=lambda: {"pump": "z", "signal": "z", "idler": "z"}
    )
    index_offset: Mapping[str, float] = field(
        default_factory=lambda: {"x": 0.0, "y": 0.0, "z": 0.0}
    )

    def __post_init__(self) -> None:
        if self.length <= 0:
            raise ValueError("crystal length must be positive")
        if self.poling_period is not None and self.poling_period <= 0:
            raise ValueError("poling period must be positive (or None)")
        for fld in FIELDS:
            axis = self.axes.get(fld)
            if axis not in self.sellmeier:
                raise ValueError(f"no Sellmeier data for axis {axis!r} of {fld}")

    def with_poling_period(self, period: float | None) -> "CrystalSpec":
        return CrystalSpec(
            self.sellmeier, self.length, period, self.axes, self.index_offset
        )


def constant_index_crystal(
    n: float = 2.0, length: float = 1e-3, poling_period: float | None = None
) -> CrystalSpec:
    """Dispersionless toy crystal (n identical on all axes), used in tests."""
    coeffs = (n * n, 0.0, 0.0, 0.0, 0.0)
    return CrystalSpec(
        sellmeier={axis: coeffs for axis in AXES},
        length=length,
        poling_period=poling_period,
    )


def sellmeier_index(axis: str, wavelength_um, crystal: CrystalSpec):
    """Refractive index along ``axis`` at ``wavelength_um`` (micrometres).

    Raises ValueError when a pole denominator vanishes or the radicand is
    not positive over the requested wavelengths.
    """
    c1, c2, c3, c4, c5 = crystal.sellmeier[axis]
    lam2 = np.asarray(wavelength_um, dtype=float) ** 2
    d1 = lam2 - c3
    d2 = lam2 - c5
    if np.any(d1 == 0.0) or np.any(d2 == 0.0):
        raise ValueError(f"Sellmeier pole hit on axis {axis!r}")
    n2 = c1 + c2 / d1 + c4 / d2
    if np.any(n2 <= 0.0):
        raise ValueError(f"Sellmeier radicand non-positive on axis {axis!r}")
    n = np.sqrt(n2) + crystal.index_offset.get(axis, 0.0)
    return n if np.ndim(wavelength_um) else float(n)


def field_index(fld: str, wavelength_m, crystal: CrystalSpec):
    """Index seen by ``fld`` ("pump", "signal" or "idler"), wavelength in m."""
    return sellmeier_index(crystal.axes[fld], np.asarray(wavelength_m) * 1e6, crystal)


def wavevector(fld: str, wavelength_m, crystal: CrystalSpec):
    """k = 2 pi n / lambda in rad/m for the polarization axis of ``fld``."""
    return 2.0 * np.pi * field_index(fld, wavelength_m, crystal) / np.asarray(
        wavelength_m
    )


def pump_wavelength(lambda_s, lambda_i):
    """Energy-conserving pump wavelength 1/lambda_P = 1/lambda_S + 1/lambda_I."""
    return 1.0 / (1.0 / np.asarray(lambda_s) + 1.0 / np.asarray(lambda_i))


def phase_mismatch(lambda_s, lambda_i, crystal: CrystalSpec):
    """Collinear mismatch Delta k = k_P - k_S - k_I - 2 pi / Lambda in rad/m."""
    lam_p = pump_wavelength(lambda_s, lambda_i)
    dk = (
        wavevector("pump", lam_p, crystal)
        - wavevector("signal", lambda_s, crystal)
        - wavevector("idler", lambda_i, crystal)
    )
    if crystal.poling_period is not None:
        dk = dk - 2.0 * np.pi / crystal.poling_period
    return dk


def optimal_poling_period(
    lambda_s0: float, lambda_i0: float, crystal: CrystalSpec
) -> float:
    """First-order poling period cancelling the mismatch at the targets.

    Lambda = 2 pi / (k_P - k_S - k_I) evaluated at (lambda_s0, lambda_i0);
    raises ValueError when the bare mismatch is not positive, in which case
    no first-order grating can compensate it.
    """
    bare = phase_mismatch(lambda_s0, lambda_i0, crystal.with_poling_period(None))
    if bare <= 0.0:
        raise ValueError(
            "bare mismatch k_P - k_S - k_I is not positive; "
            "no first-order poling period exists"
        )
    return 2.0 * math.pi / float(bare)


def load_crystal(path: str | Path) -> CrystalSpec:
    """Load a crystal description from a JSON file.

    Expected keys: ``sellmeier_um`` (axis -> [C1..C5]), ``length_m``,
    ``poling_period_m`` (number or null), optional ``axes`` and
    ``index_offset``.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"crystal file not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"crystal file {path} is not valid JSON: {exc}") from exc
    try:
        sellmeier = {
            axis: tuple(float(c) for c in coeffs)
            for axis, coeffs in raw["sellmeier_um"].items()
        }
        period = raw.get("poling_period_m")
        return CrystalSpec(
            sellmeier=sellmeier,
            length=float(raw["length_m"]),
            poling_period=None if period is None else float(period),
            axes=raw.get("axes", {f: "z" for f in FIELDS}),
            index_offset=raw.get("index_offset", {a: 0.0 for a in AXES}),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"crystal file {path}: {exc}") from exc
