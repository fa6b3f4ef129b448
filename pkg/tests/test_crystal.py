import math

import numpy as np
import pytest

from cvqrc.crystal import (
    CrystalSpec,
    constant_index_crystal,
    load_crystal,
    optimal_poling_period,
    phase_mismatch,
    sellmeier_index,
)
from cvqrc.exceptions import ConfigError
from cvqrc.presets import _data_path


@pytest.fixture(scope="module")
def ktp():
    crystal = load_crystal(_data_path("ktp.json"))
    period = optimal_poling_period(1.560e-6, 1.560e-6, crystal)
    return crystal.with_poling_period(period)


def test_constant_sellmeier_gives_constant_index():
    crystal = constant_index_crystal(n=2.0)
    for lam in (0.5, 1.0, 1.56, 3.0):
        assert sellmeier_index("z", lam, crystal) == pytest.approx(2.0, abs=1e-15)


def test_ktp_z_index_matches_hand_evaluation(ktp):
    # independent scalar evaluation of the two-pole formula at 1.560 um
    lam2 = 1.560**2
    n2 = 4.59423 + 0.06206 / (lam2 - 0.04763) + 110.80672 / (lam2 - 86.12171)
    assert sellmeier_index("z", 1.560, ktp) == pytest.approx(math.sqrt(n2), abs=1e-12)
    assert sellmeier_index("z", 1.560, ktp) > 1.0


def test_ktp_z_index_decreasing_over_band(ktp):
    lam = np.linspace(1.4, 1.7, 2000)
    n = sellmeier_index("z", lam, ktp)
    assert np.all(np.diff(n) < 0)


def test_sellmeier_domain_errors():
    crystal = constant_index_crystal(n=2.0)
    pole = CrystalSpec(
        sellmeier={a: (2.0, 1.0, 1.0, 0.0, 0.0) for a in "xyz"}, length=1e-3
    )
    with pytest.raises(ValueError, match="pole"):
        sellmeier_index("z", 1.0, pole)
    negative = CrystalSpec(
        sellmeier={a: (-1.0, 0.0, 0.0, 0.0, 0.0) for a in "xyz"}, length=1e-3
    )
    with pytest.raises(ValueError, match="radicand"):
        sellmeier_index("z", 1.0, negative)
    with pytest.raises(ValueError, match="length"):
        constant_index_crystal(length=0.0)


def test_waveguide_offset_is_additive():
    crystal = constant_index_crystal(n=2.0)
    shifted = CrystalSpec(
        sellmeier=crystal.sellmeier,
        length=crystal.length,
        index_offset={"x": 0.0, "y": 0.0, "z": 0.1},
    )
    assert sellmeier_index("z", 1.5, shifted) == pytest.approx(2.1, abs=1e-14)


def test_mismatch_vanishes_at_poled_degeneracy(ktp):
    assert abs(phase_mismatch(1.560e-6, 1.560e-6, ktp)) < 1e-6


def test_dispersionless_crystal_has_zero_mismatch():
    crystal = constant_index_crystal(n=2.0, poling_period=None)
    for lam_s, lam_i in ((1.5e-6, 1.6e-6), (1.2e-6, 2.2e-6)):
        assert phase_mismatch(lam_s, lam_i, crystal) == pytest.approx(0.0, abs=1e-9)


def test_ktp_mismatch_matches_scalar_oracle(ktp):
    # independent evaluation with plain floats
    def nz(lam_um):
        l2 = lam_um * lam_um
        return math.sqrt(4.59423 + 0.06206 / (l2 - 0.04763) + 110.80672 / (l2 - 86.12171))

    lam_s, lam_i = 1.550e-6, 1.57013e-6
    lam_p = 1.0 / (1.0 / lam_s + 1.0 / lam_i)
    expected = (
        2 * math.pi * (nz(lam_p * 1e6) / lam_p - nz(1.550) / lam_s - nz(1.57013) / lam_i)
        - 2 * math.pi / ktp.poling_period
    )
    # agreement limited by um/m conversion rounding inside the library
    assert phase_mismatch(lam_s, lam_i, ktp) == pytest.approx(expected, rel=1e-6)
    assert expected == pytest.approx(-3.478843869001139, rel=1e-6)


def test_optimal_poling_errors_for_dispersionless_crystal():
    crystal = constant_index_crystal(n=2.0)
    with pytest.raises(ValueError, match="poling"):
        optimal_poling_period(1.5e-6, 1.5e-6, crystal)


def test_optimal_poling_within_sanity_window_and_bisection_root(ktp):
    period = ktp.poling_period
    assert 1e-6 < period < 100e-6
    # bisection on Delta k as a function of the period
    def f(candidate):
        return phase_mismatch(1.560e-6, 1.560e-6, ktp.with_poling_period(candidate))

    lo, hi = 1e-6, 100e-6
    assert f(lo) * f(hi) < 0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if f(lo) * f(mid) <= 0:
            hi = mid
        else:
            lo = mid
    assert period == pytest.approx(0.5 * (lo + hi), rel=1e-9)


def test_mismatch_zero_at_substituted_targets(ktp):
    lam_s, lam_i = 1.50e-6, 1.63e-6
    period = optimal_poling_period(lam_s, lam_i, ktp)
    retuned = ktp.with_poling_period(period)
    assert phase_mismatch(lam_s, lam_i, retuned) == pytest.approx(0.0, abs=1e-8)


def test_load_crystal_missing_file_mentions_path(tmp_path):
    missing = tmp_path / "nope.json"
    with pytest.raises(ConfigError, match="nope.json"):
        load_crystal(missing)


def test_load_crystal_rejects_bad_json(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="JSON"):
        load_crystal(bad)
