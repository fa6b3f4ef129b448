import numpy as np
import pytest

from cvqrc.pump import PumpSpec, pump_amplitude, segment_edges, segment_index


def test_single_segment_peak_amplitude():
    pump = PumpSpec(center=780e-9, sigma=2e-9)
    assert pump_amplitude(780e-9, pump) == pytest.approx(1.0 + 0.0j)


def test_global_pi_phase_flips_sign():
    pump = PumpSpec(center=780e-9, sigma=2e-9, phases=(np.pi,))
    assert pump_amplitude(780e-9, pump) == pytest.approx(-1.0 + 0.0j, abs=1e-15)


def test_two_segments_phase_selection():
    pump = PumpSpec(center=780e-9, sigma=2e-9, phases=(0.0, np.pi / 2))
    lam = 780e-9 + 0.1e-9  # just above centre: second segment
    value = pump_amplitude(lam, pump)
    envelope = np.exp(-((lam - 780e-9) ** 2) / (2 * (2e-9) ** 2))
    assert value == pytest.approx(envelope * 1j, abs=1e-12)
    below = pump_amplitude(780e-9 - 0.1e-9, pump)
    assert below.imag == pytest.approx(0.0, abs=1e-15)


def test_zero_outside_three_sigma():
    pump = PumpSpec(center=780e-9, sigma=2e-9)
    assert pump_amplitude(780e-9 + 6.001e-9, pump) == 0.0
    assert pump_amplitude(780e-9 - 6.001e-9, pump) == 0.0
    inside = pump_amplitude(780e-9 + 5.99e-9, pump)
    assert abs(inside) == pytest.approx(np.exp(-0.5 * (5.99 / 2.0) ** 2), rel=1e-9)


def test_segments_partition_support():
    pump = PumpSpec(center=780e-9, sigma=2e-9, phases=(0.0,) * 5)
    edges = segment_edges(pump)
    assert edges[0] == pytest.approx(780e-9 - 6e-9)
    assert edges[-1] == pytest.approx(780e-9 + 6e-9)
    lam = np.linspace(edges[0], edges[-1], 1001)
    idx = segment_index(lam, pump)
    assert idx.min() == 0 and idx.max() == 4
    assert np.all(np.diff(idx) >= 0)
    assert segment_index(edges[-1], pump) == 4
    assert segment_index(edges[-1] + 1e-12, pump) == -1


def test_phase_count_validation():
    pump = PumpSpec(center=780e-9, sigma=2e-9, phases=(0.0, 0.0))
    with pytest.raises(ValueError, match="segment phases"):
        pump.with_phases([0.1])
    with pytest.raises(ValueError, match="sigma"):
        PumpSpec(center=780e-9, sigma=0.0)
