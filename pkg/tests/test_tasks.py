import numpy as np
import pytest

from cvqrc.exceptions import DivergenceError
from cvqrc.tasks import (
    DoubleScrollState,
    TaskDataset,
    double_scroll_dataset,
    double_scroll_trajectory,
    memory_dataset,
    parity_dataset,
    xor_dataset,
)


class TestBinaryDatasets:
    def test_xor_definition(self):
        ds = TaskDataset(
            inputs=np.array([0, 1, 1, 0]),
            targets=np.array([0, 1, 0, 1]),
            washout=1,
        )
        bits = ds.inputs
        expected = bits[1:] ^ bits[:-1]
        assert np.array_equal(ds.targets[1:], expected)

    def test_xor_generated_targets(self):
        ds = xor_dataset(200, seed=1)
        assert np.array_equal(ds.targets[1:], ds.inputs[1:] ^ ds.inputs[:-1])
        assert ds.washout == 1
        assert set(np.unique(ds.inputs)) <= {0, 1}

    def test_all_zero_inputs_give_all_zero_targets(self):
        ds = xor_dataset(50, seed=0)
        zero = TaskDataset(np.zeros(50, int), np.zeros(50, int), washout=1)
        assert np.array_equal(zero.targets, np.zeros(50))
        assert ds.targets.shape == (50,)

    def test_parity_tau_one_reduces_to_xor(self):
        xor = xor_dataset(300, seed=7)
        parity = parity_dataset(300, tau=1, seed=7)
        assert np.array_equal(xor.inputs, parity.inputs)
        assert np.array_equal(xor.targets[1:], parity.targets[1:])

    def test_parity_window_definition(self):
        # for inputs [1, 1, 0, 1] and tau = 2 the target at k = 3 is
        # 1 xor 0 xor 1 = 0
        bits = np.array([1, 1, 0, 1])
        assert (bits[3] ^ bits[2] ^ bits[1]) == 0
        ds = parity_dataset(200, tau=2, seed=0)
        for k in range(2, 200):
            assert ds.targets[k] == ds.inputs[k] ^ ds.inputs[k - 1] ^ ds.inputs[k - 2]
        assert ds.washout == 2

    def test_split_validation(self):
        ds = xor_dataset(30, seed=0)
        with pytest.raises(ValueError, match="split"):
            TaskDataset(ds.inputs, ds.targets, washout=5, split=3)
        split_ds = ds.with_split(10)
        assert split_ds.split == 11


class TestMemoryDataset:
    def test_zero_delay_is_identity(self):
        ds = memory_dataset(100, tau=0, seed=3)
        assert np.array_equal(ds.inputs, ds.targets)
        assert ds.washout == 0

    def test_delayed_targets(self):
        ds = memory_dataset(100, tau=3, seed=3)
        assert np.array_equal(ds.targets[3:], ds.inputs[:-3])
        assert ds.washout == 3

    def test_uniform_marginal(self):
        ds = memory_dataset(10_000, tau=1, seed=11)
        assert abs(ds.inputs.mean()) < 0.05
        assert ds.inputs.min() >= -1.0 and ds.inputs.max() <= 1.0


class TestDoubleScroll:
    def test_origin_is_exact_fixed_point(self):
        traj = double_scroll_trajectory(DoubleScrollState(0.0, 0.0, 0.0), 100)
        assert np.max(np.abs(traj)) < 1e-12

    def test_one_sample_against_fine_step_oracle(self):
        coarse = double_scroll_trajectory(DoubleScrollState(0.1, 0.0, 0.0), 1, dt=0.01)
        fine = double_scroll_trajectory(DoubleScrollState(0.1, 0.0, 0.0), 1, dt=0.001)
        assert np.max(np.abs(coarse[1] - fine[1])) < 1e-6

    def test_long_trajectory_bounded_and_aperiodic(self):
        traj = double_scroll_trajectory(DoubleScrollState(0.1, 0.2, 0.3), 10_000)
        body = traj[500:]
        assert np.max(np.abs(body[:, :2])) < 3.0
        assert np.max(np.abs(body[:, 2])) < 3.0
        # no near-recurrence: minimum pairwise distance on a subsample
        sub = body[:: 7]
        best = np.inf
        for i in range(len(sub) - 1):
            d = np.linalg.norm(sub[i + 1 :] - sub[i], axis=1)
            best = min(best, d.min())
        assert best > 1e-3

    def test_substep_guard(self):
        with pytest.raises(ValueError, match="substep"):
            double_scroll_trajectory(DoubleScrollState(0.1, 0.0, 0.0), 1, dt=0.1)

    def test_divergence_guard(self):
        with np.errstate(over="ignore", invalid="ignore"):
            with pytest.raises(DivergenceError, match="diverged"):
                double_scroll_trajectory(DoubleScrollState(3.0, -3.0, 0.0), 5)

    def test_forecast_dataset_scaling(self):
        ds = double_scroll_dataset(train=200, test=50, washout=20)
        assert ds.split == 220
        train_rows = ds.inputs[20:221]
        assert train_rows.min() >= -1.0 - 1e-12
        assert train_rows.max() <= 1.0 + 1e-12
        assert np.array_equal(ds.targets[:-1], ds.inputs[1:])
