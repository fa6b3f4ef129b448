"""Benchmark task datasets: temporal XOR, parity, linear memory, double scroll."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .exceptions import DivergenceError
from .rng import stream

DOUBLE_SCROLL_R1 = 1.2
DOUBLE_SCROLL_R2 = 3.44
DOUBLE_SCROLL_R4 = 0.193
DOUBLE_SCROLL_BETA = 11.6
DOUBLE_SCROLL_IR = 2.25e-5

DIVERGENCE_LIMIT = 1e3


@dataclass(frozen=True)
class TaskDataset:
    """Input/target sequences with washout and (optional) train/test split.

    ``split`` is the absolute index of the first test element; rows in
    [washout, split) train the readout and rows [split:] evaluate it.
    """

    inputs: np.ndarray
    targets: np.ndarray
    washout: int
    split: int | None = None

    def __post_init__(self) -> None:
        inputs = np.asarray(self.inputs)
        targets = np.asarray(self.targets)
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "targets", targets)
        if len(targets) != len(inputs):
            raise ValueError("inputs and targets must have equal length")
        if self.split is not None and not (self.washout < self.split <= len(inputs)):
            raise ValueError("split index must lie past the washout")

    def with_split(self, train: int) -> "TaskDataset":
        return dataclasses.replace(self, split=self.washout + train)


def xor_dataset(length: int, seed: int) -> TaskDataset:
    """Binary stream with target s_k XOR s_(k-1)."""
    if length < 2:
        raise ValueError("XOR needs at least two steps")
    bits = stream(seed, "task-bits").integers(0, 2, size=length)
    targets = np.zeros(length, dtype=int)
    targets[1:] = bits[1:] ^ bits[:-1]
    return TaskDataset(inputs=bits, targets=targets, washout=1)


def parity_dataset(length: int, tau: int, seed: int) -> TaskDataset:
    """Binary stream with target XOR over the last tau+1 inputs.

    tau = 1 reproduces the temporal XOR stream bit for bit.
    """
    if tau < 1:
        raise ValueError("parity delay must be at least 1")
    if length < tau + 1:
        raise ValueError("sequence shorter than the parity window")
    bits = stream(seed, "task-bits").integers(0, 2, size=length)
    targets = np.zeros(length, dtype=int)
    for k in range(tau, length):
        targets[k] = np.bitwise_xor.reduce(bits[k - tau : k + 1])
    return TaskDataset(inputs=bits, targets=targets, washout=tau)


def memory_dataset(length: int, tau: int, seed: int) -> TaskDataset:
    """Uniform [-1, 1] stream with target s_(k - tau)."""
    if tau < 0:
        raise ValueError("memory delay must be non-negative")
    if length <= tau:
        raise ValueError("sequence shorter than the recall delay")
    values = stream(seed, "task-values").uniform(-1.0, 1.0, size=length)
    targets = np.zeros(length)
    targets[tau:] = values[: length - tau] if tau else values
    return TaskDataset(inputs=values, targets=targets, washout=tau)


@dataclass(frozen=True)
class DoubleScrollState:
    """State (V1, V2, I) of the chaotic double-scroll circuit."""

    v1: float
    v2: float
    i: float

    def as_array(self) -> np.ndarray:
        return np.array([self.v1, self.v2, self.i], dtype=float)


def double_scroll_rhs(state: np.ndarray) -> np.ndarray:
    v1, v2, i = state
    dv = v1 - v2
    junction = 2.0 * DOUBLE_SCROLL_IR * np.sinh(DOUBLE_SCROLL_BETA * dv)
    return np.array(
        [
            v1 / DOUBLE_SCROLL_R1 - dv / DOUBLE_SCROLL_R2 - junction,
            dv / DOUBLE_SCROLL_R2 + junction - i,
            v2 - DOUBLE_SCROLL_R4 * i,
        ]
    )


def double_scroll_trajectory(
    initial: DoubleScrollState,
    steps: int,
    sample_interval: float = 1.0,
    dt: float = 0.01,
) -> np.ndarray:
    """Integrate the circuit with fixed-step RK4, sampling every interval.

    Returns (steps + 1, 3) states including the initial one.  The sinh
    junction is stiff, so substeps above 0.05 are rejected; trajectories
    leaving |state| < 1e3 raise DivergenceError.
    """
    if dt > 0.05:
        raise ValueError("substep too coarse for the sinh nonlinearity (dt <= 0.05)")
    substeps = max(1, round(sample_interval / dt))
    h = sample_interval / substeps
    state = initial.as_array()
    out = np.empty((steps + 1, 3))
    out[0] = state
    # sinh overflow on a diverging trajectory is caught by the guard below
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, steps + 1):
            for _ in range(substeps):
                k1 = double_scroll_rhs(state)
                k2 = double_scroll_rhs(state + 0.5 * h * k1)
                k3 = double_scroll_rhs(state + 0.5 * h * k2)
                k4 = double_scroll_rhs(state + h * k3)
                state = state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not np.all(np.abs(state) <= DIVERGENCE_LIMIT):
                raise DivergenceError(f"double-scroll state diverged at sample {k}")
            out[k] = state
    return out


def double_scroll_dataset(
    train: int,
    test: int,
    washout: int,
    initial: DoubleScrollState = DoubleScrollState(0.1, 0.2, 0.3),
    burn_in: int = 500,
) -> TaskDataset:
    """One-step-ahead forecasting dataset from a double-scroll run.

    The trajectory is sampled after a burn-in, then min-max normalized per
    channel to [-1, 1] using the training rows only.  Targets are the
    inputs shifted one step into the future.
    """
    total = washout + train + test + 1
    states = double_scroll_trajectory(initial, burn_in + total)[burn_in:]
    train_rows = states[washout : washout + train + 1]
    lo = train_rows.min(axis=0)
    hi = train_rows.max(axis=0)
    scaled = 2.0 * (states - lo) / (hi - lo) - 1.0
    return TaskDataset(
        inputs=scaled[:-1],
        targets=scaled[1:],
        washout=washout,
        split=washout + train,
    )
