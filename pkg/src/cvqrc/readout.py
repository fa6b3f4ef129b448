"""Linear readout training, prediction and evaluation metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DivergenceError

PINV_CUTOFF = 1e-10
ROLLOUT_LIMIT = 10.0


@dataclass(frozen=True)
class LinearReadout:
    """Affine readout y = w^T O + b, optionally thresholded at 0.5."""

    weights: np.ndarray
    bias: np.ndarray | float
    binary: bool = False

    def predict(self, observables: np.ndarray) -> np.ndarray:
        y = np.asarray(observables) @ self.weights + self.bias
        if self.binary:
            return (y > 0.5).astype(int)
        return y


def train_readout(
    observables: np.ndarray,
    targets: np.ndarray,
    regularization: float = 0.0,
    binary: bool = False,
) -> LinearReadout:
    """Least-squares readout on [O | 1]; ridge when regularization > 0.

    The plain solution uses a pseudoinverse with singular-value cutoff, so
    degenerate observable matrices never fail.  The ridge penalty excludes
    the bias column.
    """
    x = np.asarray(observables, dtype=float)
    y = np.asarray(targets, dtype=float)
    if x.ndim != 2 or len(x) != len(y):
        raise ValueError("one target per observable row is required")
    design = np.hstack([x, np.ones((len(x), 1))])
    if regularization > 0.0:
        gram = design.T @ design
        penalty = regularization * np.eye(design.shape[1])
        penalty[-1, -1] = 0.0
        try:
            coeffs = np.linalg.solve(gram + penalty, design.T @ y)
        except np.linalg.LinAlgError:
            coeffs = np.linalg.pinv(gram + penalty, rcond=PINV_CUTOFF) @ (design.T @ y)
    else:
        coeffs = np.linalg.pinv(design, rcond=PINV_CUTOFF) @ y
    weights, bias = coeffs[:-1], coeffs[-1]
    if np.ndim(bias) == 0:
        bias = float(bias)
    return LinearReadout(weights=weights, bias=bias, binary=binary)


def accuracy(predicted, target) -> float:
    """Fraction of matching binary values after thresholding predictions."""
    predicted = np.asarray(predicted, dtype=float)
    target = np.asarray(target)
    if predicted.size == 0:
        raise ValueError("cannot score an empty sequence")
    if predicted.shape != target.shape:
        raise ValueError("prediction and target lengths differ")
    bits = predicted > 0.5
    return float(np.mean(bits == (np.asarray(target) > 0.5)))


def capacity(predicted, target) -> float:
    """Squared Pearson correlation between prediction and target."""
    predicted = np.asarray(predicted, dtype=float)
    target = np.asarray(target, dtype=float)
    if predicted.shape != target.shape:
        raise ValueError("prediction and target lengths differ")
    if predicted.std() == 0.0 or target.std() == 0.0:
        raise ValueError("correlation undefined for a constant sequence")
    corr = np.corrcoef(predicted, target)[0, 1]
    return float(min(corr * corr, 1.0))


def closed_loop_forecast(
    ensemble,
    readout: LinearReadout,
    seed_inputs: np.ndarray,
    horizon: int,
    initial_features: np.ndarray | None = None,
) -> np.ndarray:
    """Autoregressive rollout: each prediction becomes the next input.

    The ensemble is first driven open loop through ``seed_inputs``; the
    readout (trained on one-step-ahead targets) then closes the loop for
    ``horizon`` steps.  Callers that already drove the ensemble pass the
    features of its last step as ``initial_features`` instead of a seed
    window.  Raises DivergenceError if the rollout leaves the normalized
    input range.
    """
    if horizon < 1:
        raise ValueError("forecast horizon must be at least 1")
    features = initial_features
    for s in np.asarray(seed_inputs, dtype=float):
        features = ensemble.step_all(s)
    if features is None:
        raise ValueError("seed window must contain at least one input")
    predictions = []
    x = readout.predict(features)
    for k in range(horizon):
        if np.any(np.abs(x) > ROLLOUT_LIMIT):
            raise DivergenceError(f"closed-loop rollout diverged at step {k}")
        predictions.append(np.atleast_1d(x))
        features = ensemble.step_all(x)
        x = readout.predict(features)
    return np.asarray(predictions)
