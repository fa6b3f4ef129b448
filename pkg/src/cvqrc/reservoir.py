"""Feedback-driven reservoir dynamics on measured covariance elements.

At each timestep the scalar (or vector) input and the previous measured
observables set the pump segment phases; the resulting covariance matrix is
sampled into an observable vector, optionally min-max normalized and
corrupted by additive Gaussian measurement noise.  The noisy values are
what feeds back: the reservoir remembers what it measured, not what the
ideal model would have produced.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng as rng_module

KERNEL_RANK_TOLERANCE = 1e-4


# ---------------------------------------------------------------------------
# observables


@dataclass(frozen=True)
class ObservableSelection:
    """Which covariance elements are measured and how they are scaled.

    ``elements`` are (i, j) index pairs with i <= j over the 2n quadratures
    in grouped ordering (q_1..q_n, p_1..p_n).  ``normalization`` is either
    ``"raw"`` or ``"minmax"`` (affine map of each observable to [0, 1] over
    its reachable range).
    """

    n: int
    elements: tuple[tuple[int, int], ...]
    normalization: str = "minmax"

    def __post_init__(self) -> None:
        if self.normalization not in ("raw", "minmax"):
            raise ValueError(f"unknown normalization {self.normalization!r}")
        dim = 2 * self.n
        elements = tuple((int(i), int(j)) for i, j in self.elements)
        object.__setattr__(self, "elements", elements)
        if len(elements) > self.n * (2 * self.n + 1):
            raise ValueError("more elements than unique covariance entries")
        for i, j in elements:
            if not (0 <= i <= j < dim):
                raise ValueError(f"element ({i}, {j}) out of range for n={self.n}")

    @classmethod
    def single_mode(cls, normalization: str = "minmax") -> "ObservableSelection":
        """The n = 1 set: q variance, p variance, qp cross term."""
        return cls(1, ((0, 0), (1, 1), (0, 1)), normalization)

    @classmethod
    def all_elements(cls, n: int, normalization: str = "minmax") -> "ObservableSelection":
        """All n(2n + 1) unique covariance entries, row-major upper triangle."""
        elements = tuple(
            (i, j) for i in range(2 * n) for j in range(i, 2 * n)
        )
        return cls(n, elements, normalization)

    @property
    def size(self) -> int:
        return len(self.elements)

    def labels(self) -> list[str]:
        def name(k: int) -> str:
            return f"q{k + 1}" if k < self.n else f"p{k - self.n + 1}"

        return [f"{name(i)}{name(j)}" for i, j in self.elements]

    def extract(self, sigma: np.ndarray) -> np.ndarray:
        rows, cols = zip(*self.elements)
        return np.asarray(sigma)[rows, cols]

    def index_of(self, element: tuple[int, int]) -> int:
        return self.elements.index(element)


@dataclass(frozen=True)
class Normalizer:
    """Affine map of each observable onto [0, 1] given its extremes."""

    lo: np.ndarray
    hi: np.ndarray

    def __call__(self, values: np.ndarray) -> np.ndarray:
        return (values - self.lo) / (self.hi - self.lo)

    @classmethod
    def exact_phase_extremes(cls, model, selection: ObservableSelection) -> "Normalizer":
        """Exact extremes for a global-phase covariance model.

        Every element of such a covariance is c0 + c1 cos(2 delta) +
        c2 sin(2 delta); three evaluations recover the coefficients and the
        extremes over a full phase period are c0 -+ hypot(c1, c2).
        """
        x0 = selection.extract(model.covariance([0.0]))
        x45 = selection.extract(model.covariance([np.pi / 4]))
        x90 = selection.extract(model.covariance([np.pi / 2]))
        c0 = 0.5 * (x0 + x90)
        radius = np.hypot(0.5 * (x0 - x90), x45 - c0)
        if np.any(radius <= 0.0):
            dead = selection.labels()[int(np.argmin(radius))]
            raise ValueError(f"observable {dead} is constant; cannot normalize")
        return cls(lo=c0 - radius, hi=c0 + radius)

    @classmethod
    def from_batch(
        cls,
        samples: np.ndarray,
        labels: list[str] | None = None,
        margin: float = 0.05,
    ) -> "Normalizer":
        """Extremes of a calibration batch, widened by a relative margin.

        The margin keeps on-trajectory values inside [0, 1] even though a
        finite random batch underestimates the true extremes.
        """
        samples = np.asarray(samples, dtype=float)
        lo = samples.min(axis=0)
        hi = samples.max(axis=0)
        spread = hi - lo
        if np.any(spread <= 0.0):
            idx = int(np.argmin(spread))
            name = labels[idx] if labels else f"column {idx}"
            raise ValueError(f"observable {name} is constant; cannot normalize")
        return cls(lo=lo - margin * spread, hi=hi + margin * spread)


# ---------------------------------------------------------------------------
# encoding


@dataclass(frozen=True)
class EncodingParams:
    """Input/feedback-to-phase map of one reservoir.

    The drive for segment i is ``alpha_i s + beta_i + (mask @ feedback)_i``.
    With ``v_pi_half`` set the drive composes in volts and converts to a
    phase through the modulator calibration delta = (pi/2) V / V_(pi/2) +
    offset; otherwise the drive is already a phase in radians.
    """

    alpha: np.ndarray
    beta: np.ndarray
    mask: np.ndarray
    v_pi_half: float | None = None
    offset: float = 0.0

    def __post_init__(self) -> None:
        alpha = np.atleast_1d(np.asarray(self.alpha, dtype=float))
        beta = np.atleast_1d(np.asarray(self.beta, dtype=float))
        mask = np.atleast_2d(np.asarray(self.mask, dtype=float))
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "mask", mask)
        if beta.shape != alpha.shape or mask.shape[0] != alpha.size:
            raise ValueError("alpha, beta and mask row count must agree")
        if self.v_pi_half is not None and self.v_pi_half <= 0:
            raise ValueError("V_(pi/2) must be positive")

    @property
    def segments(self) -> int:
        return int(self.alpha.size)

    @property
    def feedback_dim(self) -> int:
        return int(self.mask.shape[1])


def phase_from_voltage(volts, params: EncodingParams):
    """Modulator calibration delta(V) = (pi/2) V / V_(pi/2) + offset."""
    if params.v_pi_half is None:
        raise ValueError("this encoding has no voltage semantics")
    return (np.pi / 2.0) * np.asarray(volts) / params.v_pi_half + params.offset


def encode_phases(s, feedback: np.ndarray, params: EncodingParams) -> np.ndarray:
    """Pump segment phases for input ``s`` given the previous observables.

    Vector inputs shorter than the segment count are distributed
    cyclically over the segments.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    n = params.segments
    if s.size > n:
        raise ValueError(f"input dimension {s.size} exceeds {n} pump segments")
    feedback = np.asarray(feedback, dtype=float)
    if feedback.size != params.feedback_dim:
        raise ValueError(
            f"feedback vector has size {feedback.size}, mask expects "
            f"{params.feedback_dim}"
        )
    drive = params.alpha * s[np.arange(n) % s.size] + params.beta
    drive = drive + params.mask @ feedback
    if params.v_pi_half is not None:
        return phase_from_voltage(drive, params)
    return drive + params.offset


# ---------------------------------------------------------------------------
# reservoirs


@dataclass(frozen=True)
class NoiseModel:
    """Additive i.i.d. Gaussian noise per observable per step."""

    std: np.ndarray | float
    seed: int = 0

    def __post_init__(self) -> None:
        std = np.asarray(self.std, dtype=float)
        object.__setattr__(self, "std", std)
        if np.any(std < 0):
            raise ValueError("noise standard deviations must be non-negative")


@dataclass
class ReservoirState:
    """Feedback vector entering the current step, plus the step index."""

    previous: np.ndarray
    k: int = 0


class Reservoir:
    """Stateless map (input, feedback) -> normalized observable vector."""

    def __init__(
        self,
        params: EncodingParams,
        selection: ObservableSelection,
        model,
        normalizer: Normalizer | None = None,
    ):
        if params.segments != model.segments:
            raise ValueError("encoding and covariance model disagree on segments")
        if selection.normalization == "minmax" and normalizer is None:
            raise ValueError("min-max selection requires a calibrated normalizer")
        self.params = params
        self.selection = selection
        self.model = model
        self.normalizer = normalizer

    def observables(self, s, feedback: np.ndarray) -> np.ndarray:
        phases = encode_phases(s, feedback, self.params)
        values = self.selection.extract(self.model.covariance(phases))
        if self.selection.normalization == "minmax":
            values = self.normalizer(values)
        return values


class MultiplexEnsemble:
    """R reservoirs sharing the input stream, with cross-reservoir feedback.

    ``feedback_mode``:
        * ``"qq"``: the feedback vector is the measured q-variance of every
          reservoir (each mask therefore has R columns).  Vector inputs are
          distributed one channel per reservoir, cyclically.
        * ``"self"``: single reservoir (R = 1) fed back its own full
          observable vector; vector inputs go to the pump segments.

    Stepping is sequential in time; reservoirs within a step draw noise
    from per-reservoir streams, so results do not depend on evaluation
    order.
    """

    def __init__(
        self,
        reservoirs: list[Reservoir],
        noise: NoiseModel | None = None,
        feedback_mode: str = "qq",
    ):
        if feedback_mode not in ("qq", "self"):
            raise ValueError(f"unknown feedback mode {feedback_mode!r}")
        if feedback_mode == "self" and len(reservoirs) != 1:
            raise ValueError("self-feedback supports a single reservoir")
        selection = reservoirs[0].selection
        for res in reservoirs:
            if res.selection is not selection and res.selection != selection:
                raise ValueError("all reservoirs must share one selection")
        self.reservoirs = reservoirs
        self.selection = selection
        self.noise = noise
        self.feedback_mode = feedback_mode
        if feedback_mode == "qq":
            self._qq_index = selection.index_of((0, 0))
            expected = len(reservoirs)
        else:
            expected = selection.size
        for res in reservoirs:
            if res.params.feedback_dim != expected:
                raise ValueError(
                    f"mask expects {res.params.feedback_dim} feedback values, "
                    f"ensemble provides {expected}"
                )
        self.reset()

    @property
    def size(self) -> int:
        return len(self.reservoirs)

    @property
    def feature_dim(self) -> int:
        return self.size * self.selection.size

    def reset(self, initial_feedback: np.ndarray | None = None) -> None:
        """Zero the feedback state and rewind the noise streams."""
        dim = self.size if self.feedback_mode == "qq" else self.selection.size
        previous = (
            np.zeros(dim) if initial_feedback is None else np.asarray(initial_feedback)
        )
        if previous.size != dim:
            raise ValueError(f"initial feedback must have size {dim}")
        self._state = ReservoirState(previous.astype(float).copy(), 0)
        self._noise_rngs = [
            rng_module.stream(self.noise.seed, f"reservoir-{r}")
            if self.noise is not None
            else None
            for r in range(self.size)
        ]

    def _input_for(self, r: int, s) -> np.ndarray | float:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if self.feedback_mode == "qq":
            return float(s[r % s.size])
        return s

    def step_all(self, s) -> np.ndarray:
        """Advance every reservoir one step; returns the feature vector."""
        feedback = self._state.previous
        features = np.empty(self.feature_dim)
        width = self.selection.size
        for r, res in enumerate(self.reservoirs):
            obs = res.observables(self._input_for(r, s), feedback)
            rng = self._noise_rngs[r]
            if rng is not None:
                obs = obs + rng.normal(0.0, 1.0, size=obs.size) * self.noise.std
            features[r * width : (r + 1) * width] = obs
        if self.feedback_mode == "qq":
            next_feedback = features[self._qq_index :: width].copy()
        else:
            next_feedback = features.copy()
        self._state = ReservoirState(next_feedback, self._state.k + 1)
        return features


def run_sequence(inputs, ensemble: MultiplexEnsemble, washout: int) -> np.ndarray:
    """Drive the ensemble over ``inputs``; rows before ``washout`` are dropped."""
    inputs = np.asarray(inputs, dtype=float)
    if washout >= len(inputs):
        raise ValueError("washout must be shorter than the input sequence")
    rows = [ensemble.step_all(s) for s in inputs]
    return np.asarray(rows)[washout:]


# ---------------------------------------------------------------------------
# calibration and diagnostics


def fit_noise(phases, values, model_covariances) -> NoiseModel:
    """Least-squares fit of per-observable noise std from repeated scans.

    ``phases`` holds the encoding phase of each record, ``values`` the
    measured observable vectors (one row per record) and
    ``model_covariances(phase)`` the noiseless model prediction.  With the
    means pinned to the model, the least-squares Gaussian spread per
    observable is the root mean square residual.
    """
    phases = np.asarray(phases, dtype=float)
    values = np.atleast_2d(np.asarray(values, dtype=float))
    if phases.size != values.shape[0]:
        raise ValueError("one phase per observation row is required")
    _, counts = np.unique(phases, return_counts=True)
    if np.any(counts < 2):
        raise ValueError("need at least two repetitions per phase point")
    predicted = np.asarray([model_covariances(p) for p in phases])
    residuals = values - predicted
    return NoiseModel(std=np.sqrt(np.mean(residuals**2, axis=0)))


def kernel_quality(matrix: np.ndarray, eps: float = KERNEL_RANK_TOLERANCE) -> int:
    """Rank of the standardized observables-vs-time matrix.

    Columns are z-scored before the singular value decomposition so affine
    copies of another observable collapse onto it; constant columns are
    dropped (they contribute nothing).  The rank is the number of singular
    values above ``eps``.
    """
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    std = matrix.std(axis=0)
    scale = np.maximum(np.abs(matrix).max(axis=0), 1.0)
    keep = std > 1e-12 * scale
    if not np.any(keep):
        return 0
    standardized = (matrix[:, keep] - matrix[:, keep].mean(axis=0)) / std[keep]
    singular_values = np.linalg.svd(standardized, compute_uv=False)
    return int(np.sum(singular_values > eps))
