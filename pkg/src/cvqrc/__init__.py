"""Numerical twin of a continuous-variable optical quantum reservoir computer.

The package models multimode squeezed-light generation in a pumped
nonlinear waveguide, feedback-driven reservoir dynamics with phase
encoding, and the training/evaluation pipeline for temporal learning
tasks.
"""

from .backends import AnalyticCovariance, PipelineCovariance
from .crystal import (
    CrystalSpec,
    constant_index_crystal,
    load_crystal,
    optimal_poling_period,
    phase_mismatch,
    sellmeier_index,
)
from .jsa import JointSpectralAmplitude, SpectralGrid, build_jsa, default_grids
from .measurement import (
    CovarianceMatrix,
    MeasurementBasis,
    build_measurement_matrix,
    covariance_in_basis,
    frexel_half_span,
    global_phase_covariance,
    omega,
    supermode_basis,
    symplectic_from_unitary,
)
from .pump import PumpSpec, pump_amplitude
from .readout import (
    LinearReadout,
    accuracy,
    capacity,
    closed_loop_forecast,
    train_readout,
)
from .reservoir import (
    EncodingParams,
    MultiplexEnsemble,
    NoiseModel,
    Normalizer,
    ObservableSelection,
    Reservoir,
    ReservoirState,
    encode_phases,
    fit_noise,
    kernel_quality,
    phase_from_voltage,
    run_sequence,
)
from .schmidt import SchmidtDecomposition, schmidt_decompose
from .tasks import (
    DoubleScrollState,
    TaskDataset,
    double_scroll_dataset,
    double_scroll_trajectory,
    memory_dataset,
    parity_dataset,
    xor_dataset,
)

__version__ = "0.1.0"

__all__ = [
    "AnalyticCovariance",
    "CovarianceMatrix",
    "CrystalSpec",
    "DoubleScrollState",
    "EncodingParams",
    "JointSpectralAmplitude",
    "LinearReadout",
    "MeasurementBasis",
    "MultiplexEnsemble",
    "NoiseModel",
    "Normalizer",
    "ObservableSelection",
    "PipelineCovariance",
    "PumpSpec",
    "Reservoir",
    "ReservoirState",
    "SchmidtDecomposition",
    "SpectralGrid",
    "TaskDataset",
    "accuracy",
    "build_jsa",
    "build_measurement_matrix",
    "capacity",
    "closed_loop_forecast",
    "constant_index_crystal",
    "covariance_in_basis",
    "default_grids",
    "double_scroll_dataset",
    "double_scroll_trajectory",
    "encode_phases",
    "fit_noise",
    "frexel_half_span",
    "global_phase_covariance",
    "kernel_quality",
    "load_crystal",
    "memory_dataset",
    "omega",
    "optimal_poling_period",
    "parity_dataset",
    "phase_from_voltage",
    "phase_mismatch",
    "pump_amplitude",
    "run_sequence",
    "schmidt_decompose",
    "sellmeier_index",
    "supermode_basis",
    "symplectic_from_unitary",
    "train_readout",
    "xor_dataset",
]
