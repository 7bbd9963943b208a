"""Finite-N Monte Carlo simulator of the spherical pure p-spin model."""

from .checks import CovarianceRow, GradientCheckRow, covariance_check, gradient_fd_check
from .disorder import (
    DEFAULT_ENTRY_BUDGET,
    DisorderSizeError,
    DisorderTensor,
    gradient,
    hamiltonian,
    hamiltonian_batch,
    hamiltonian_streamed,
    load_disorder,
    overlap,
    project_to_sphere,
    random_configuration,
    sample_disorder,
    save_disorder,
)
from .ground_state import GroundStateResult, ground_state_search
from .mcmc import (
    OverlapHistogram,
    RungReport,
    TemperingEnsemble,
    ThermoPoint,
    batch_means_stderr,
    default_ladder,
    mcmc_step,
    overlap_probe,
    tempering_sweep,
    thermo_integration,
)

__all__ = [
    "DEFAULT_ENTRY_BUDGET",
    "CovarianceRow",
    "DisorderSizeError",
    "DisorderTensor",
    "GradientCheckRow",
    "GroundStateResult",
    "OverlapHistogram",
    "RungReport",
    "TemperingEnsemble",
    "ThermoPoint",
    "batch_means_stderr",
    "covariance_check",
    "default_ladder",
    "gradient",
    "gradient_fd_check",
    "ground_state_search",
    "hamiltonian",
    "hamiltonian_batch",
    "hamiltonian_streamed",
    "load_disorder",
    "mcmc_step",
    "overlap",
    "overlap_probe",
    "project_to_sphere",
    "random_configuration",
    "sample_disorder",
    "save_disorder",
    "tempering_sweep",
    "thermo_integration",
]
