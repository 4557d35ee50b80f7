"""Adaptive Trotter evolution of driven spin chains."""

from ._core import (
    BranchError,
    ConfigError,
    ConvergenceError,
    DimensionError,
    DriveSchedule,
    HamiltonianSpec,
    NumericalError,
    PauliOperator,
    StepPolicy,
    StepRecord,
    ToleranceSet,
    TraceLog,
    __version__,
    initial_state,
    load_config,
    magnetization,
    piecewise_hamiltonian,
    run_adaptive,
    run_config,
    run_fixed,
    static_operators,
    truncation_error_norm,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
