"""Polariton Lambda systems in driven circuit QED, STIRAP and counterdiabatic (saSTIRAP) transfer.

Modules:

* ``linalg``: Hermitian Jacobi eigensolver, Kronecker products, PSD square root
* ``cqed``: driven Jaynes-Cummings Hamiltonian, polariton basis, transition table
* ``pulses``: Gaussian envelopes, mixing angle, counterdiabatic drive, 3x3 Hamiltonian
* ``lindblad``: RK4 master-equation integrator and Uhlmann fidelity
* ``experiments``: protocol runs, 2-D sweeps, transition-table comparison
* ``config`` / ``cli``: INI config files and the ``cqed-stirap`` command
"""

from .cqed import SystemParams, lambda_system, polariton_basis, transition_table
from .errors import (
    ConfigError,
    CqedStirapError,
    IntegratorDivergedError,
    InvalidInputError,
    NestingError,
    NotPSDError,
    TruncationError,
    UndefinedAngleError,
)
from .experiments import ProtocolConfig, reproduce_table1, run_protocol, sweep2d
from .lindblad import IntegratorConfig, LindbladModel, fidelity, integrate
from .pulses import DriveConfig, PulseSchedule

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "CqedStirapError", "DriveConfig", "IntegratorConfig",
    "IntegratorDivergedError", "InvalidInputError", "LindbladModel", "NestingError",
    "NotPSDError", "ProtocolConfig", "PulseSchedule", "SystemParams", "TruncationError",
    "UndefinedAngleError", "fidelity", "integrate", "lambda_system", "polariton_basis",
    "reproduce_table1", "run_protocol", "sweep2d", "transition_table",
]
