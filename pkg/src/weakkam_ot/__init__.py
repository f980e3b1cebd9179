"""Lax-Oleinik operators, Kantorovich duality and weak KAM numerics on finite spaces and flat tori."""

__version__ = "0.1.0"

from .errors import (ConfigError, DomainError, ModelError, PreconditionError, SolverError,
                     TheoremViolation)
from .space_core import FiniteSpace, ProbMeasure, TorusGrid, TransportPlan
from .action import FREE, PENDULUM, LagrangianModel

__all__ = [
    "ConfigError", "DomainError", "ModelError", "PreconditionError", "SolverError",
    "TheoremViolation", "FiniteSpace", "ProbMeasure", "TorusGrid", "TransportPlan",
    "FREE", "PENDULUM", "LagrangianModel", "__version__",
]
