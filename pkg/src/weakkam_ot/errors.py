"""Exception types shared across modules."""


class DomainError(ValueError):
    """Input outside the domain of an operation (bad shape, mass, index...)."""


class PreconditionError(ValueError):
    """A checked hypothesis of a statement does not hold for the input."""


class SolverError(RuntimeError):
    """A numerical routine failed to converge or returned an infeasible answer."""


class TheoremViolation(RuntimeError):
    """A certificate that should hold by a proved statement came out false."""


class ConfigError(ValueError):
    """Malformed scenario or model configuration."""


class ModelError(ValueError):
    """A model-level computation contradicts its own cross-check."""
