"""Exception types shared across the package."""


class ScfluxError(Exception):
    """Base class for all package errors."""


class GridError(ScfluxError):
    """Invalid grid specification (zero cell count, non-positive spacing)."""


class ConfigError(ScfluxError):
    """Malformed or inconsistent configuration input."""


class DivergenceError(ScfluxError):
    """Numerical blow-up detected during time integration."""

    def __init__(self, step, tau, edge=None, message=None):
        self.step = step
        self.tau = tau
        self.edge = edge
        if message is None:
            where = f", first offending edge {edge}" if edge is not None else ""
            message = f"non-finite field value at step {step} (tau={tau:.6g}){where}"
        super().__init__(message)


class EigensolveError(ScfluxError):
    """Eigenvalue iteration did not converge."""


class ProbeError(ScfluxError):
    """Probe definition inconsistent with the mesh or run."""


class FitError(ScfluxError):
    """Profile fit preconditions violated (too few or invalid samples)."""


class SupercriticalError(ScfluxError):
    """Requested junction current exceeds the critical current."""


class SourceError(ScfluxError):
    """Ill-formed source specification."""
