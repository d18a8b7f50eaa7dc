#!/usr/bin/env python3

"""Exceptions raised by darkladder.

Everything derives from DarkLadderError so scan and ensemble runners can
record a failed point and move on.
"""


class DarkLadderError(Exception):
    """Base class for all darkladder errors."""


class DimensionError(DarkLadderError, ValueError):
    """Operator/space dimensions do not fit together."""


class ParameterError(DarkLadderError, ValueError):
    """A physical parameter is outside its allowed range."""


class ConfigError(DarkLadderError, ValueError):
    """Configuration file or override could not be parsed or validated."""

    def __init__(self, message, key=None):
        self.key = key
        if key is not None:
            message = f"{key}: {message}"
        super(ConfigError, self).__init__(message)


class DegenerateSteadyStateError(DarkLadderError, RuntimeError):
    """The Liouvillian null space has dimension > 1."""

    def __init__(self, null_dim):
        self.null_dim = null_dim
        super(DegenerateSteadyStateError, self).__init__(
            f"steady state is not unique (null space dimension {null_dim})"
        )


class ConvergenceError(DarkLadderError, RuntimeError):
    """A solver or fit did not converge."""

    def __init__(self, message, diagnostics=None):
        self.diagnostics = dict(diagnostics or {})
        super(ConvergenceError, self).__init__(message)


class StiffnessError(DarkLadderError, RuntimeError):
    """Step size underflow in a time integrator."""


class ZeroPhotonError(DarkLadderError, ValueError):
    """Steady-state photon number too small to normalize a correlation."""


class DarkStateError(DarkLadderError, ZeroDivisionError):
    """Excited-state population vanishes, the figure of merit is unbounded."""


class DegenerateFitError(DarkLadderError, ValueError):
    """Input data carries no information for the requested fit."""
