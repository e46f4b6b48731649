"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: configuration problems exit with 2,
solver problems with 3, and failed validation checks with 1.
"""


class ModeswimError(Exception):
    """Base class for all package errors."""


class DomainError(ModeswimError, ValueError):
    """A physical input is out of its admissible range."""


class ConfigurationError(ModeswimError, ValueError):
    """A run configuration is inconsistent or infeasible."""


class ParseError(ConfigurationError):
    """Configuration text could not be parsed."""

    def __init__(self, message, line=None, key=None):
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if key is not None:
            loc.append(f"key '{key}'")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
        self.line = line
        self.key = key


class AssemblyError(ModeswimError, RuntimeError):
    """Finite-element assembly failed (degenerate element geometry)."""


class SolverError(ModeswimError, RuntimeError):
    """Eigenvalue or response solve failed."""


class ConvergenceError(SolverError):
    """Iterative solve did not converge within its iteration cap."""


class SingularityError(SolverError):
    """Undamped harmonic response requested exactly at a resonance."""


class CalibrationError(DomainError):
    """Added-mass calibration target is unreachable."""
