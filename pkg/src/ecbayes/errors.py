"""Exception types shared across the package."""


class EcbayesError(Exception):
    """Base class for all package errors."""


class DomainError(EcbayesError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class InsufficientDataError(EcbayesError, ValueError):
    """Too few samples or draws to carry out an estimate."""


class ParseError(EcbayesError, ValueError):
    """Malformed input file or configuration document."""


class ImproperPosteriorError(EcbayesError, ValueError):
    """The requested posterior does not exist (e.g. zero residual variance)."""


class ElicitationError(EcbayesError, ValueError):
    """A guided-elicitation judgement is degenerate or undefined."""


class ConvergenceError(EcbayesError, RuntimeError):
    """MCMC failed its convergence diagnostics.

    Carries the diagnostics so callers can report them.
    """

    def __init__(self, message: str, rhat=None, ess=None):
        super().__init__(message)
        self.rhat = rhat
        self.ess = ess
