"""Exception types raised by the numerical routines."""


class NumericalError(RuntimeError):
    """Base class for failures of an iterative or direct numerical method."""


class NonConvergence(NumericalError):
    """An iteration hit its cap before meeting its convergence criterion."""


class Breakdown(NumericalError):
    """A direct method hit an exactly (or numerically) singular pivot."""


class SingularJacobian(NumericalError):
    """Newton correction step met a numerically singular Jacobian."""


class InfiniteEigenvalue(NumericalError):
    """An operation that needs a finite eigenvalue received an infinite one."""


class NotAnEigenvector(NumericalError):
    """A vector expected to be an eigenvector fails its residual check."""


class NoMatch(LookupError):
    """Structure search (e.g. block permutation discovery) found no candidate."""


class DomainError(ValueError):
    """An evaluation point lies outside the domain of the requested object."""
