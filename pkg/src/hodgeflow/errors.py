"""Exception types shared across the package.

Everything raised on purpose derives from HodgeflowError so callers (and the
CLI) can tell validation and numerical failures apart from genuine bugs.
"""


class HodgeflowError(Exception):
    """Base class for all errors raised by this package."""


class InvalidComplex(HodgeflowError):
    """A complex violates a structural invariant (range, ordering, duplicates).

    The message names the offending simplex.
    """


class ClosureViolation(InvalidComplex):
    """A triangle references an edge that is not in the edge list."""


class LayerMismatch(HodgeflowError):
    """A signal's layer or length does not match the complex."""


class ClassificationAmbiguity(HodgeflowError):
    """An edge eigenvector tested positive for both the gradient and curl
    subspaces, which signals a degenerate eigensolve that the repeated
    eigenvalue handling could not repair."""


class NotRecoverable(HodgeflowError):
    """A sampling pattern fails the spectral-norm recovery condition.

    Carries the offending norm in ``norm`` and the layer in ``layer``.
    """

    def __init__(self, message, norm=None, layer=None):
        super().__init__(message)
        self.norm = norm
        self.layer = layer


class SingularSystem(HodgeflowError):
    """A linear system that recovery depends on is numerically singular."""


class BudgetTooSmall(HodgeflowError):
    """Greedy sample selection asked for fewer samples than frequencies."""


class NotPositiveDefinite(HodgeflowError):
    """A metric matrix is not symmetric positive definite."""


class NotConverged(HodgeflowError):
    """An iterative solver stopped without meeting its certificate.

    Solvers in this package prefer to return result objects with a
    ``converged`` flag; this exception exists for callers who want to
    escalate such a flag into control flow.
    """


class TStarTooLarge(HodgeflowError):
    """Requested number of triangles exceeds the number of 3-cliques."""


class Infeasible(HodgeflowError):
    """An optimization problem has no feasible point (negative radius)."""


class DisconnectedAfterRetries(HodgeflowError):
    """Random graph generation failed to produce a connected graph."""
