"""Contains budgetid-specific exceptions and warnings."""


class BudgetIdException(Exception):
    """Base budgetid exception."""


class InvalidParameterError(BudgetIdException, ValueError):
    """A family parameter or a mean lies outside of its domain."""


class DegenerateInstanceError(BudgetIdException):
    """The instance has no unique correct answer (tied means, a mean
    exactly on the threshold, a point on the separating hyperplane).

    """


class InvalidWeightsError(BudgetIdException):
    """The sampling proportions are not a point of the (interior of
    the) simplex.

    """


class UnsupportedError(BudgetIdException):
    """The requested combination of task, family and algorithm is not
    supported.

    """


class OptimizerFailure(BudgetIdException):
    """The maximin solver did not close its duality gap within the
    iteration cap.

    Parameters
    ----------
    message : str
      Human readable description.

    diagnostics : dict or None (default=None)
      Solver state at the time of failure, e.g. the best lower and
      upper bounds, the relative gap and the number of iterations.

    """
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class InvalidConstructionError(BudgetIdException):
    """A corner construction violates one of its invariants."""


class InvalidInputError(BudgetIdException):
    """An input is out of range, e.g. an empty alternative set."""


class PreconditionError(BudgetIdException):
    """A hypothesis required by a bound is not satisfied."""


class TrackingInvariantError(BudgetIdException):
    """A tracked pull count drifted more than K away from its target."""


class ConfigError(BudgetIdException):
    """The experiment config is malformed or refers to an unsupported
    combination.

    """


class BudgetIdWarning(UserWarning):
    """Base budgetid warning."""


class NearDegeneracyWarning(BudgetIdWarning):
    """The instance is legal but its margin to degeneracy is tiny."""


class PreAsymptoticWarning(BudgetIdWarning):
    """The estimated error probability is at least 1/2, so the
    empirical rate carries no information.

    """
