"""Exception hierarchy shared across the package."""


class LinChoiceError(Exception):
    """Base class for all domain errors raised by this package."""


class ValidationError(LinChoiceError):
    """An input object violates a structural invariant (shape, sign, normalization)."""


class RealizabilityError(LinChoiceError):
    """A preference profile admits no consistent voter embeddings in the simplex."""


class LpFailure(LinChoiceError):
    """The LP kernel could not classify a program (numerical breakdown, pivot limit)."""


class StabilityError(LinChoiceError):
    """No committee lottery could be certified stable at the required threshold."""
