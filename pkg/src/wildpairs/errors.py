"""Exception types shared across the package."""


class FieldMismatchError(ValueError):
    """Operands live in different fields."""


class DimensionError(ValueError):
    """Matrix extents do not conform."""


class SingularMatrixError(ValueError):
    """A nonsingular matrix was required (inverse, witness, pivot)."""


class FieldTooSmallError(ValueError):
    """The field characteristic is too small for the requested method.

    Raised by the trace-form radical (needs p > algebra dimension), by the
    randomized deciders (need p >= 100 for a meaningful failure bound) and by
    the decomposition recursion.  The message says how large p must be.
    """


class BudgetExceededError(RuntimeError):
    """An exhaustive search would exceed the configured state budget."""

    def __init__(self, needed, budget):
        self.needed = needed
        self.budget = budget
        super().__init__(
            f"exhaustive search needs {needed} states, budget is {budget}"
        )


class WitnessError(ValueError):
    """A supplied witness fails verification or basic sanity."""


class AlgebraShapeError(ValueError):
    """An algebra violates a structural hypothesis; the message names it."""


class ExtractionError(RuntimeError):
    """The similarity-extraction pipeline exhausted its randomized retries."""


class SplitSearchError(RuntimeError):
    """No splitting endomorphism was found for a provably decomposable tuple
    within the retry budget; raise p or change the seed."""
