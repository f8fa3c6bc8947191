"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested operation."""


class DimensionError(ValueError):
    """Inputs have incompatible shapes."""


class DegenerateVarianceError(ValueError):
    """A coordinate has zero (or non-finite) sample variance.

    ``coordinate`` is the zero-based column index of the first offender.
    """

    def __init__(self, coordinate, message=None):
        self.coordinate = int(coordinate)
        if message is None:
            message = f"coordinate {self.coordinate} has zero sample variance"
        super().__init__(message)
