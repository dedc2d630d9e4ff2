"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    """A parameter lies outside the domain an operation accepts."""

    kind = "invalid-argument"


class InconsistentDataError(ValueError):
    """Observations cannot stem from a single root under the noise model."""

    kind = "inconsistent-data"


class UndefinedLogarithmError(InvalidArgumentError):
    """A closed-form bound would need the logarithm of a non-positive number."""

    kind = "undefined-logarithm"


class NotFoundError(RuntimeError):
    """A bounded search ended without meeting its target.

    ``best`` carries the closest candidate seen, typically an ``(n, estimate)`` pair.
    """

    kind = "not-found"

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class ZeroDerivativeError(ArithmeticError):
    kind = "zero-derivative"

    def __init__(self, iterate, x):
        super().__init__(f"derivative vanished at iterate {iterate} (x={x!r})")
        self.iterate = iterate
        self.x = x


class DivergenceError(ArithmeticError):
    kind = "divergence"

    def __init__(self, iterate, x):
        super().__init__(f"non-finite iterate at step {iterate} (x={x!r})")
        self.iterate = iterate
        self.x = x
