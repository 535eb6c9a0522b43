"""Exception types raised by the package."""


class DimensionMismatchError(ValueError):
    pass


class ZeroVarianceError(ValueError):
    def __init__(self, column):
        self.column = column
        super().__init__(f"column {column} has zero variance")


class SingularDesignError(ValueError):
    """X_delta'X_delta is not positive definite for the given indicator vector."""

    def __init__(self, delta):
        self.delta = tuple(int(v) for v in delta)
        super().__init__(f"singular design for delta={self.delta}")


class DegenerateFitError(ValueError):
    """The posterior scale S_N is not positive (the model fits y_c exactly)."""


class NumericalBreakdownError(RuntimeError):
    def __init__(self, iteration, message="Cholesky factorization failed"):
        self.iteration = iteration
        super().__init__(f"{message} at iteration {iteration}")


class SeriesTooShortError(ValueError):
    pass
