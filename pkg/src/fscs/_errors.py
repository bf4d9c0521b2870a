"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    """Raised when an argument violates an operation's precondition."""


class DegenerateAcquisitionError(ValueError):
    """A column of the composed system is zero, so its frequency is unobservable.

    ``columns`` holds the offending 1-based dictionary column indices.
    """

    def __init__(self, columns, period=None):
        self.columns = tuple(int(c) for c in columns)
        self.period = period
        where = "" if period is None else f" at T_s={period:.12g} s"
        super().__init__(f"zero column(s) {list(self.columns)} in Phi @ Psi{where}")


class NonConvergenceError(RuntimeError):
    """The LASSO solver hit ``max_iters`` before certifying optimality.

    ``best`` is the best iterate found and ``residual`` its KKT residual.
    """

    def __init__(self, best, residual, iterations):
        self.best = best
        self.residual = float(residual)
        self.iterations = int(iterations)
        super().__init__(
            f"no convergence after {iterations} iterations (kkt residual {residual:.3e})"
        )


class ConfigError(InvalidArgumentError):
    """Malformed or inconsistent experiment configuration."""
