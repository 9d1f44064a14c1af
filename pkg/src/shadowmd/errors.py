"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration problems exit 1, table
(fixture) problems exit 2, and a trajectory leaving the tabulated bond-length
range exits 3.
"""


class DimensionError(ValueError):
    """Qubit counts or vector lengths of two objects do not match."""


class CapacityError(ValueError):
    """Dense-matrix oracle requested beyond its qubit-count guard."""


class ConfigurationError(ValueError):
    """Invalid run or estimator configuration."""


class TableError(ValueError):
    """Coefficient table failed to parse or validate."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class BondRangeError(ValueError):
    """Bond length outside the tabulated grid; dynamics treats this as an abort."""

    def __init__(self, r: float, lo: float, hi: float):
        self.r = r
        self.lo = lo
        self.hi = hi
        super().__init__(
            f"bond length {r:.6f} A outside tabulated range [{lo:.6f}, {hi:.6f}] A"
        )


class ConvergenceError(RuntimeError):
    """Optimizer failed to reach the requested accuracy.

    Carries the best parameters seen and their energy gap to the exact
    ground state.
    """

    def __init__(self, message: str, best_theta, energy_gap: float):
        self.best_theta = best_theta
        self.energy_gap = energy_gap
        super().__init__(f"{message} (best energy gap {energy_gap:.3e} Ha)")
