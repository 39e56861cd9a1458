"""Exception hierarchy shared by every cohmeter module."""


class CohmeterError(Exception):
    """Base class for all library errors."""


class InvalidState(CohmeterError, ValueError):
    """A matrix failed one of the density-operator invariants.

    ``invariant`` names the violated condition and ``residual`` is the
    measured violation (same units as the matrix entries).
    """

    invariant = "density operator"

    def __init__(self, residual: float, detail: str = ""):
        self.residual = float(residual)
        msg = f"{self.invariant} violated (residual {self.residual:.3e})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class NotHermitian(InvalidState):
    invariant = "hermiticity"


class TraceNotOne(InvalidState):
    invariant = "unit trace"


class NotPositive(InvalidState):
    invariant = "positive semidefiniteness"


class WeightError(CohmeterError, ValueError):
    pass


class DimMismatch(CohmeterError, ValueError):
    pass


class NotUnitary(CohmeterError, ValueError):
    pass


class NotOrthonormal(CohmeterError, ValueError):
    pass


class ConvergenceFailure(CohmeterError, RuntimeError):
    pass


class PreconditionFailed(CohmeterError, ValueError):
    pass


class EqualizationUnreachable(CohmeterError, RuntimeError):
    """No plate/beam-splitter setting brings the two output intensities level."""

    def __init__(self, residual: float, detail: str = ""):
        self.residual = float(residual)
        msg = f"equalization unreachable (best |I0 - I1| = {self.residual:.3e})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
