"""Exception hierarchy shared across the package.

The CLI maps these to stable exit codes; see ``kk.cli``.
"""


class KKError(Exception):
    """Base class for all package errors."""


class DomainError(KKError):
    """An input coordinate lies outside the model's declared domain."""

    def __init__(self, coordinate: str, value: float, lo: float, hi: float):
        self.coordinate = coordinate
        self.value = value
        self.lo = lo
        self.hi = hi
        super().__init__(
            f"{coordinate}={value!r} outside declared domain [{lo!r}, {hi!r}]"
        )


class ConfigurationError(KKError):
    """Invalid configuration, scenario, or argument combination."""


class BlowupError(KKError):
    """A solver produced a non-finite value.

    Carries the first offending cell index and the time at which it was
    detected.
    """

    def __init__(self, t: float, cell: int, detail: str = ""):
        self.t = t
        self.cell = cell
        msg = f"non-finite state at t={t:.6g}, cell {cell}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class CflViolationError(KKError):
    """Internal assertion: a completed step exceeded the hard CFL bound."""

    def __init__(self, t: float, ratio: float):
        self.t = t
        self.ratio = ratio
        super().__init__(f"CFL ratio {ratio:.3f} > 1 after step ending at t={t:.6g}")


class RegionViolationError(KKError):
    """A recorded state left the invariant region beyond tolerance."""

    def __init__(self, t: float, cell: int, g1: float, g2: float, tol: float):
        self.t = t
        self.cell = cell
        self.g1 = g1
        self.g2 = g2
        self.tol = tol
        super().__init__(
            f"state at t={t:.6g}, cell {cell} outside region "
            f"(g1={g1:.3e}, g2={g2:.3e}, tol={tol:.3e})"
        )


class EmptyRegionError(KKError):
    """A region specification admits no density interval on the domain."""


class GridMismatchError(KKError):
    """Two trajectories do not share grid or snapshot times."""


class DegeneratePointError(KKError):
    """A constraint gradient vanished where a tangent direction was needed."""
