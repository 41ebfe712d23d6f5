"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for all domain errors raised by rflt."""


class GridMismatchError(ToolkitError):
    """Two networks were combined but their frequency grids differ."""


class PortMismatchError(ToolkitError):
    """Joined ports disagree on reference impedance."""


class SingularNetworkError(ToolkitError):
    """The nodal system is singular at one or more frequencies.

    Usually caused by a floating subgraph or a degenerate element value.
    """

    def __init__(self, freq_hz, detail=""):
        self.freq_hz = freq_hz
        msg = f"singular network at {freq_hz:.6g} Hz"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class TouchstoneFormatError(ToolkitError):
    """Malformed Touchstone content; carries the offending line number."""

    def __init__(self, line_no, detail):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {detail}")


class ExtrapolationError(ToolkitError):
    """A fitted interpolant was queried outside its sample hull."""
