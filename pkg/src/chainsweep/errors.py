"""Shared exception types. The CLI maps these onto exit codes."""


class InputError(ValueError):
    """Rejected input: bad dimensions, broken invariants, unparseable values."""


class ConvergenceError(RuntimeError):
    """An iterative routine hit its cap without reaching the requested tolerance."""


class ToleranceError(RuntimeError):
    """A computed quantity violated a numerical-consistency bound (e.g. a
    physical expectation value with a non-negligible imaginary part)."""
