"""Exception types shared across the package.

The CLI maps these onto process exit codes: argument errors exit 1,
numeric failures exit 2, I/O problems (plain OSError) exit 3.
"""


class ArgumentError(ValueError):
    """An input violates a documented precondition."""


class NumericError(RuntimeError):
    """A numerical routine failed (e.g. the SVD did not converge)."""
