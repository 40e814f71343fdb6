"""Exception hierarchy shared across the package.

Three families matter to callers: bad input files or flags, violated
mathematical preconditions, and numerical breakdown inside an otherwise
valid computation.  The CLI maps them to exit codes 2, 3 and 4.
"""


class InputError(ValueError):
    """Malformed file, unparseable flag, or unsupported parameter value."""


class DomainError(ValueError):
    """A mathematical precondition on the inputs does not hold."""


class NumericError(RuntimeError):
    """An iteration failed to converge or an internal residual blew up."""
