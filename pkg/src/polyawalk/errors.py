"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: invariant violations exit with 1,
bad input with 2, exhausted resource caps with 3.
"""


class PolyaWalkError(Exception):
    """Base class for all errors raised by the package."""

    exit_code = 1


class InvariantViolation(PolyaWalkError):
    """An internal consistency check failed (a cross-check or exactness guard)."""

    exit_code = 1


class InputError(PolyaWalkError, ValueError):
    """Arguments are malformed or outside the documented domain."""

    exit_code = 2


class ResourceLimitError(PolyaWalkError):
    """A configured cap (memory, enumeration budget, dimension) would be exceeded."""

    exit_code = 3
