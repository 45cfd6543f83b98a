"""Exception types shared across the package.

Two failure categories are distinguished so that callers (and the CLI
exit-code mapping) can tell bad inputs apart from broken numerics.
"""

from __future__ import annotations


class ValidationError(ValueError):
    """An input or domain precondition was violated.

    Raised for malformed state files, non-normalized vectors, dimension
    mismatches, out-of-range parameters, and similar caller errors.
    """


class ContractViolation(RuntimeError):
    """A computed quantity broke a numerical guarantee.

    Raised when a result that is supposed to hold to a stated tolerance
    (an invariance defect, a reconstruction error) fails to do so.
    """
