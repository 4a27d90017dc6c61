"""
Exception hierarchy

DomainError          - a precondition of an operation does not hold
ConsistencyError     - two independent computations disagree
VerificationFailure  - a checked identity does not hold (raised from a Verdict)
"""


class TautringError(Exception):
    """Base class for every error raised by the package"""


class DomainError(TautringError, ValueError):
    """Invalid arguments: odd Bernoulli index, inadmissible relation data, degree mismatch..."""


class ConsistencyError(TautringError):
    """Internal cross-check failed; signals a formula bug"""


class VerificationFailure(TautringError):
    """
    A verified identity failed.

    Args:
        check: name of the check
        params: parameters of the failing instance
        coordinate: first offending coordinate (label or index)
        expected: exact expected value
        actual: exact computed value
    """

    def __init__(self, check, params=None, coordinate=None, expected=None, actual=None, message=None):
        self.check = check
        self.params = params or {}
        self.coordinate = coordinate
        self.expected = expected
        self.actual = actual
        if message is None:
            message = f'{check} failed for {self.params}'
            if coordinate is not None:
                message += f' at {coordinate}: expected {expected}, got {actual}'
        super().__init__(message)
