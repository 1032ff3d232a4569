"""Exception hierarchy shared by every vofdm module."""

from __future__ import annotations


class VofdmError(Exception):
    """Base class for all errors raised by this package."""


class SizeError(VofdmError, ValueError):
    """Array dimensions disagree with the frame parameters."""


class SpecError(VofdmError, ValueError):
    """A null specification or draw specification is malformed."""


class InfeasibleSpecError(SpecError):
    """Fewer precoded entries than forced spectral nulls."""


class SingularSystemError(VofdmError, ArithmeticError):
    """The nulling system is singular or numerically rank deficient.

    Attributes:
        condition: Condition estimate of the offending system (may be ``inf``).
    """

    def __init__(self, message: str, condition: float):
        super().__init__(message)
        self.condition = condition


class UndefinedPAPRError(VofdmError, ValueError):
    """PAPR requested for an all-zero frame."""


def annotate(exc: VofdmError, prefix: str, **attrs) -> VofdmError:
    """Return a copy of ``exc`` with ``prefix`` prepended and ``attrs`` set.

    Keeps the exception type so callers can still catch the specific class.
    """
    if isinstance(exc, SingularSystemError):
        new = SingularSystemError(f"{prefix}: {exc}", exc.condition)
    else:
        new = type(exc)(f"{prefix}: {exc}")
    for key in ("k", "trial"):
        if hasattr(exc, key):
            setattr(new, key, getattr(exc, key))
    for key, value in attrs.items():
        setattr(new, key, value)
    return new
