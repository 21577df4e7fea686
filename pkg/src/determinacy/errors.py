"""Exceptions raised by the analysis stages.

Each carries the data needed to explain the failure (a witness polynomial,
the partial report built so far, ...).
"""

from __future__ import annotations


class DeterminacyError(Exception):
    """Base class for hypothesis failures (as opposed to usage errors).

    ``report`` holds the partial report when the failure happened inside an
    analysis run.
    """

    report = None


class NotPrimitive(DeterminacyError):
    """``f`` or one of its first derivatives is not in the ideal.

    ``which`` is ``"f"`` or the 1-based index of the failing derivative.
    """

    def __init__(self, which, witness, remainder):
        label = "f" if which == "f" else f"df/dx{which}"
        super().__init__(f"{label} = {witness} is not in the ideal (remainder {remainder})")
        self.which = which
        self.witness = witness
        self.remainder = remainder


class NotInIdeal(DeterminacyError):
    """A component of phi has no polynomial lift through psi."""

    def __init__(self, index, witness, remainder):
        super().__init__(
            f"phi_{index + 1} = {witness} is not in <psi> over the polynomial ring "
            f"(remainder {remainder}); a lift may still exist for germs"
        )
        self.index = index
        self.witness = witness
        self.remainder = remainder


class DegenerateIdeal(DeterminacyError):
    """All maximal minors vanish, so the Fitting ideal is zero."""


class InsufficientData(DeterminacyError):
    """Too few usable bins to fit a separation exponent."""


class NotInFittingIdeal(DeterminacyError):
    """The chosen g is not in K_f."""

    def __init__(self, witness, remainder):
        super().__init__(f"g = {witness} is not in K_f (remainder {remainder})")
        self.witness = witness
        self.remainder = remainder


class SeparationUnverified(DeterminacyError):
    """The fitted separation inequality failed on fresh samples."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NotInJacobian(DeterminacyError):
    """The multiplier supplied to the isolated-singularity pipeline is not in the Jacobian ideal."""

    def __init__(self, witness, remainder):
        super().__init__(f"{witness} is not in the Jacobian ideal (remainder {remainder})")
        self.witness = witness
        self.remainder = remainder
