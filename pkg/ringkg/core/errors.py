"""Exceptions raised by the solvers and the command-line front end."""

from __future__ import annotations

from typing import ClassVar


class RingKGUserError(Exception):
    """Configuration errors. These are reported to the user without a traceback."""


class SolverError(Exception):
    """Base class for numerical failures of the closed forms or the root finder."""

    status: ClassVar[str] = "error"
    """Short label written in the `status` column of the output tables."""


class DomainError(SolverError, ValueError):
    status = "domain_error"


class InvalidParameters(DomainError):
    status = "invalid_parameters"

    def __init__(self, field: str, value: object, requirement: str) -> None:
        super().__init__(f"Invalid value for {field!r}: {value!r} ({requirement}).")
        self.field = field
        self.value = value


class OutOfBoundWindow(DomainError):
    """Raised when an energy lies outside the bound-state window |E| < mu."""

    status = "out_of_bound_window"

    def __init__(self, energy: float, mu: float) -> None:
        super().__init__(
            f"Energy E={energy!r} is outside of the bound-state window |E| < mu={mu!r}."
        )
        self.energy = energy
        self.mu = mu


class NegativeDiscriminant(SolverError, ArithmeticError):
    status = "negative_discriminant"

    def __init__(self, quantity: str, value: float) -> None:
        super().__init__(
            f"The radicand of {quantity} is negative ({value!r}): no real solution."
        )
        self.quantity = quantity
        self.value = value


class NoRealAngularMomentum(SolverError):
    """The ring coupling is too strong for a real effective angular momentum j."""

    status = "no_real_angular_momentum"

    def __init__(self, discriminant: float) -> None:
        super().__init__(
            f"No real angular momentum j: the discriminant is {discriminant!r} < 0."
        )
        self.discriminant = discriminant


class NoBoundState(SolverError):
    status = "no_bound_state"


class NonConvergence(SolverError, RuntimeError):
    status = "non_convergence"


class MultipleRoots(UserWarning):
    """More than one sign change of the energy condition was found.

    This is never raised: it is logged and kept in the solver diagnostics.
    """

    status: ClassVar[str] = "multiple_roots"

    def __init__(self, roots: tuple[float, ...], selected: float) -> None:
        super().__init__(
            f"Found {len(roots)} roots of the energy condition {roots}, keeping the "
            f"least bound one (E={selected!r})."
        )
        self.roots = roots
        self.selected = selected
