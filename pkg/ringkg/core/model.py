"""Physical parameters, quantum-number labels and the parameter algebra shared by the
angular and radial solvers.

Natural units (hbar = c = 1) are used throughout.
"""

from __future__ import annotations

import dataclasses
import math
from logging import getLogger as get_logger

import numpy as np
import numpy.typing as npt

from ringkg.core.errors import InvalidParameters, OutOfBoundWindow

logger = get_logger(__name__)


@dataclasses.dataclass(frozen=True)
class ModelParams:
    """Inputs of the equal scalar/vector Kratzer plus ring-shaped potential."""

    mu: float
    """Rest mass of the particle."""

    a0: float
    """Dissociation energy of the Kratzer potential."""

    r0: float
    """Equilibrium internuclear distance."""

    C: float = 0.0
    """Strength of the ring-shaped term C cot^2(theta) / r^2."""

    D: int = 3
    """Number of spatial dimensions."""

    coulomb: float | None = None
    """When set, the coupling A = Ze^2 of a pure Coulomb channel (B = 0).

    `a0` and `r0` are then only used as length/energy scales for sampling grids.
    """

    def __post_init__(self):
        if not self.mu > 0:
            raise InvalidParameters("mu", self.mu, "the rest mass must be > 0")
        if not self.a0 > 0:
            raise InvalidParameters("a0", self.a0, "the dissociation energy must be > 0")
        if not self.r0 > 0:
            raise InvalidParameters("r0", self.r0, "the equilibrium distance must be > 0")
        if not self.C >= 0:
            raise InvalidParameters("C", self.C, "the ring strength must be >= 0")
        if isinstance(self.D, bool) or int(self.D) != self.D or self.D < 2:
            raise InvalidParameters("D", self.D, "the dimension must be an integer >= 2")
        if self.coulomb is not None:
            if not self.coulomb > 0:
                raise InvalidParameters("coulomb", self.coulomb, "A must be > 0")
            if self.C != 0:
                raise InvalidParameters(
                    "C", self.C, "the Coulomb channel has no ring-shaped term"
                )

    @property
    def A(self) -> float:
        return derive_couplings(self)[0]

    @property
    def B(self) -> float:
        return derive_couplings(self)[1]

    @property
    def is_coulomb(self) -> bool:
        return self.coulomb is not None


@dataclasses.dataclass(frozen=True, order=True)
class QuantumNumbers:
    """Labels of a state. `m` is the magnitude |m| of the azimuthal number."""

    n: int
    """Number of radial nodes."""

    n_theta: int
    """Polar index (the degree of the Jacobi polynomial)."""

    m: int
    """Magnitude of the azimuthal quantum number. The sign lives in the phase only."""

    def __post_init__(self):
        for name in ("n", "n_theta", "m"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 0:
                raise InvalidParameters(name, value, "must be a nonnegative integer")

    @property
    def ell(self) -> int:
        """Orbital label used by the Coulomb channel (j = ell = n_theta + m)."""
        return self.n_theta + self.m


@dataclasses.dataclass(frozen=True)
class EnergyChannel:
    """The energy-dependent combinations mu - E and mu + E at a (candidate) energy."""

    alpha1_sq: float
    alpha2_sq: float

    @property
    def eps(self) -> float:
        return math.sqrt(self.alpha1_sq * self.alpha2_sq)


def derive_couplings(p: ModelParams) -> tuple[float, float]:
    """Returns the couplings (A, B) of the radial part -A/r + B/r^2.

    >>> derive_couplings(ModelParams(mu=1.0, a0=0.25, r0=2.0))
    (1.0, 1.0)
    >>> derive_couplings(ModelParams(mu=1.0, a0=1.0, r0=1.0, coulomb=0.5))
    (0.5, 0.0)
    """
    if p.coulomb is not None:
        return (p.coulomb, 0.0)
    return (2.0 * p.a0 * p.r0, p.a0 * p.r0**2)


def check_in_window(p: ModelParams, E: npt.ArrayLike) -> None:
    if not np.all(np.abs(E) < p.mu):
        bad = np.asarray(E)[np.abs(E) >= p.mu]
        raise OutOfBoundWindow(float(bad.flat[0]), p.mu)


def channel_at(p: ModelParams, E: float) -> EnergyChannel:
    check_in_window(p, E)
    return EnergyChannel(alpha1_sq=p.mu - E, alpha2_sq=p.mu + E)


def nonrel_transform(alpha1_sq: float, alpha2_sq: float) -> tuple[float, float]:
    """Substitution pair (E_NR, 2mu) mapping the relativistic formulas onto the
    Schrodinger ones: alpha1^2 -> -E_NR and alpha2^2 -> 2mu.

    >>> nonrel_transform(0.5, 2.0)
    (-0.5, 2.0)
    """
    return (-alpha1_sq, alpha2_sq)


def potential(p: ModelParams, r: npt.ArrayLike, theta: npt.ArrayLike) -> np.ndarray:
    """V(r, theta) = -A/r + B/r^2 + C cot^2(theta)/r^2 (no azimuthal term)."""
    A, B = derive_couplings(p)
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if np.any(r <= 0):
        raise InvalidParameters("r", r, "radii must be > 0")
    cot = np.cos(theta) / np.sin(theta)
    return -A / r + B / r**2 + p.C * cot**2 / r**2
