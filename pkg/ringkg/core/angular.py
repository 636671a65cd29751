"""Polar and azimuthal parts of the separated Klein-Gordon equation.

The ring-shaped term shifts the azimuthal order to the non-integer
m' = sqrt(m^2 + C alpha2^2), and the polar solutions are
H(theta) = N sin^m'(theta) P_ntilde^(m', m')(cos theta). The quantum-number algebra
linking ntilde, j and j' is implemented with the positive square-root branch only.
"""

from __future__ import annotations

import dataclasses
import math
from logging import getLogger as get_logger

import numpy as np
import numpy.typing as npt

from ringkg.core.errors import DomainError, NoRealAngularMomentum
from ringkg.core.model import QuantumNumbers
from ringkg.core.specfun import jacobi_sym, log_gamma

logger = get_logger(__name__)


@dataclasses.dataclass(frozen=True)
class AngularSolution:
    """Energy-dependent effective angular numbers of a state."""

    m_prime: float
    """Effective (real) azimuthal order, the order of the Jacobi polynomial."""

    j: float
    """Effective angular momentum."""

    j_prime: float
    """Shifted angular momentum, the angular momentum of the ring-free problem."""

    lambda_sep: float
    """Separation constant j(j + D - 2)."""

    norm: float
    """Normalization constant of the polar wavefunction."""

    D: int = 3

    @property
    def nu_prime(self) -> float:
        """j'(j' + D - 2), which equals j(j + D - 2) + C alpha2^2."""
        return self.j_prime * (self.j_prime + self.D - 2)


def m_prime(m: int, C: float, alpha2_sq: npt.ArrayLike) -> np.ndarray | float:
    """Effective azimuthal order sqrt(m^2 + C alpha2^2).

    >>> float(m_prime(1, 2.0, 1.5))
    2.0
    """
    return np.sqrt(m**2 + C * np.asarray(alpha2_sq, dtype=float))[()]


def j_from_ntilde(
    ntilde: int,
    m_prime: npt.ArrayLike,
    D: int,
    C: float,
    alpha2_sq: npt.ArrayLike,
) -> np.ndarray | float:
    """Effective angular momentum j of the polar state with index `ntilde`.

    >>> float(j_from_ntilde(1, 1.0, D=3, C=0.0, alpha2_sq=1.0))
    2.0
    """
    m_prime = np.asarray(m_prime, dtype=float)
    discriminant = (
        (D - 2) ** 2
        + (2 * ntilde + 2 * m_prime + 1) ** 2
        - 4 * C * np.asarray(alpha2_sq, dtype=float)
        - 1
    )
    if np.any(discriminant < 0):
        raise NoRealAngularMomentum(float(np.min(discriminant)))
    return (-(D - 2) / 2 + 0.5 * np.sqrt(discriminant))[()]


def jprime_from_ntilde(
    ntilde: int, m_prime: npt.ArrayLike, D: int
) -> np.ndarray | float:
    """Angular momentum j' of the ring-free problem with the same ntilde and m'."""
    m_prime = np.asarray(m_prime, dtype=float)
    radicand = (D - 2) ** 2 + (2 * ntilde + 2 * m_prime + 1) ** 2 - 1
    return (-(D - 2) / 2 + 0.5 * np.sqrt(radicand))[()]


def ntilde_from_j(
    j: npt.ArrayLike,
    m_prime: npt.ArrayLike,
    D: int,
    C: float,
    alpha2_sq: npt.ArrayLike,
) -> np.ndarray | float:
    """Inverse of `j_from_ntilde`.

    >>> float(ntilde_from_j(2.0, 1.0, D=3, C=0.0, alpha2_sq=1.0))
    1.0
    """
    j = np.asarray(j, dtype=float)
    radicand = (
        (2 * j + 1) ** 2 + 4 * j * (D - 3) + 4 * C * np.asarray(alpha2_sq, dtype=float)
    )
    if np.any(radicand < 0):
        raise DomainError(
            f"Negative radicand {float(np.min(radicand))!r} when inverting j={j!r}."
        )
    return (-(1 + 2 * np.asarray(m_prime)) / 2 + 0.5 * np.sqrt(radicand))[()]


def polar_norm(ntilde: int, m_prime: float) -> float:
    """Normalization of H so that the integral of H(s)^2 over s in [-1, 1] is one."""
    log_norm = (
        -m_prime * math.log(2)
        - log_gamma(ntilde + m_prime + 1)
        + 0.5
        * (
            math.log(2 * ntilde + 2 * m_prime + 1)
            + log_gamma(ntilde + 2 * m_prime + 1)
            + log_gamma(ntilde + 1)
            - math.log(2)
        )
    )
    return math.exp(log_norm)


def polar_wavefunction(
    ntilde: int, m_prime: float, theta: npt.ArrayLike
) -> np.ndarray | float:
    """Normalized polar wavefunction H(theta) = N sin^m'(theta) P^(m',m')(cos theta).

    At theta = 0 or pi the value is the continuous extension (zero when m' > 0).

    >>> round(float(polar_wavefunction(0, 1.0, np.pi / 2)) ** 2, 12)
    0.75
    """
    theta = np.asarray(theta, dtype=float)
    if np.any((theta < 0) | (theta > np.pi)):
        raise DomainError(f"The polar angle must lie in [0, pi], got {theta!r}.")
    sin_theta = np.abs(np.sin(theta))
    jacobi = jacobi_sym(ntilde, m_prime, np.clip(np.cos(theta), -1.0, 1.0))
    return (polar_norm(ntilde, m_prime) * sin_theta**m_prime * jacobi.value)[()]


def azimuthal(m: int, phi: npt.ArrayLike) -> np.ndarray | complex:
    """Azimuthal factor exp(i m phi) / sqrt(2 pi). Here `m` carries its sign."""
    phi = np.asarray(phi, dtype=float)
    return (np.exp(1j * m * phi) / math.sqrt(2 * math.pi))[()]


def solve_angular(
    qn: QuantumNumbers, D: int, C: float, alpha2_sq: float
) -> AngularSolution:
    """Effective angular numbers of the state `qn` at the given alpha2^2 = mu + E."""
    mp = float(m_prime(qn.m, C, alpha2_sq))
    j = float(j_from_ntilde(qn.n_theta, mp, D, C, alpha2_sq))
    j_prime = float(jprime_from_ntilde(qn.n_theta, mp, D))
    return AngularSolution(
        m_prime=mp,
        j=j,
        j_prime=j_prime,
        lambda_sep=j * (j + D - 2),
        norm=polar_norm(qn.n_theta, mp),
        D=D,
    )
