"""Relativistic energy conditions, their closed-form limits and the normalized radial
wavefunctions.

The bound-state energy is the root of

    f(E) = [1 + 2n + sqrt((2j' + D - 2)^2 + 4(B - C)(mu + E))] sqrt(mu - E)
           - A sqrt(mu + E)

in the window |E| < mu, where j' (and m') depend on E. The root is bracketed on a
uniform grid and refined with `scipy.optimize`.
"""

from __future__ import annotations

import dataclasses
import math
from logging import getLogger as get_logger
from typing import Literal

import numpy as np
import numpy.typing as npt
import scipy.optimize

from ringkg.core import angular
from ringkg.core.angular import AngularSolution
from ringkg.core.errors import (
    DomainError,
    MultipleRoots,
    NegativeDiscriminant,
    NoBoundState,
    NonConvergence,
)
from ringkg.core.model import (
    ModelParams,
    QuantumNumbers,
    check_in_window,
    derive_couplings,
    nonrel_transform,
)
from ringkg.core.specfun import laguerre, log_gamma

logger = get_logger(__name__)


@dataclasses.dataclass(frozen=True)
class SolverConfig:
    """Numerical settings of `solve_bound_state`."""

    grid_points: int = 512
    """Number of points of the sign-change scan over the bound-state window."""

    edge_fraction: float = 1e-9
    """The scan covers (-mu + delta, mu - delta) with delta = edge_fraction * mu."""

    method: Literal["brentq", "bisect"] = "brentq"
    """Bracket refinement. Both converge to the same root within tolerance."""

    xtol: float = 1e-15
    """Absolute tolerance on the energy, in units of mu."""

    rtol: float = 4 * float(np.finfo(float).eps)

    maxiter: int = 200

    residual_tol: float = 1e-12
    """Contract on |f(E*)|, in units of mu. Misses are logged, not raised."""

    def __post_init__(self):
        if self.grid_points < 2:
            raise DomainError(f"Need at least two scan points, got {self.grid_points}.")
        if not 0 < self.edge_fraction < 1:
            raise DomainError(f"edge_fraction must be in (0, 1): {self.edge_fraction}")


@dataclasses.dataclass(frozen=True)
class RadialIntermediates:
    M: float
    """D + 2j."""

    gamma4: float
    """4 gamma^2 = (M - 1)(M - 3) + 4 B alpha2^2, the 1/r^2 coefficient times four."""

    beta_sq: float
    """A alpha2^2, the 1/r coefficient."""

    zeta: float
    """Order of the Laguerre polynomial, sqrt(4 gamma^2 + 1)."""

    eps: float
    """Decay rate sqrt(mu^2 - E^2)."""


@dataclasses.dataclass(frozen=True)
class SolverDiagnostics:
    brackets: int = 0
    roots: tuple[float, ...] = ()
    iterations: int = 0
    function_calls: int = 0
    residual: float = math.nan
    warnings: tuple[str, ...] = ()

    @property
    def status(self) -> str:
        return MultipleRoots.status if len(self.roots) > 1 else "ok"


@dataclasses.dataclass(frozen=True)
class BoundState:
    params: ModelParams
    qn: QuantumNumbers
    E: float
    """Relativistic energy, or E_NR when `nonrel` is set."""

    intermediates: RadialIntermediates
    angular: AngularSolution
    norm: float
    """Radial normalization constant C_nj."""

    diagnostics: SolverDiagnostics = dataclasses.field(
        default_factory=SolverDiagnostics
    )
    nonrel: bool = False
    """Schrodinger state of the nonrelativistic limit. `E` is then E_NR."""

    @property
    def binding(self) -> float:
        return self.E if self.nonrel else self.E - self.params.mu

    @property
    def alpha2_sq(self) -> float:
        """mu + E, or 2 mu for the Schrodinger state."""
        return 2 * self.params.mu if self.nonrel else self.params.mu + self.E

    @property
    def log_norm(self) -> float:
        return _log_radial_norm(self.qn.n, self.intermediates.zeta, self.intermediates.eps)


def _checked_sqrt(radicand: npt.ArrayLike, quantity: str) -> np.ndarray:
    radicand = np.asarray(radicand, dtype=float)
    if np.any(radicand < 0):
        raise NegativeDiscriminant(quantity, float(np.min(radicand)))
    return np.sqrt(radicand)


def energy_residual_kratzer(
    p: ModelParams, n: int, j: npt.ArrayLike, E: npt.ArrayLike
) -> np.ndarray | float:
    """Residual of the energy condition at fixed effective angular momentum j."""
    check_in_window(p, E)
    A, B = derive_couplings(p)
    E = np.asarray(E, dtype=float)
    root = _checked_sqrt(
        (p.D + 2 * np.asarray(j, dtype=float) - 2) ** 2 + 4 * B * (p.mu + E),
        "the fixed-j energy condition",
    )
    return ((1 + 2 * n + root) * np.sqrt(p.mu - E) - A * np.sqrt(p.mu + E))[()]


def angular_at(p: ModelParams, qn: QuantumNumbers, alpha2_sq: float) -> AngularSolution:
    """Angular solution of the state at alpha2^2 = mu + E.

    The Coulomb channel uses j = j' = ell = ntilde + m and the integer order m.
    """
    if p.is_coulomb:
        ell = qn.ell
        return AngularSolution(
            m_prime=float(qn.m),
            j=float(ell),
            j_prime=float(ell),
            lambda_sep=float(ell * (ell + p.D - 2)),
            norm=angular.polar_norm(qn.n_theta, float(qn.m)),
            D=p.D,
        )
    return angular.solve_angular(qn, p.D, p.C, alpha2_sq)


def _noncentral_residual(
    p: ModelParams,
    qn: QuantumNumbers,
    alpha1_sq: npt.ArrayLike,
    alpha2_sq: npt.ArrayLike,
) -> np.ndarray:
    A, B = derive_couplings(p)
    alpha1_sq = np.asarray(alpha1_sq, dtype=float)
    alpha2_sq = np.asarray(alpha2_sq, dtype=float)
    if p.is_coulomb:
        j_prime = np.full_like(alpha2_sq, float(qn.ell))
    else:
        # Re-evaluated at every energy: m' and j' depend on alpha2^2.
        m_prime = angular.m_prime(qn.m, p.C, alpha2_sq)
        j_prime = angular.jprime_from_ntilde(qn.n_theta, m_prime, p.D)
    root = _checked_sqrt(
        (2 * j_prime + p.D - 2) ** 2 + 4 * (B - p.C) * alpha2_sq,
        "the noncentral energy condition",
    )
    return (1 + 2 * qn.n + root) * np.sqrt(alpha1_sq) - A * np.sqrt(alpha2_sq)


def energy_residual_noncentral(
    p: ModelParams, qn: QuantumNumbers, E: npt.ArrayLike
) -> np.ndarray | float:
    """Residual of the energy condition of the ring-shaped Kratzer potential (j' form)."""
    check_in_window(p, E)
    E = np.asarray(E, dtype=float)
    return _noncentral_residual(p, qn, p.mu - E, p.mu + E)[()]


def energy_residual_via_j(
    p: ModelParams, qn: QuantumNumbers, E: npt.ArrayLike
) -> np.ndarray | float:
    """Same residual as `energy_residual_noncentral`, through the fixed-j condition with
    the energy-dependent j of the polar problem."""
    check_in_window(p, E)
    E = np.asarray(E, dtype=float)
    alpha2_sq = p.mu + E
    if p.is_coulomb:
        j = np.full_like(E, float(qn.ell))
    else:
        m_prime = angular.m_prime(qn.m, p.C, alpha2_sq)
        j = angular.j_from_ntilde(qn.n_theta, m_prime, p.D, p.C, alpha2_sq)
    return energy_residual_kratzer(p, qn.n, j, E)


def nonrel_limit_residual(
    p: ModelParams, qn: QuantumNumbers, E_NR: npt.ArrayLike
) -> np.ndarray | float:
    """The noncentral residual after the substitution mu - E -> -E_NR, mu + E -> 2 mu.

    It vanishes at the Schrodinger energy given by `nonrel_energy`.
    """
    E_NR = np.asarray(E_NR, dtype=float)
    if np.any(E_NR > 0):
        raise DomainError(f"Bound Schrodinger energies are negative, got {E_NR!r}.")
    # The substitution is an involution on the alpha1^2 slot.
    alpha1_sq, alpha2_sq = nonrel_transform(E_NR, 2 * p.mu)
    return _noncentral_residual(p, qn, alpha1_sq, np.full_like(E_NR, alpha2_sq))[()]


def nonrel_energy(p: ModelParams, qn: QuantumNumbers) -> float:
    """Schrodinger energy of the same state, in the Coulomb-like closed form.

    >>> nonrel_energy(ModelParams(mu=1.0, a0=0.25, r0=2.0), QuantumNumbers(0, 0, 0))
    -0.125
    """
    A, B = derive_couplings(p)
    if p.is_coulomb:
        centrifugal_sq = float((2 * qn.ell + p.D - 2) ** 2)
    else:
        m_prime = math.sqrt(qn.m**2 + 2 * p.mu * p.C)
        # (2 l' + D - 2)^2, with l' the j' of the ring-free problem at alpha2^2 = 2 mu.
        centrifugal_sq = (p.D - 2) ** 2 + (2 * qn.n_theta + 2 * m_prime + 1) ** 2 - 1
    root = float(
        _checked_sqrt(
            centrifugal_sq + 8 * p.mu * (B - p.C), "the nonrelativistic energy"
        )
    )
    return -2 * p.mu * A**2 / (2 * qn.n + 1 + root) ** 2


def coulomb_energy(mu: float, qe_sq: float, n: int, ell: int, D: int) -> float:
    """Closed-form energy of the Coulomb channel, with qe_sq = A^2.

    >>> coulomb_energy(1.0, 4.0, n=1, ell=1, D=3)
    0.8
    """
    principal = 2 * n + 2 * ell + D - 1
    return mu * (1 - 2 * qe_sq / (qe_sq + principal**2))


def coulomb_series(
    mu: float, qe_sq: float, n: int, ell: int, D: int, order: int = 2
) -> float:
    """Expansion of `coulomb_energy` in powers of qe_sq, up to qe_sq**order."""
    if order < 0:
        raise DomainError(f"The order of the expansion must be >= 0, got {order}.")
    x = qe_sq / (2 * n + 2 * ell + D - 1) ** 2
    return mu * (1 + 2 * sum((-x) ** k for k in range(1, order + 1)))


def radial_intermediates(p: ModelParams, j: float, E: float) -> RadialIntermediates:
    check_in_window(p, E)
    return _intermediates(p, j, p.mu - E, p.mu + E)


def _intermediates(
    p: ModelParams, j: float, alpha1_sq: float, alpha2_sq: float
) -> RadialIntermediates:
    A, B = derive_couplings(p)
    M = p.D + 2 * j
    zeta_sq = float(_checked_sqrt((M - 2) ** 2 + 4 * B * alpha2_sq, "zeta")) ** 2
    return RadialIntermediates(
        M=M,
        gamma4=(M - 1) * (M - 3) + 4 * B * alpha2_sq,
        beta_sq=A * alpha2_sq,
        zeta=math.sqrt(zeta_sq),
        eps=math.sqrt(alpha1_sq * alpha2_sq),
    )


def _log_radial_norm(n: int, zeta: float, eps: float) -> float:
    return (1 + zeta / 2) * math.log(2 * eps) + 0.5 * (
        log_gamma(n + 1) - math.log(2 * n + zeta + 1) - log_gamma(n + zeta + 1)
    )


def build_bound_state(
    p: ModelParams,
    qn: QuantumNumbers,
    E: float,
    diagnostics: SolverDiagnostics | None = None,
) -> BoundState:
    """Assembles the intermediates and normalizations of the state at energy `E`."""
    check_in_window(p, E)
    angular_solution = angular_at(p, qn, p.mu + E)
    intermediates = radial_intermediates(p, angular_solution.j, E)
    return BoundState(
        params=p,
        qn=qn,
        E=float(E),
        intermediates=intermediates,
        angular=angular_solution,
        norm=math.exp(_log_radial_norm(qn.n, intermediates.zeta, intermediates.eps)),
        diagnostics=diagnostics or SolverDiagnostics(),
    )


def build_nonrel_state(p: ModelParams, qn: QuantumNumbers) -> BoundState:
    """Schrodinger state with the same labels, at the energy `nonrel_energy`.

    The relativistic construction carries over with mu - E -> -E_NR and mu + E -> 2 mu,
    so every radial and angular helper accepts the result.

    >>> p = ModelParams(mu=1.0, a0=0.25, r0=2.0)
    >>> state = build_nonrel_state(p, QuantumNumbers(0, 0, 0))
    >>> state.E, state.intermediates.eps
    (-0.125, 0.5)
    """
    E_NR = nonrel_energy(p, qn)
    alpha1_sq, alpha2_sq = nonrel_transform(E_NR, 2 * p.mu)
    angular_solution = angular_at(p, qn, alpha2_sq)
    intermediates = _intermediates(p, angular_solution.j, alpha1_sq, alpha2_sq)
    logger.debug(
        f"{qn}: Schrodinger state at E_NR={E_NR!r}, zeta={intermediates.zeta:.6g}"
    )
    return BoundState(
        params=p,
        qn=qn,
        E=E_NR,
        intermediates=intermediates,
        angular=angular_solution,
        norm=math.exp(_log_radial_norm(qn.n, intermediates.zeta, intermediates.eps)),
        nonrel=True,
    )


def residual_floor(p: ModelParams, qn: QuantumNumbers, E: float) -> float:
    """|f'(E)| ulp(E), the energy-condition residual left by rounding E itself.

    It exceeds 1e-12 mu for weakly bound states, where f' blows up near E = mu.
    """
    h = 1e-3 * (p.mu - abs(E))
    slope = (
        float(energy_residual_noncentral(p, qn, E + h))
        - float(energy_residual_noncentral(p, qn, E - h))
    ) / (2 * h)
    return abs(slope) * float(np.spacing(abs(E)))


def solve_bound_state(
    p: ModelParams, qn: QuantumNumbers, config: SolverConfig = SolverConfig()
) -> BoundState:
    """Finds the relativistic energy of the state `qn` and builds the normalized state.

    Raises
    ------
    NoBoundState
        If the energy condition doesn't change sign in the window.
    NonConvergence
        If the bracket refinement doesn't converge within `config.maxiter`.
    """
    mu = p.mu
    delta = config.edge_fraction * mu
    grid = np.linspace(-mu + delta, mu - delta, config.grid_points)
    values = _noncentral_residual(p, qn, mu - grid, mu + grid)

    exact_roots = [float(E) for E in grid[values == 0]]
    brackets = np.flatnonzero(values[:-1] * values[1:] < 0)
    logger.debug(f"{qn}: {len(brackets)} bracket(s), {len(exact_roots)} exact root(s).")
    if len(brackets) == 0 and not exact_roots:
        raise NoBoundState(
            f"The energy condition of {qn} doesn't change sign in the bound-state "
            f"window (-{mu}, {mu})."
        )

    refine = scipy.optimize.brentq if config.method == "brentq" else scipy.optimize.bisect

    def residual(E: float) -> float:
        return float(energy_residual_noncentral(p, qn, E))

    roots = list(exact_roots)
    iterations = 0
    function_calls = 0
    for index in brackets:
        root, result = refine(
            residual,
            grid[index],
            grid[index + 1],
            xtol=config.xtol * mu,
            rtol=config.rtol,
            maxiter=config.maxiter,
            full_output=True,
            disp=False,
        )
        if not result.converged:
            raise NonConvergence(
                f"{config.method} didn't converge for {qn} in the bracket "
                f"[{grid[index]}, {grid[index + 1]}]: {result.flag}"
            )
        roots.append(float(root))
        iterations += result.iterations
        function_calls += result.function_calls

    roots.sort()
    E = roots[-1]
    warnings: list[str] = []
    if len(roots) > 1:
        warning = MultipleRoots(tuple(roots), E)
        logger.warning(warning)
        warnings.append(str(warning))

    final_residual = residual(E)
    tolerance = max(config.residual_tol * mu, 4 * residual_floor(p, qn, E))
    if abs(final_residual) > tolerance:
        message = (
            f"Residual of the energy condition of {qn} at E={E!r} is "
            f"{final_residual:.3e}, above {tolerance:.1e}."
        )
        logger.warning(RuntimeWarning(message))
        warnings.append(message)
    logger.debug(
        f"{qn}: E={E!r} after {iterations} iterations, residual={final_residual:.3e}"
    )
    diagnostics = SolverDiagnostics(
        brackets=len(brackets),
        roots=tuple(roots),
        iterations=iterations,
        function_calls=function_calls,
        residual=final_residual,
        warnings=tuple(warnings),
    )
    return build_bound_state(p, qn, E, diagnostics)


def _check_radii(r: npt.ArrayLike) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError(f"Radii must be > 0, got {r!r}.")
    return r


def radial_wavefunction(state: BoundState, r: npt.ArrayLike) -> np.ndarray | float:
    """R(r) = C_nj r^((zeta + 2 - D)/2) exp(-eps r) L_n^zeta(2 eps r)."""
    r = _check_radii(r)
    zeta, eps = state.intermediates.zeta, state.intermediates.eps
    exponent = (zeta + 2 - state.params.D) / 2
    envelope = np.exp(state.log_norm + exponent * np.log(r) - eps * r)
    return (envelope * laguerre(state.qn.n, zeta, 2 * eps * r).value)[()]


def reduced_radial_wavefunction(
    state: BoundState, r: npt.ArrayLike
) -> np.ndarray | float:
    """g(r) = r^((D - 1)/2) R(r), the solution of the one-dimensional radial equation."""
    r = _check_radii(r)
    zeta, eps = state.intermediates.zeta, state.intermediates.eps
    envelope = np.exp(state.log_norm + (zeta + 1) / 2 * np.log(r) - eps * r)
    return (envelope * laguerre(state.qn.n, zeta, 2 * eps * r).value)[()]


def radial_nodes(state: BoundState, r: npt.ArrayLike) -> int:
    """Number of sign changes of R on the radii `r`."""
    values = np.asarray(radial_wavefunction(state, r))
    signs = np.sign(values[values != 0])
    return int(np.count_nonzero(signs[:-1] != signs[1:]))


def total_wavefunction(
    state: BoundState,
    r: npt.ArrayLike,
    theta: npt.ArrayLike,
    phi: npt.ArrayLike,
    m_sign: Literal[1, -1] = 1,
) -> np.ndarray | complex:
    """psi(r, theta, phi) = R(r) H(theta) Phi(phi), broadcasting over the inputs.

    `m_sign` picks the sign of the azimuthal number in exp(+-i m phi).
    """
    radial = radial_wavefunction(state, r)
    polar = angular.polar_wavefunction(
        state.qn.n_theta, state.angular.m_prime, theta
    )
    phase = angular.azimuthal(m_sign * state.qn.m, phi)
    return (np.asarray(radial) * np.asarray(polar) * np.asarray(phase))[()]
