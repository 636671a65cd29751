"""Independent checks of the closed forms.

Each check uses a different numerical route from the production path it verifies:
analytic second derivatives against the separated ODEs, adaptive quadrature for the
normalizations, explicit series for the polynomials and a finite-difference eigenvalue
problem for the spectrum.
"""

from __future__ import annotations

import dataclasses
import math
from logging import getLogger as get_logger
from typing import Callable

import numpy as np
import numpy.typing as npt
import scipy.integrate
import scipy.linalg
import scipy.optimize
import scipy.special

from ringkg.core import angular, radial
from ringkg.core.angular import AngularSolution
from ringkg.core.errors import DomainError, NonConvergence, SolverError
from ringkg.core.model import ModelParams, QuantumNumbers, derive_couplings
from ringkg.core.radial import BoundState
from ringkg.core.specfun import jacobi_sym, laguerre

logger = get_logger(__name__)

RADIAL_ODE_TOLERANCE = 1e-7
ANGULAR_ODE_TOLERANCE = 1e-7
NORM_TOLERANCE = 1e-8
TOTAL_NORM_TOLERANCE = 1e-7
LIMIT_TOLERANCE = 1e-10
ENERGY_RESIDUAL_TOLERANCE = 1e-12
MATRIX_GAP_TOLERANCE = 5e-4


@dataclasses.dataclass(frozen=True)
class ResidualReport:
    max_rel_residual: float
    """max |residual| over the grid, divided by max |second derivative|."""

    grid: str
    """Description of the sampling grid."""

    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_rel_residual <= self.tolerance


@dataclasses.dataclass(frozen=True)
class EigenCrossCheck:
    E_analytic: float
    E_numeric: float
    N: int
    R_max: float
    converged: bool
    iterations: int = 0

    @property
    def gap(self) -> float:
        return abs(self.E_numeric - self.E_analytic)


@dataclasses.dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        # NaN never passes.
        return bool(self.value <= self.tolerance)


@dataclasses.dataclass(frozen=True)
class VerifyReport:
    params: ModelParams
    qn: QuantumNumbers
    E: float
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> list[CheckResult]:
        return [check for check in self.checks if not check.passed]


def _describe(grid: np.ndarray, name: str) -> str:
    return f"{len(grid)} points of {name} in [{grid[0]:.6g}, {grid[-1]:.6g}]"


def _check_grid(grid: npt.ArrayLike, low: float, high: float, name: str) -> np.ndarray:
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if grid.size == 0:
        raise DomainError(f"The {name} grid is empty.")
    if np.any(grid <= low) or np.any(grid >= high):
        raise DomainError(f"The {name} grid must lie strictly in ({low}, {high}).")
    if np.any(np.diff(grid) <= 0):
        raise DomainError(f"The {name} grid must be strictly increasing.")
    return grid


def length_scale(state: BoundState) -> float:
    """r0, or 1 / eps in the Coulomb channel where r0 plays no role."""
    if state.params.is_coulomb:
        return 1 / state.intermediates.eps
    return state.params.r0


def default_radial_grid(state: BoundState, points: int = 400) -> np.ndarray:
    length = length_scale(state)
    return np.linspace(0.1 * length, 10 * length, points)


def radial_ode_residual(
    state: BoundState,
    grid: npt.ArrayLike | None = None,
    tolerance: float = RADIAL_ODE_TOLERANCE,
) -> ResidualReport:
    """Residual of g'' - [gamma^2/r^2 - A alpha2^2/r + eps^2] g = 0 for g = r^((D-1)/2) R.

    g'' is computed analytically with the Laguerre derivative identity applied twice.
    """
    r = _check_grid(
        default_radial_grid(state) if grid is None else grid, 0.0, math.inf, "radial"
    )
    n = state.qn.n
    zeta, eps = state.intermediates.zeta, state.intermediates.eps
    s = (1 + zeta) / 2
    x = 2 * eps * r

    poly = laguerre(n, zeta, x)
    if n == 0:
        second = np.zeros_like(x)
    else:
        second = -laguerre(n - 1, zeta + 1, x).derivative
    P = poly.value
    dP = 2 * eps * poly.derivative
    d2P = 4 * eps**2 * second

    envelope = np.exp(state.log_norm + s * np.log(r) - eps * r)
    g = envelope * P
    drift = s / r - eps
    g_second = envelope * ((drift**2 - s / r**2) * P + 2 * drift * dP + d2P)

    inter = state.intermediates
    coefficient = inter.gamma4 / (4 * r**2) - inter.beta_sq / r + eps**2
    residual = g_second - coefficient * g

    scale = np.max(np.abs(g_second)) or np.max(np.abs(g))
    return ResidualReport(
        max_rel_residual=float(np.max(np.abs(residual)) / scale),
        grid=_describe(r, "r"),
        tolerance=tolerance,
    )


def angular_ode_residual(
    ang: AngularSolution,
    ntilde: int,
    D: int,
    C: float,
    alpha2_sq: float,
    grid: npt.ArrayLike | None = None,
    tolerance: float = ANGULAR_ODE_TOLERANCE,
) -> ResidualReport:
    """Residual of H'' + cot H' - [(m^2 + C alpha2^2 cos^2)/sin^2 - j(j + D - 2)] H = 0.

    The integer m is recovered from m'^2 = m^2 + C alpha2^2.
    """
    theta = _check_grid(
        np.linspace(0.1, np.pi - 0.1, 400) if grid is None else grid,
        0.0,
        np.pi,
        "theta",
    )
    mp = ang.m_prime
    m_sq = mp**2 - C * alpha2_sq
    sin, cos = np.sin(theta), np.cos(theta)
    cot = cos / sin

    poly = jacobi_sym(ntilde, mp, cos)
    if ntilde == 0:
        second = np.zeros_like(cos)
    else:
        second = (
            0.5 * (ntilde + 2 * mp + 1) * jacobi_sym(ntilde - 1, mp + 1, cos).derivative
        )
    P, dP, d2P = poly.value, poly.derivative, second

    envelope = ang.norm * sin**mp
    H = envelope * P
    Q = mp * cot * P - sin * dP
    dQ = -mp * P / sin**2 - mp * cos * dP - cos * dP + sin**2 * d2P
    H_first = envelope * Q
    H_second = envelope * (mp * cot * Q + dQ)

    potential = (m_sq + C * alpha2_sq * cos**2) / sin**2 - ang.j * (ang.j + D - 2)
    residual = H_second + cot * H_first - potential * H

    scale = np.max(np.abs(H_second)) or np.max(np.abs(H))
    return ResidualReport(
        max_rel_residual=float(np.max(np.abs(residual)) / scale),
        grid=_describe(theta, "theta"),
        tolerance=tolerance,
    )


def quadrature_norm(
    f: Callable[[float], float],
    domain: tuple[float, float],
    measure: Callable[[float], float] | None = None,
    scale: float = 1.0,
    epsabs: float = 1e-10,
    epsrel: float = 1e-10,
    limit: int = 200,
) -> float:
    """Integral of f(x) * measure(x) over `domain` with `scipy.integrate.quad`.

    An infinite upper bound is mapped onto [0, 1) with x = a + scale * t / (1 - t).

    >>> round(quadrature_norm(lambda r: math.exp(-2 * r), (0.0, math.inf)), 12)
    0.5
    """
    low, high = domain
    if not high > low or math.isinf(low):
        raise DomainError(f"Invalid integration domain {domain!r}.")

    def integrand(x: float) -> float:
        value = float(f(x))
        return value * float(measure(x)) if measure is not None else value

    if math.isinf(high):

        def mapped(t: float) -> float:
            if t >= 1.0:
                return 0.0
            return integrand(low + scale * t / (1 - t)) * scale / (1 - t) ** 2

        bounds = (0.0, 1.0)
        function = mapped
    else:
        bounds = (low, high)
        function = integrand

    value, abserr, _info, *message = scipy.integrate.quad(
        function,
        *bounds,
        epsabs=epsabs,
        epsrel=epsrel,
        limit=limit,
        full_output=1,
    )
    if message:
        # Roundoff warnings at this target accuracy are common and harmless.
        if abserr > 100 * max(epsabs, epsrel * abs(value)):
            raise NonConvergence(
                f"Adaptive quadrature failed on {domain} (error estimate {abserr:.2e}): "
                f"{message[0]}"
            )
        logger.debug(f"quad on {domain}: {message[0]}")
    return value


def radial_norm(state: BoundState) -> float:
    """Integral of R^2 r^(D-1) over (0, inf)."""
    zeta, eps = state.intermediates.zeta, state.intermediates.eps
    return quadrature_norm(
        lambda r: radial.reduced_radial_wavefunction(state, r) ** 2,
        (0.0, math.inf),
        scale=(state.qn.n + (1 + zeta) / 2) / eps,
    )


def polar_norm(ntilde: int, m_prime: float) -> float:
    """Integral of H(arccos s)^2 over s in [-1, 1]."""
    return quadrature_norm(
        lambda s: angular.polar_wavefunction(ntilde, m_prime, math.acos(s)) ** 2,
        (-1.0, 1.0),
    )


def azimuthal_norm(m: int) -> float:
    return quadrature_norm(
        lambda phi: abs(angular.azimuthal(m, phi)) ** 2, (0.0, 2 * math.pi)
    )


def total_norm(state: BoundState, extra_nodes: int = 12, phi_nodes: int = 16) -> float:
    """Integral of |psi|^2 r^(D-1) dr d(cos theta) d(phi), by tensor-product quadrature.

    Generalized Gauss-Laguerre in 2 eps r, Gauss-Jacobi in cos(theta) and the uniform
    rule in phi; all three are exact for the polynomial parts of psi.
    """
    n, ntilde = state.qn.n, state.qn.n_theta
    zeta, eps = state.intermediates.zeta, state.intermediates.eps
    mp = state.angular.m_prime
    D = state.params.D

    z, z_weights = scipy.special.roots_genlaguerre(n + extra_nodes, zeta + 1)
    s, s_weights = scipy.special.roots_jacobi(ntilde + extra_nodes, mp, mp)
    phi = 2 * np.pi * np.arange(phi_nodes) / phi_nodes
    phi_weights = np.full(phi_nodes, 2 * np.pi / phi_nodes)

    r = z / (2 * eps)
    theta = np.arccos(s)
    psi = radial.total_wavefunction(
        state, r[:, None, None], theta[None, :, None], phi[None, None, :]
    )
    density = np.abs(psi) ** 2 * r[:, None, None] ** (D - 1)
    # Divide out the weight functions of the two Gauss rules.
    density /= (z ** (zeta + 1) * np.exp(-z) * 2 * eps)[:, None, None]
    density /= ((1 - s**2) ** mp)[None, :, None]
    return float(
        np.einsum("i,j,k,ijk->", z_weights, s_weights, phi_weights, density)
    )


def laguerre_series(n: int, alpha: float, x: float) -> float:
    """L_n^alpha(x) from its explicit sum, with real-argument binomials."""
    return float(
        sum(
            (-1) ** k * scipy.special.binom(n + alpha, n - k) * x**k / math.factorial(k)
            for k in range(n + 1)
        )
    )


def jacobi_series(n: int, alpha: float, s: float) -> float:
    """P_n^(alpha, alpha)(s) from the terminating 2F1(-n, n + 2 alpha + 1; alpha + 1; z)."""
    z = (1 - s) / 2
    terms = (
        scipy.special.poch(-n, k)
        * scipy.special.poch(n + 2 * alpha + 1, k)
        / (scipy.special.poch(alpha + 1, k) * math.factorial(k))
        * z**k
        for k in range(n + 1)
    )
    return float(scipy.special.poch(alpha + 1, n) / math.factorial(n) * sum(terms))


def matrix_eigen_crosscheck(
    p: ModelParams,
    qn: QuantumNumbers,
    N: int = 2000,
    R_max: float = 200.0,
    state: BoundState | None = None,
) -> EigenCrossCheck:
    """Self-consistent finite-difference energy of the radial problem.

    -g'' + W(r; E) g = (E^2 - mu^2) g is discretized on a uniform grid with Dirichlet
    ends. E is updated with the secant method until the n-th eigenvalue of the discrete
    operator equals E^2 - mu^2.
    """
    if N < 200:
        raise DomainError(f"The matrix check needs N >= 200, got {N}.")
    if R_max < 20 * p.r0:
        raise DomainError(f"R_max must be >= 20 r0 = {20 * p.r0}, got {R_max}.")
    if state is not None and state.nonrel:
        raise DomainError("The matrix check compares relativistic energies only.")
    if state is None:
        state = radial.solve_bound_state(p, qn)

    A, B = derive_couplings(p)
    h = R_max / (N + 1)
    r = h * np.arange(1, N + 1)
    off_diagonal = np.full(N - 1, -1 / h**2)

    def mismatch(E: float) -> float:
        alpha2_sq = p.mu + E
        j = radial.angular_at(p, qn, alpha2_sq).j
        M = p.D + 2 * j
        W = ((M - 1) * (M - 3) / 4 + B * alpha2_sq) / r**2 - A * alpha2_sq / r
        eigenvalue = scipy.linalg.eigh_tridiagonal(
            2 / h**2 + W,
            off_diagonal,
            eigvals_only=True,
            select="i",
            select_range=(qn.n, qn.n),
        )[0]
        return eigenvalue - (E**2 - p.mu**2)

    try:
        solution = scipy.optimize.root_scalar(
            mismatch,
            method="secant",
            x0=state.E,
            x1=state.E - 1e-3 * p.mu,
            xtol=1e-8,
            maxiter=50,
        )
    except SolverError as err:
        raise NonConvergence(
            f"The secant iteration of the matrix check of {qn} left the bound-state "
            f"window: {err}"
        ) from err
    result = EigenCrossCheck(
        E_analytic=state.E,
        E_numeric=float(solution.root),
        N=N,
        R_max=R_max,
        converged=bool(solution.converged),
        iterations=solution.iterations,
    )
    if not result.converged:
        logger.warning(f"Matrix check of {qn} didn't converge: {solution.flag}")
    logger.debug(f"Matrix check of {qn} at N={N}: gap={result.gap:.3e}")
    return result


def _energy_checks(state: BoundState) -> list[CheckResult]:
    p, qn, E = state.params, state.qn, state.E
    if state.nonrel:
        return [
            CheckResult(
                "energy_residual",
                abs(float(radial.nonrel_limit_residual(p, qn, E))),
                LIMIT_TOLERANCE,
            )
        ]
    residual = float(radial.energy_residual_noncentral(p, qn, E))
    return [
        # Near E = mu the rounding of E alone leaves more than 1e-12 mu.
        CheckResult(
            "energy_residual",
            abs(residual),
            max(ENERGY_RESIDUAL_TOLERANCE * p.mu, 4 * radial.residual_floor(p, qn, E)),
        ),
        CheckResult(
            "dual_formula",
            abs(float(radial.energy_residual_via_j(p, qn, E)) - residual),
            ENERGY_RESIDUAL_TOLERANCE,
        ),
    ]


def verify_state(
    state: BoundState,
    matrix: bool = False,
    N: int = 2000,
    R_max: float = 200.0,
) -> VerifyReport:
    """Runs every per-state check. The matrix check is opt-in since it is the slowest.

    Schrodinger states (`state.nonrel`) get their own energy condition and skip the
    relativistic-only checks.
    """
    p, qn, E = state.params, state.qn, state.E
    mu = p.mu
    checks = _energy_checks(state)
    checks.append(
        CheckResult(
            "radial_ode",
            radial_ode_residual(state).max_rel_residual,
            RADIAL_ODE_TOLERANCE,
        )
    )
    # j = ell only solves the polar equation at D = 3 in the Coulomb channel.
    if not (p.is_coulomb and p.D != 3):
        checks.append(
            CheckResult(
                "angular_ode",
                angular_ode_residual(
                    state.angular, qn.n_theta, p.D, p.C, state.alpha2_sq
                ).max_rel_residual,
                ANGULAR_ODE_TOLERANCE,
            )
        )
    checks += [
        CheckResult("radial_norm", abs(radial_norm(state) - 1), NORM_TOLERANCE),
        CheckResult(
            "polar_norm",
            abs(polar_norm(qn.n_theta, state.angular.m_prime) - 1),
            NORM_TOLERANCE,
        ),
        CheckResult("azimuthal_norm", abs(azimuthal_norm(qn.m) - 1), NORM_TOLERANCE),
        CheckResult("total_norm", abs(total_norm(state) - 1), TOTAL_NORM_TOLERANCE),
    ]
    if not state.nonrel:
        checks.append(
            CheckResult(
                "nonrel_limit",
                abs(
                    float(
                        radial.nonrel_limit_residual(p, qn, radial.nonrel_energy(p, qn))
                    )
                ),
                LIMIT_TOLERANCE,
            )
        )
    if p.is_coulomb and not state.nonrel:
        closed_form = radial.coulomb_energy(mu, p.A**2, qn.n, qn.ell, p.D)
        checks.append(
            CheckResult("coulomb_closed_form", abs(E - closed_form) / mu, 1e-10)
        )
    if matrix and not state.nonrel:
        crosscheck = matrix_eigen_crosscheck(p, qn, N=N, R_max=R_max, state=state)
        checks.append(
            CheckResult(
                "matrix_gap",
                crosscheck.gap if crosscheck.converged else math.nan,
                MATRIX_GAP_TOLERANCE * mu,
            )
        )
    for check in checks:
        log = logger.debug if check.passed else logger.warning
        log(f"{qn} {check.name}: {check.value:.3e} (tolerance {check.tolerance:.1e})")
    return VerifyReport(params=p, qn=qn, E=E, checks=tuple(checks))
