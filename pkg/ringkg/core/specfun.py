"""Orthogonal polynomials of real (non-integer) order and log-gamma.

The polynomials are evaluated with their three-term recurrences. Factorials with
non-integer arguments are always handled as Gamma functions, in log space.
"""

from __future__ import annotations

import dataclasses
from logging import getLogger as get_logger

import numpy as np
import numpy.typing as npt
import scipy.special

from ringkg.core.errors import DomainError

logger = get_logger(__name__)


@dataclasses.dataclass(frozen=True)
class PolyEval:
    """Value of a polynomial and of its first derivative w.r.t. the argument."""

    value: np.ndarray | float
    derivative: np.ndarray | float


def _check_degree(n: int) -> None:
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise DomainError(f"The degree must be a nonnegative integer, got {n!r}.")


def _check_order(alpha: float) -> None:
    if not alpha > -1:
        raise DomainError(f"The order alpha must be > -1, got {alpha!r}.")


def _laguerre_value(n: int, alpha: float, x: np.ndarray) -> np.ndarray:
    previous = np.ones_like(x)
    if n == 0:
        return previous
    current = 1.0 + alpha - x
    for k in range(1, n):
        previous, current = (
            current,
            ((2 * k + 1 + alpha - x) * current - (k + alpha) * previous) / (k + 1),
        )
    return current


def laguerre(n: int, alpha: float, x: npt.ArrayLike) -> PolyEval:
    """Generalized Laguerre polynomial L_n^alpha(x) and its derivative.

    The derivative uses d/dx L_n^alpha = -L_{n-1}^{alpha+1}.

    >>> result = laguerre(1, 2.0, 1.0)
    >>> float(result.value), float(result.derivative)
    (2.0, -1.0)
    """
    _check_degree(n)
    _check_order(alpha)
    x = np.asarray(x, dtype=float)
    value = _laguerre_value(n, alpha, x)
    if n == 0:
        derivative = np.zeros_like(x)
    else:
        derivative = -_laguerre_value(n - 1, alpha + 1, x)
    return PolyEval(value=value[()], derivative=derivative[()])


def _jacobi_sym_value(n: int, alpha: float, s: np.ndarray) -> np.ndarray:
    previous = np.ones_like(s)
    if n == 0:
        return previous
    current = (alpha + 1) * s
    for k in range(2, n + 1):
        previous, current = (
            current,
            (
                (2 * k + 2 * alpha - 1) * (k + alpha) * s * current
                - (k + alpha - 1) * (k + alpha) * previous
            )
            / (k * (k + 2 * alpha)),
        )
    return current


def jacobi_sym(n: int, alpha: float, s: npt.ArrayLike) -> PolyEval:
    """Symmetric Jacobi polynomial P_n^(alpha, alpha)(s) and its derivative.

    The derivative uses d/ds P_n^(a,a) = (n + 2a + 1)/2 * P_{n-1}^(a+1,a+1).

    >>> result = jacobi_sym(1, 0.5, 0.5)
    >>> float(result.value), float(result.derivative)
    (0.75, 1.5)
    """
    _check_degree(n)
    _check_order(alpha)
    s = np.asarray(s, dtype=float)
    if np.any(np.abs(s) > 1):
        raise DomainError(f"The argument must lie in [-1, 1], got {s!r}.")
    value = _jacobi_sym_value(n, alpha, s)
    if n == 0:
        derivative = np.zeros_like(s)
    else:
        derivative = 0.5 * (n + 2 * alpha + 1) * _jacobi_sym_value(n - 1, alpha + 1, s)
    return PolyEval(value=value[()], derivative=derivative[()])


def log_gamma(x: npt.ArrayLike) -> np.ndarray | float:
    """ln Gamma(x) for x > 0.

    >>> float(log_gamma(1.0))
    0.0
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError(f"log_gamma is only defined here for x > 0, got {x!r}.")
    return scipy.special.gammaln(x)[()]
