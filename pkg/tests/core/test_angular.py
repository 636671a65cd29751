from __future__ import annotations

import math

import numpy as np
import pytest

from ringkg.core import oracle
from ringkg.core.angular import (
    azimuthal,
    j_from_ntilde,
    jprime_from_ntilde,
    m_prime,
    ntilde_from_j,
    polar_wavefunction,
    solve_angular,
)
from ringkg.core.errors import DomainError, NoRealAngularMomentum
from ringkg.core.model import QuantumNumbers


@pytest.mark.parametrize(
    ("m", "C", "alpha2_sq", "expected"),
    [(3, 0.0, 1.7, 3.0), (1, 2.0, 1.5, 2.0), (2, 0.7, 1.9, math.sqrt(5.33))],
)
def test_m_prime(m: int, C: float, alpha2_sq: float, expected: float):
    assert m_prime(m, C, alpha2_sq) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize(("ntilde", "mp", "expected"), [(0, 0.0, 0.0), (1, 1.0, 2.0)])
def test_j_from_ntilde(ntilde: int, mp: float, expected: float):
    assert j_from_ntilde(ntilde, mp, D=3, C=0.0, alpha2_sq=1.3) == pytest.approx(
        expected, abs=1e-15
    )


@pytest.mark.parametrize("ntilde", range(4))
@pytest.mark.parametrize("m", range(4))
def test_j_is_ell_without_ring_term_in_three_dimensions(ntilde: int, m: int):
    j = j_from_ntilde(ntilde, float(m), D=3, C=0.0, alpha2_sq=1.0)
    assert j == pytest.approx(ntilde + m, abs=1e-14)


def test_j_from_ntilde_with_inconsistent_m_prime():
    # m' = 0 while C alpha2^2 = 2: the discriminant is 1 + 1 - 8 - 1 < 0.
    with pytest.raises(NoRealAngularMomentum) as exc_info:
        j_from_ntilde(0, 0.0, D=3, C=1.0, alpha2_sq=2.0)
    assert exc_info.value.discriminant == pytest.approx(-7.0)


@pytest.mark.parametrize(("D", "expected"), [(3, 0.0), (2, 0.0)])
def test_jprime_of_the_s_state(D: int, expected: float):
    assert jprime_from_ntilde(0, 0.0, D) == expected


@pytest.mark.parametrize(("j", "expected"), [(0.0, 0.0), (2.0, 1.0)])
def test_ntilde_from_j(j: float, expected: float):
    mp = 0.0 if j == 0 else 1.0
    assert ntilde_from_j(j, mp, D=3, C=0.0, alpha2_sq=1.0) == pytest.approx(
        expected, abs=1e-15
    )


def test_jprime_shift_at_fixed_ntilde():
    C, alpha2_sq = 0.4, 1.1
    mp = 1.5
    j = j_from_ntilde(2, mp, D=5, C=C, alpha2_sq=alpha2_sq)
    j_prime = jprime_from_ntilde(2, mp, D=5)
    assert (2 * j_prime + 3) ** 2 - (2 * j + 3) ** 2 == pytest.approx(
        4 * C * alpha2_sq, rel=1e-12
    )


def test_round_trip_of_the_example_state():
    C, alpha2_sq = 0.3, 1.2
    j = j_from_ntilde(1, 2.0, D=4, C=C, alpha2_sq=alpha2_sq)
    assert ntilde_from_j(j, 2.0, D=4, C=C, alpha2_sq=alpha2_sq) == pytest.approx(
        1.0, abs=1e-12
    )


def test_branch_identity_and_round_trip(rng: np.random.Generator):
    for _ in range(1000):
        ntilde = int(rng.integers(0, 6))
        m = int(rng.integers(0, 6))
        D = int(rng.integers(2, 7))
        C = float(rng.uniform(0.0, 3.0))
        alpha2_sq = float(rng.uniform(1e-3, 2.0))

        mp = m_prime(m, C, alpha2_sq)
        j = j_from_ntilde(ntilde, mp, D, C, alpha2_sq)
        j_prime = jprime_from_ntilde(ntilde, mp, D)

        assert j >= -(D - 2) / 2
        assert j * (j + D - 2) + C * alpha2_sq == pytest.approx(
            j_prime * (j_prime + D - 2), rel=1e-12, abs=1e-12
        )
        assert ntilde_from_j(j, mp, D, C, alpha2_sq) == pytest.approx(
            ntilde, abs=1e-10
        )


def test_j_on_arrays():
    alpha2_sq = np.linspace(0.1, 1.9, 7)
    mp = m_prime(1, 0.5, alpha2_sq)
    j = j_from_ntilde(1, mp, 3, 0.5, alpha2_sq)
    assert j.shape == alpha2_sq.shape
    # j' doesn't see C directly, only through m', so j < j' whenever C > 0.
    assert np.all(j < jprime_from_ntilde(1, mp, 3))


@pytest.mark.parametrize("theta", [0.0, 0.3, math.pi / 2, 2.9, math.pi])
def test_constant_polar_state(theta: float):
    assert polar_wavefunction(0, 0.0, theta) == pytest.approx(1 / math.sqrt(2))


def test_polar_value_on_the_equator():
    assert polar_wavefunction(0, 1.0, math.pi / 2) == pytest.approx(math.sqrt(3) / 2)


@pytest.mark.parametrize("mp", [1.0, 2.7])
def test_polar_wavefunction_vanishes_on_the_axis(mp: float):
    values = polar_wavefunction(2, mp, np.array([0.0, math.pi]))
    assert values == pytest.approx([0.0, 0.0], abs=1e-12)


def test_polar_parity():
    theta = np.linspace(0.0, math.pi / 2, 11)
    for ntilde in range(4):
        assert polar_wavefunction(ntilde, 1.3, math.pi - theta) == pytest.approx(
            (-1) ** ntilde * polar_wavefunction(ntilde, 1.3, theta), abs=1e-13
        )


@pytest.mark.parametrize("theta", [-0.1, math.pi + 0.1])
def test_polar_angle_out_of_range(theta: float):
    with pytest.raises(DomainError):
        polar_wavefunction(1, 0.5, theta)


@pytest.mark.parametrize(
    ("ntilde", "mp"), [(0, 0.0), (1, 0.5), (2, 1.3), (3, 2.0), (4, 3.7)]
)
def test_polar_normalization(ntilde: int, mp: float):
    assert oracle.polar_norm(ntilde, mp) == pytest.approx(1.0, abs=1e-8)


def test_polar_orthogonality():
    mp = 1.3
    overlap = oracle.quadrature_norm(
        lambda s: polar_wavefunction(1, mp, math.acos(s))
        * polar_wavefunction(3, mp, math.acos(s)),
        (-1.0, 1.0),
    )
    assert overlap == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize(("m", "phi"), [(0, 0.7), (2, math.pi)])
def test_azimuthal_values(m: int, phi: float):
    assert azimuthal(m, phi) == pytest.approx(1 / math.sqrt(2 * math.pi))


def test_azimuthal_sign_conjugates():
    phi = np.linspace(0.0, 2 * math.pi, 9)
    assert azimuthal(-3, phi) == pytest.approx(np.conj(azimuthal(3, phi)))


@pytest.mark.parametrize("m", [0, 1, 4])
def test_azimuthal_normalization(m: int):
    assert oracle.azimuthal_norm(m) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("D", [2, 3, 4])
@pytest.mark.parametrize("C", [0.0, 0.5])
def test_solve_angular(D: int, C: float):
    alpha2_sq = 1.4
    solution = solve_angular(QuantumNumbers(0, 2, 1), D, C, alpha2_sq)
    assert solution.D == D
    assert solution.m_prime == pytest.approx(math.sqrt(1 + C * alpha2_sq))
    assert solution.lambda_sep == pytest.approx(solution.j * (solution.j + D - 2))
    assert solution.nu_prime - solution.lambda_sep == pytest.approx(
        C * alpha2_sq, abs=1e-12
    )
