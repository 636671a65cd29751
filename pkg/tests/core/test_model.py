from __future__ import annotations

import math

import numpy as np
import pytest

from ringkg.core.errors import InvalidParameters, OutOfBoundWindow
from ringkg.core.model import (
    ModelParams,
    QuantumNumbers,
    channel_at,
    check_in_window,
    derive_couplings,
    nonrel_transform,
    potential,
)


@pytest.mark.parametrize(
    ("a0", "r0", "expected"),
    [(0.25, 2.0, (1.0, 1.0)), (1.0, 1.0, (2.0, 1.0)), (4.0, 0.5, (4.0, 1.0))],
)
def test_derive_couplings(a0: float, r0: float, expected: tuple[float, float]):
    assert derive_couplings(ModelParams(mu=1.0, a0=a0, r0=r0)) == expected


def test_couplings_recover_dissociation_energy(rng: np.random.Generator):
    for a0, r0 in rng.uniform(0.01, 10.0, size=(100, 2)):
        A, B = derive_couplings(ModelParams(mu=1.0, a0=a0, r0=r0))
        assert A**2 / (4 * B) == pytest.approx(a0, rel=1e-15)


def test_coulomb_channel_couplings():
    p = ModelParams(mu=1.0, a0=3.0, r0=7.0, coulomb=0.5)
    assert p.is_coulomb
    assert (p.A, p.B) == (0.5, 0.0)


@pytest.mark.parametrize(
    ("mu", "E", "expected"),
    [(1.0, 0.0, (1.0, 1.0, 1.0)), (1.0, 0.6, (0.4, 1.6, 0.8))],
)
def test_channel_at(mu: float, E: float, expected: tuple[float, float, float]):
    channel = channel_at(ModelParams(mu=mu, a0=1.0, r0=1.0), E)
    assert (channel.alpha1_sq, channel.alpha2_sq, channel.eps) == pytest.approx(expected)


@pytest.mark.parametrize(("mu", "E"), [(2.0, 2.5), (1.0, 1.0), (1.0, -1.0)])
def test_channel_outside_of_window(mu: float, E: float):
    with pytest.raises(OutOfBoundWindow) as exc_info:
        channel_at(ModelParams(mu=mu, a0=1.0, r0=1.0), E)
    assert exc_info.value.energy == E
    assert exc_info.value.status == "out_of_bound_window"


def test_check_in_window_on_arrays():
    p = ModelParams(mu=1.0, a0=1.0, r0=1.0)
    check_in_window(p, np.linspace(-0.99, 0.99, 11))
    with pytest.raises(OutOfBoundWindow):
        check_in_window(p, np.array([0.0, 0.5, 1.5]))


def test_eps_squared_plus_E_squared(rng: np.random.Generator):
    for mu, fraction in zip(rng.uniform(0.1, 10.0, 200), rng.uniform(-1, 1, 200)):
        E = 0.999 * fraction * mu
        channel = channel_at(ModelParams(mu=mu, a0=1.0, r0=1.0), E)
        assert channel.eps**2 + E**2 == pytest.approx(mu**2, rel=1e-14)


@pytest.mark.parametrize(
    ("alpha1_sq", "alpha2_sq", "expected"),
    [(0.4, 1.6, (-0.4, 1.6)), (0.0, 2.0, (0.0, 2.0)), (1e-3, 2.0, (-1e-3, 2.0))],
)
def test_nonrel_transform(
    alpha1_sq: float, alpha2_sq: float, expected: tuple[float, float]
):
    assert nonrel_transform(alpha1_sq, alpha2_sq) == expected


@pytest.mark.parametrize(
    ("kwargs", "field"),
    [
        ({"mu": 0.0}, "mu"),
        ({"a0": -1.0}, "a0"),
        ({"r0": 0.0}, "r0"),
        ({"C": -0.1}, "C"),
        ({"D": 1}, "D"),
        ({"D": 2.5}, "D"),
        ({"coulomb": -1.0}, "coulomb"),
        ({"coulomb": 1.0, "C": 0.5}, "C"),
    ],
)
def test_invalid_params(kwargs: dict, field: str):
    values = {"mu": 1.0, "a0": 1.0, "r0": 1.0} | kwargs
    with pytest.raises(InvalidParameters) as exc_info:
        ModelParams(**values)
    assert exc_info.value.field == field
    assert isinstance(exc_info.value, ValueError)


@pytest.mark.parametrize("labels", [(-1, 0, 0), (0, -2, 0), (0, 0, 1.5), (True, 0, 0)])
def test_invalid_quantum_numbers(labels: tuple):
    with pytest.raises(InvalidParameters):
        QuantumNumbers(*labels)


def test_quantum_numbers_sort_lexicographically():
    labels = [QuantumNumbers(1, 0, 0), QuantumNumbers(0, 2, 1), QuantumNumbers(0, 2, 0)]
    assert sorted(labels) == [labels[2], labels[1], labels[0]]
    assert QuantumNumbers(0, 2, 1).ell == 3


def test_potential_reduces_to_kratzer():
    p = ModelParams(mu=1.0, a0=0.25, r0=2.0)
    r = np.linspace(0.5, 10.0, 1901)
    V = potential(p, r, math.pi / 2)
    assert r[np.argmin(V)] == pytest.approx(p.r0)
    assert V.min() == pytest.approx(-p.a0)


def test_ring_term_is_repulsive_off_the_plane():
    p = ModelParams(mu=1.0, a0=0.25, r0=2.0, C=0.3)
    kratzer = ModelParams(mu=1.0, a0=0.25, r0=2.0)
    theta = np.array([0.3, 1.0, 2.5])
    assert np.all(potential(p, 2.0, theta) > potential(kratzer, 2.0, theta))
    with pytest.raises(InvalidParameters):
        potential(p, 0.0, 1.0)
