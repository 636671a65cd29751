from __future__ import annotations

import itertools
from logging import getLogger as get_logger

import numpy as np
import pytest
import rich.console

import ringkg.cli
import ringkg.cli.commands
import ringkg.utils.parallel_progress
from ringkg.cli import console
from ringkg.core.model import ModelParams, QuantumNumbers

from .utils import test_parallel_progress

logger = get_logger(__name__)


@pytest.fixture(autouse=True)
def use_wider_console_during_tests(monkeypatch: pytest.MonkeyPatch):
    """Make the console very wide so lines are not wrapped, and drop the log times and
    paths from its output."""
    regular_console = console
    test_console = rich.console.Console(
        record=True, width=200, log_time=False, log_path=False, stderr=True
    )

    monkeypatch.setattr(ringkg.cli, "console", test_console)
    monkeypatch.setitem(globals(), "console", test_console)

    for module in [
        ringkg.cli.commands,
        ringkg.utils.parallel_progress,
        test_parallel_progress,
    ]:
        # These modules import the console from ringkg.cli before this runs, so we
        # need to patch them also.
        assert hasattr(module, "console")
        assert module.console is regular_console
        monkeypatch.setattr(module, "console", test_console)


KRATZER = ModelParams(mu=1.0, a0=0.25, r0=2.0)
"""A = B = 1."""

GROUND = QuantumNumbers(0, 0, 0)

STATE_SET: list[tuple[ModelParams, QuantumNumbers]] = [
    (ModelParams(mu=1.0, a0=0.25, r0=2.0, C=C, D=D), QuantumNumbers(n, ntheta, m))
    for C, D, n, ntheta, m in itertools.product(
        (0.0, 0.3), (3, 4), range(3), range(3), range(3)
    )
]
"""States with n, ntheta, m <= 2 for C in {0, 0.3} and D in {3, 4}."""


def state_id(state: tuple[ModelParams, QuantumNumbers]) -> str:
    p, qn = state
    return f"C={p.C}-D={p.D}-n={qn.n}-nt={qn.n_theta}-m={qn.m}"


@pytest.fixture
def kratzer() -> ModelParams:
    return KRATZER


@pytest.fixture
def ring() -> ModelParams:
    return ModelParams(mu=1.0, a0=0.25, r0=2.0, C=0.3)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
