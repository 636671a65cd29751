from __future__ import annotations

import argparse
import dataclasses
import itertools
import math
import re
from logging import getLogger as get_logger
from pathlib import Path
from typing import Literal, get_args

import blessed

from ringkg.core.errors import InvalidParameters, RingKGUserError
from ringkg.core.model import ModelParams, QuantumNumbers

logger = get_logger(__name__)

T = blessed.Terminal()

Mode = Literal["spectrum", "wavefunction", "verify", "limits"]
OutputFormat = Literal["csv", "json"]
Coordinate = Literal["r", "theta"]

MODES: list[Mode] = list(get_args(Mode))
OUTPUT_FORMATS: list[OutputFormat] = list(get_args(OutputFormat))

_RANGE_PATTERN = re.compile(r"^\s*(-?\d+)\s*(?:\.\.\s*(-?\d+)\s*)?$")


@dataclasses.dataclass(frozen=True)
class IntRange:
    """Inclusive range of integers, written `lo..hi` (or a single `value`)."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty range {self.lo}..{self.hi}")

    def values(self) -> range:
        return range(self.lo, self.hi + 1)

    def __str__(self) -> str:
        return str(self.lo) if self.lo == self.hi else f"{self.lo}..{self.hi}"


def parse_range(text: str) -> IntRange:
    """Parses an inclusive integer range.

    >>> parse_range("0..2")
    IntRange(lo=0, hi=2)
    >>> parse_range("3")
    IntRange(lo=3, hi=3)
    """
    match = _RANGE_PATTERN.match(text)
    if match is None:
        raise argparse.ArgumentTypeError(
            f"invalid range {text!r} (expected an integer or `lo..hi`)"
        )
    lo = int(match.group(1))
    hi = int(match.group(2)) if match.group(2) is not None else lo
    try:
        return IntRange(lo, hi)
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err)) from err


def parse_float(text: str) -> float:
    """Parses a single number. Ranges are an error here, unlike for the labels.

    >>> parse_float("0.25")
    0.25
    """
    if ".." in text:
        raise argparse.ArgumentTypeError(
            f"{text!r}: only the integer labels --D, --n, --ntheta and --m accept "
            f"`lo..hi` ranges"
        )
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number {text!r}") from None


def parse_span(text: str) -> tuple[float, float]:
    """Parses a `lo..hi` span of floats.

    >>> parse_span("0.01..40")
    (0.01, 40.0)
    """
    lo_text, separator, hi_text = text.partition("..")
    try:
        if not separator:
            raise ValueError
        lo, hi = float(lo_text), float(hi_text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"invalid span {text!r} (expected `lo..hi` with two numbers)"
        ) from None
    if not lo < hi:
        raise argparse.ArgumentTypeError(f"empty span {text!r}")
    return (lo, hi)


@dataclasses.dataclass(frozen=True)
class Sampling:
    """Sampling of the wavefunction along one coordinate."""

    coordinate: Coordinate = "r"
    samples: int = 200
    span: tuple[float, float] | None = None
    """Sampled interval. Defaults to a log-spaced [0.01 L, 20 L] in r (L = r0, or 1/eps
    in the Coulomb channel) and to [0, pi] in theta."""


@dataclasses.dataclass(frozen=True)
class RunConfig:
    params: ModelParams
    """Physical parameters. `params.D` is the first dimension of `dimensions`."""

    dimensions: IntRange
    n: IntRange
    ntheta: IntRange
    m: IntRange
    mode: Mode
    out: Path | None = None
    """Output file. None writes to stdout."""

    format: OutputFormat = "csv"
    strict: bool = False
    """Exit with code 3 when a requested state has no bound solution."""

    grid: int = 2000
    rmax: float = 200.0
    matrix: bool = False
    sampling: Sampling = dataclasses.field(default_factory=Sampling)
    nonrel: bool = False
    """Use the Schrodinger states of the nonrelativistic limit."""

    def states(self) -> list[tuple[ModelParams, QuantumNumbers]]:
        """All requested states, sorted by (D, n, ntheta, m)."""
        return [
            (dataclasses.replace(self.params, D=D), QuantumNumbers(n, ntheta, m))
            for D, n, ntheta, m in itertools.product(
                self.dimensions.values(),
                self.n.values(),
                self.ntheta.values(),
                self.m.values(),
            )
        ]


def make_run_config(
    mode: Mode,
    mu: float = 1.0,
    a0: float | None = None,
    r0: float | None = None,
    C: float = 0.0,
    D: IntRange = IntRange(3, 3),
    n: IntRange = IntRange(0, 0),
    ntheta: IntRange = IntRange(0, 0),
    m: IntRange = IntRange(0, 0),
    coulomb: float | None = None,
    out: Path | None = None,
    format: OutputFormat = "csv",
    strict: bool = False,
    grid: int = 2000,
    rmax: float = 200.0,
    matrix: bool = False,
    coordinate: Coordinate = "r",
    samples: int = 200,
    span: tuple[float, float] | None = None,
    nonrel: bool = False,
) -> RunConfig:
    """Validates the command-line values. Raises `RingKGUserError` naming the field."""
    if coulomb is None:
        for name, value in (("a0", a0), ("r0", r0)):
            if value is None:
                raise RingKGUserError(
                    f"--{name} is required (unless the Coulomb channel is selected "
                    f"with --coulomb A)."
                )
    for name, values in (("n", n), ("ntheta", ntheta), ("m", m)):
        if values.lo < 0:
            raise RingKGUserError(f"--{name} must be nonnegative, got {values}.")
    if D.lo < 2:
        raise RingKGUserError(f"--D must be >= 2, got {D}.")
    if grid < 200:
        raise RingKGUserError(f"--grid must be >= 200, got {grid}.")
    if samples < 2:
        raise RingKGUserError(f"--samples must be >= 2, got {samples}.")
    if span is not None and coordinate == "r" and span[0] <= 0:
        raise RingKGUserError(f"--span must be positive in r, got {span}.")
    if span is not None and coordinate == "theta" and (
        span[0] < 0 or span[1] > math.pi
    ):
        raise RingKGUserError(f"--span must lie in [0, pi] in theta, got {span}.")
    try:
        params = ModelParams(
            mu=mu,
            a0=1.0 if a0 is None else a0,
            r0=1.0 if r0 is None else r0,
            C=C,
            D=D.lo,
            coulomb=coulomb,
        )
    except InvalidParameters as err:
        raise RingKGUserError(f"--{err.field}: {err}") from err
    if matrix and nonrel:
        raise RingKGUserError(
            "--matrix compares relativistic energies and can't be used with --nonrel."
        )
    if matrix and rmax < 20 * params.r0:
        raise RingKGUserError(f"--rmax must be >= 20 r0 = {20 * params.r0}, got {rmax}.")
    return RunConfig(
        params=params,
        dimensions=D,
        n=n,
        ntheta=ntheta,
        m=m,
        mode=mode,
        out=out,
        format=format,
        strict=strict,
        grid=grid,
        rmax=rmax,
        matrix=matrix,
        sampling=Sampling(coordinate=coordinate, samples=samples, span=span),
        nonrel=nonrel,
    )
