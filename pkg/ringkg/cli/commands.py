"""Bound states of a spin-0 particle in D dimensions under equal scalar and vector
Kratzer plus ring-shaped potentials.

Energies, wavefunctions and their numerical verification, written as CSV or JSON.
"""

from __future__ import annotations

import argparse
import asyncio
import functools
import inspect
import logging
import operator
import os
import sys
import traceback
from argparse import ArgumentParser, _HelpAction
from collections.abc import Sequence
from logging import getLogger as get_logger
from pathlib import Path
from typing import Any, Callable, TypeVar

import numpy as np
import rich.logging

from ringkg.cli import console
from ringkg.cli.output import (
    CheckRow,
    LimitsRow,
    PolarSampleRow,
    RadialSampleRow,
    SpectrumRow,
    write_rows,
)
from ringkg.cli.utils import (
    MODES,
    OUTPUT_FORMATS,
    IntRange,
    RunConfig,
    Sampling,
    T,
    make_run_config,
    parse_float,
    parse_range,
    parse_span,
)
from ringkg.core import angular, oracle, radial
from ringkg.core.errors import MultipleRoots, RingKGUserError, SolverError
from ringkg.core.model import ModelParams, QuantumNumbers, potential
from ringkg.utils.parallel_progress import in_thread, run_async_tasks_with_progress_bar

from ..__version__ import __version__

logger = get_logger(__name__)
RowT = TypeVar("RowT")

EXIT_CONFIG_ERROR = 1
EXIT_VERIFICATION_FAILURE = 2
EXIT_INFEASIBLE = 3

FEASIBLE_STATUSES = ("ok", MultipleRoots.status)


def main():
    try:
        exit_code = ringkg()
    except KeyboardInterrupt:
        console.print("Exited by user.")
        exit_code = EXIT_CONFIG_ERROR
    except RingKGUserError as exc:
        # These are user errors and should not be reported with a traceback.
        print("ERROR:", exc, file=sys.stderr)
        exit_code = EXIT_CONFIG_ERROR
    except Exception:
        print(T.red(traceback.format_exc()), file=sys.stderr)
        command = sys.argv[1] if len(sys.argv) > 1 else None
        print(
            T.bold_yellow(
                f"An error occurred during the execution of the command `{command}`. "
            )
            + T.yellow(
                "Run it again with -vvv to see the solver logs, and include the error "
                "traceback (the red text above) when reporting the issue."
            ),
            file=sys.stderr,
        )
        exit_code = EXIT_CONFIG_ERROR
    if exit_code:
        sys.exit(exit_code)


def ringkg() -> int:
    parser = _ArgumentParser(prog="ringkg", description=__doc__, add_help=True)
    add_arguments(parser)

    verbose, function, args_dict = parse_args(parser)
    setup_logging(verbose)
    config = make_run_config(**args_dict)
    logger.debug(f"Run configuration: {config}")

    if inspect.iscoroutinefunction(function):
        return asyncio.run(function(config))
    return function(config)


class _ArgumentParser(ArgumentParser):
    """Exits with the configuration-error code instead of argparse's usual 2."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG_ERROR, f"{self.prog}: error: {message}\n")


def add_arguments(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--version",
        action="version",
        version=f"ringkg v{__version__}",
        help="ringkg version",
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="Enable verbose logging."
    )
    parser.add_argument(
        "--mode",
        choices=MODES,
        default=argparse.SUPPRESS,
        help="Run this command, with its options following: same as `ringkg MODE ...`.",
    )
    subparsers = parser.add_subparsers(
        required=True, dest="<command>", parser_class=_ArgumentParser
    )

    # ----- ringkg spectrum ------

    spectrum_parser = subparsers.add_parser(
        "spectrum",
        help="Relativistic energies of a grid of states.",
        formatter_class=SortingHelpFormatter,
    )
    _add_model_options(spectrum_parser)
    _add_output_options(spectrum_parser)
    spectrum_parser.set_defaults(function=cmd_spectrum, mode="spectrum")

    # ----- ringkg wavefunction ------

    wavefunction_parser = subparsers.add_parser(
        "wavefunction",
        help="Sample the normalized radial or polar wavefunctions.",
        formatter_class=SortingHelpFormatter,
    )
    _add_model_options(wavefunction_parser)
    _add_output_options(wavefunction_parser)
    wavefunction_parser.add_argument(
        "--coordinate",
        choices=["r", "theta"],
        default="r",
        help="Coordinate to sample along: R(r) and g(r), or H(theta).",
    )
    wavefunction_parser.add_argument(
        "--samples", type=int, default=200, help="Number of sample points."
    )
    wavefunction_parser.add_argument(
        "--span",
        type=parse_span,
        default=None,
        metavar="LO..HI",
        help=(
            "Sampled interval. Defaults to a log-spaced [0.01 L, 20 L] in r, with L = "
            "r0 (1/eps in the Coulomb channel), and to [0, pi] in theta."
        ),
    )
    _add_nonrel_option(wavefunction_parser)
    wavefunction_parser.set_defaults(function=cmd_wavefunction, mode="wavefunction")

    # ----- ringkg verify ------

    verify_parser = subparsers.add_parser(
        "verify",
        help="Check the closed forms against independent numerical oracles.",
        formatter_class=SortingHelpFormatter,
    )
    _add_model_options(verify_parser)
    _add_output_options(verify_parser)
    verify_parser.add_argument(
        "--matrix",
        action="store_true",
        help="Also compare with the finite-difference eigenvalue of the radial problem.",
    )
    verify_parser.add_argument(
        "--grid",
        type=int,
        default=2000,
        help="Number of interior points of the finite-difference grid.",
    )
    verify_parser.add_argument(
        "--rmax",
        type=float,
        default=200.0,
        help="Outer radius of the finite-difference grid.",
    )
    _add_nonrel_option(verify_parser)
    verify_parser.set_defaults(function=cmd_verify, mode="verify")

    # ----- ringkg limits ------

    limits_parser = subparsers.add_parser(
        "limits",
        help="Compare the energies with the Coulomb and nonrelativistic limits.",
        formatter_class=SortingHelpFormatter,
    )
    _add_model_options(limits_parser)
    _add_output_options(limits_parser)
    limits_parser.set_defaults(function=cmd_limits, mode="limits")
    assert set(subparsers.choices) == set(MODES)


def _add_model_options(parser: ArgumentParser):
    group = parser.add_argument_group(
        "Model",
        description=(
            "Physical parameters. Each takes a single value: ranges `lo..hi` are only "
            "accepted by the integer labels of the states."
        ),
    )
    group.add_argument("--mu", type=parse_float, default=1.0, help="Rest mass.")
    group.add_argument(
        "--a0", type=parse_float, default=None, help="Dissociation energy (> 0)."
    )
    group.add_argument(
        "--r0",
        type=parse_float,
        default=None,
        help="Equilibrium internuclear distance.",
    )
    group.add_argument(
        "--C", type=parse_float, default=0.0, help="Strength of the ring-shaped term."
    )
    group.add_argument(
        "--coulomb",
        type=parse_float,
        default=None,
        metavar="A",
        help="Use the pure Coulomb channel -A/r (B = 0) instead of the Kratzer one.",
    )
    states = parser.add_argument_group(
        "States", description="Integer values or inclusive ranges `lo..hi`."
    )
    for flag, default, help in [
        ("--D", IntRange(3, 3), "Number of spatial dimensions."),
        ("--n", IntRange(0, 0), "Radial quantum number."),
        ("--ntheta", IntRange(0, 0), "Polar quantum number."),
        ("--m", IntRange(0, 0), "Magnitude of the azimuthal quantum number."),
    ]:
        states.add_argument(
            flag, type=parse_range, default=default, metavar="LO..HI", help=help
        )


def _add_nonrel_option(parser: ArgumentParser):
    parser.add_argument(
        "--nonrel",
        action="store_true",
        help=(
            "Use the Schrodinger state of the nonrelativistic limit instead (the E "
            "column is then E_NR)."
        ),
    )


def _add_output_options(parser: ArgumentParser):
    group = parser.add_argument_group("Output")
    group.add_argument(
        "--out", type=Path, default=None, help="Output file (default: stdout)."
    )
    group.add_argument(
        "--format", choices=OUTPUT_FORMATS, default="csv", help="Output format."
    )
    group.add_argument(
        "--strict",
        action="store_true",
        help=f"Exit with code {EXIT_INFEASIBLE} if a state has no bound solution.",
    )


def parse_args(parser: argparse.ArgumentParser) -> tuple[int, Callable, dict[str, Any]]:
    """Parses the command-line arguments.

    Returns the verbosity level, the command to call, and the arguments of its
    `RunConfig`.
    """
    args = parser.parse_args(_mode_as_command(sys.argv[1:]))
    args_dict = vars(args)

    verbose: int = args_dict.pop("verbose")
    function = args_dict.pop("function")
    _ = args_dict.pop("<command>")

    assert callable(function)
    return verbose, function, args_dict


def _mode_as_command(argv: list[str]) -> list[str]:
    """Rewrites `ringkg [-v] --mode MODE ...` as `ringkg [-v] MODE ...`.

    >>> _mode_as_command(["--mode", "verify", "--a0", "0.25", "-v"])
    ['-v', 'verify', '--a0', '0.25']
    >>> _mode_as_command(["spectrum", "--m", "1"])
    ['spectrum', '--m', '1']
    """
    mode_parser = _ArgumentParser(prog="ringkg", add_help=False, allow_abbrev=False)
    mode_parser.add_argument("--mode", choices=MODES, default=None)
    mode_parser.add_argument("-v", "--verbose", action="count", default=0)
    known, rest = mode_parser.parse_known_args(argv)
    if known.mode is None:
        return argv
    if rest and rest[0] in MODES:
        mode_parser.error(f"give either the command {rest[0]!r} or --mode, not both")
    return ["-v"] * known.verbose + [known.mode, *rest]


def setup_logging(verbose: int) -> None:
    global_loglevel = (
        logging.CRITICAL
        if verbose == 0
        else logging.WARNING
        if verbose == 1
        else logging.INFO
        if verbose == 2
        else logging.DEBUG
    )
    package_loglevel = (
        logging.WARNING
        if verbose == 0
        else logging.INFO
        if verbose == 1
        else logging.DEBUG
    )
    logging.basicConfig(
        level=global_loglevel,
        format="%(message)s",
        handlers=[
            rich.logging.RichHandler(markup=True, rich_tracebacks=True, console=console)
        ],
    )
    get_logger("ringkg").setLevel(package_loglevel)


def _describe(p: ModelParams, qn: QuantumNumbers) -> str:
    return f"D={p.D} n={qn.n} ntheta={qn.n_theta} m={qn.m}"


async def _evaluate(
    config: RunConfig,
    row_fn: Callable[[ModelParams, QuantumNumbers], RowT],
    title: str,
) -> list[RowT]:
    """Evaluates `row_fn` on every requested state, concurrently, in sorted order."""
    states = config.states()
    semaphore = asyncio.Semaphore(os.cpu_count() or 1)
    return await run_async_tasks_with_progress_bar(
        [in_thread(functools.partial(row_fn, p, qn), semaphore) for p, qn in states],
        task_descriptions=[_describe(p, qn) for p, qn in states],
        overall_progress_task_description=f"[green]{title}:",
    )


def _labels(p: ModelParams, qn: QuantumNumbers) -> dict[str, int]:
    return {"D": p.D, "n": qn.n, "ntheta": qn.n_theta, "m": qn.m}


def _strict_exit_code(config: RunConfig, statuses: Sequence[str]) -> int:
    infeasible = [status for status in statuses if status not in FEASIBLE_STATUSES]
    if infeasible:
        logger.info(f"{len(infeasible)} of the requested states have no bound solution.")
    return EXIT_INFEASIBLE if config.strict and infeasible else 0


def spectrum_row(p: ModelParams, qn: QuantumNumbers) -> SpectrumRow:
    labels = _labels(p, qn)
    try:
        state = radial.solve_bound_state(p, qn)
    except SolverError as err:
        logger.warning(f"{_describe(p, qn)}: {err}")
        return SpectrumRow(**labels, status=err.status, message=str(err))
    try:
        E_NR: float | None = radial.nonrel_energy(p, qn)
    except SolverError as err:
        logger.debug(f"No nonrelativistic energy for {_describe(p, qn)}: {err}")
        E_NR = None
    diagnostics = state.diagnostics
    return SpectrumRow(
        **labels,
        j=state.angular.j,
        j_prime=state.angular.j_prime,
        m_prime=state.angular.m_prime,
        E=state.E,
        binding=state.binding,
        E_NR=E_NR,
        zeta=state.intermediates.zeta,
        status=diagnostics.status,
        brackets=diagnostics.brackets,
        iterations=diagnostics.iterations,
        residual=diagnostics.residual,
        message="; ".join(diagnostics.warnings),
    )


async def cmd_spectrum(config: RunConfig) -> int:
    """Writes one row per requested state. Infeasible states keep their row."""
    rows = await _evaluate(config, spectrum_row, "Spectrum")
    write_rows(rows, SpectrumRow, config.out, config.format)
    return _strict_exit_code(config, [row.status for row in rows])


def sample_points(state: radial.BoundState, sampling: Sampling) -> np.ndarray:
    if sampling.coordinate == "theta":
        lo, hi = sampling.span or (0.0, np.pi)
        return np.linspace(lo, hi, sampling.samples)
    length = oracle.length_scale(state)
    lo, hi = sampling.span or (0.01 * length, 20 * length)
    return np.geomspace(lo, hi, sampling.samples)


def _build_state(
    p: ModelParams, qn: QuantumNumbers, nonrel: bool = False
) -> radial.BoundState:
    if nonrel:
        return radial.build_nonrel_state(p, qn)
    return radial.solve_bound_state(p, qn)


def wavefunction_rows(
    p: ModelParams, qn: QuantumNumbers, sampling: Sampling, nonrel: bool = False
) -> tuple[list[RadialSampleRow] | list[PolarSampleRow], str]:
    """Samples of the state, and the solver status."""
    try:
        state = _build_state(p, qn, nonrel)
    except SolverError as err:
        logger.warning(f"Skipping {_describe(p, qn)}: {err}")
        return [], err.status
    labels = _labels(p, qn)
    points = sample_points(state, sampling)
    if sampling.coordinate == "theta":
        H = angular.polar_wavefunction(qn.n_theta, state.angular.m_prime, points)
        polar_rows = [
            PolarSampleRow(**labels, E=state.E, theta=float(theta), H=float(value))
            for theta, value in zip(points, H)
        ]
        return polar_rows, state.diagnostics.status
    R = radial.radial_wavefunction(state, points)
    g = radial.reduced_radial_wavefunction(state, points)
    V = potential(p, points, np.pi / 2)
    radial_rows = [
        RadialSampleRow(
            **labels, E=state.E, r=float(r), R=float(R_r), g=float(g_r), V=float(V_r)
        )
        for r, R_r, g_r, V_r in zip(points, R, g, V)
    ]
    return radial_rows, state.diagnostics.status


async def cmd_wavefunction(config: RunConfig) -> int:
    """Writes the sampled wavefunctions of every requested state, one row per point."""
    results = await _evaluate(
        config,
        functools.partial(
            wavefunction_rows, sampling=config.sampling, nonrel=config.nonrel
        ),
        "Wavefunctions",
    )
    row_type = PolarSampleRow if config.sampling.coordinate == "theta" else RadialSampleRow
    rows = [row for state_rows, _ in results for row in state_rows]
    write_rows(rows, row_type, config.out, config.format)
    return _strict_exit_code(config, [status for _, status in results])


def verify_rows(p: ModelParams, qn: QuantumNumbers, config: RunConfig) -> list[CheckRow]:
    labels = _labels(p, qn)
    try:
        state = _build_state(p, qn, config.nonrel)
    except SolverError as err:
        logger.warning(f"{_describe(p, qn)}: {err}")
        return [
            CheckRow(
                **labels,
                E=None,
                check="solve",
                value=None,
                tolerance=None,
                passed=None,
                status=err.status,
            )
        ]
    try:
        report = oracle.verify_state(
            state, matrix=config.matrix, N=config.grid, R_max=config.rmax
        )
    except SolverError as err:
        logger.error(f"Verification of {_describe(p, qn)} failed: {err}")
        return [
            CheckRow(
                **labels,
                E=state.E,
                check="verify",
                value=None,
                tolerance=None,
                passed=False,
                status=err.status,
            )
        ]
    return [
        CheckRow(
            **labels,
            E=state.E,
            check=check.name,
            value=check.value,
            tolerance=check.tolerance,
            passed=check.passed,
            status=state.diagnostics.status,
        )
        for check in report.checks
    ]


async def cmd_verify(config: RunConfig) -> int:
    """Runs the oracle suite on every requested state.

    Exits with code 2 if any check fails. States without a bound solution are not
    failures (see `--strict`).
    """
    results = await _evaluate(
        config, functools.partial(verify_rows, config=config), "Verification"
    )
    rows = [row for state_rows in results for row in state_rows]
    write_rows(rows, CheckRow, config.out, config.format)

    failed = [row for row in rows if row.passed is False]
    checked = [row for row in rows if row.passed is not None]
    console.print(
        f"{len(checked)} checks on {len(results)} states, {len(failed)} failed.",
        style="red" if failed else "green",
    )
    for row in failed:
        console.print(
            f"  FAILED {row.check} for D={row.D} n={row.n} ntheta={row.ntheta} "
            f"m={row.m}: {row.value} > {row.tolerance}",
            style="red",
        )
    if failed:
        return EXIT_VERIFICATION_FAILURE
    return _strict_exit_code(config, [state_rows[0].status for state_rows in results])


def limits_row(p: ModelParams, qn: QuantumNumbers) -> LimitsRow:
    labels = _labels(p, qn)
    values: dict[str, Any] = {}
    status, messages = "ok", []
    try:
        state = radial.solve_bound_state(p, qn)
        values.update(E=state.E, binding=state.binding)
        status = state.diagnostics.status
    except SolverError as err:
        logger.warning(f"{_describe(p, qn)}: {err}")
        status = err.status
        messages.append(str(err))
    if p.is_coulomb:
        qe_sq = p.A**2
        values.update(
            E_coulomb=radial.coulomb_energy(p.mu, qe_sq, qn.n, qn.ell, p.D),
            E_series=radial.coulomb_series(p.mu, qe_sq, qn.n, qn.ell, p.D),
        )
    try:
        E_NR = radial.nonrel_energy(p, qn)
        values.update(
            E_NR=E_NR,
            limit_residual=float(radial.nonrel_limit_residual(p, qn, E_NR)),
        )
    except SolverError as err:
        messages.append(str(err))
    return LimitsRow(**labels, **values, status=status, message="; ".join(messages))


async def cmd_limits(config: RunConfig) -> int:
    """Relativistic energies next to their closed-form and nonrelativistic limits."""
    rows = await _evaluate(config, limits_row, "Limits")
    write_rows(rows, LimitsRow, config.out, config.format)
    return _strict_exit_code(config, [row.status for row in rows])


class SortingHelpFormatter(argparse.HelpFormatter):
    """Taken and adapted from https://stackoverflow.com/a/12269143/6388696."""

    def add_arguments(self, actions):
        actions = sorted(actions, key=operator.attrgetter("option_strings"))
        # put help actions first.
        actions = sorted(
            actions, key=lambda action: not isinstance(action, _HelpAction)
        )
        super().add_arguments(actions)
