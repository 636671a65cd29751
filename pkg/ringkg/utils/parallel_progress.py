"""Concurrent evaluation of independent computations behind a rich progress bar."""

from __future__ import annotations

import asyncio
import contextlib
import functools
from collections.abc import Coroutine, Sequence
from logging import getLogger as get_logger
from typing import Callable, Protocol, TypedDict, TypeVar

from rich.progress import (
    BarColumn,
    MofNCompleteColumn,
    Progress,
    SpinnerColumn,
    TaskID,
    TaskProgressColumn,
    TextColumn,
    TimeElapsedColumn,
)
from typing_extensions import NotRequired

from ringkg.cli import console

logger = get_logger(__name__)
OutT_co = TypeVar("OutT_co", covariant=True)
OutT = TypeVar("OutT")


class ProgressDict(TypedDict):
    progress: int
    total: int
    info: NotRequired[str]


class ReportProgressFn(Protocol):
    """Called from inside a task to update its progress bar."""

    def __call__(self, progress: int, total: int, info: str | None = None) -> None:
        ...  # pragma: no cover


def report_progress(
    progress: int,
    total: int,
    info: str | None = None,
    *,
    task_id: TaskID,
    progress_dict: dict[TaskID, ProgressDict],
):
    if info is not None:
        progress_dict[task_id] = {"progress": progress, "total": total, "info": info}
    else:
        progress_dict[task_id] = {"progress": progress, "total": total}


class AsyncTaskFn(Protocol[OutT_co]):
    """A coroutine function that reports its progress through `report_progress`."""

    def __call__(
        self, report_progress: ReportProgressFn
    ) -> Coroutine[None, None, OutT_co]:
        ...  # pragma: no cover


def in_thread(
    function: Callable[[], OutT],
    semaphore: asyncio.Semaphore | None = None,
    label: str | None = None,
) -> AsyncTaskFn[OutT]:
    """Wraps a blocking computation into an `AsyncTaskFn` run with `asyncio.to_thread`."""

    async def _task(report_progress: ReportProgressFn) -> OutT:
        async with semaphore or contextlib.nullcontext():
            report_progress(0, 1, label or "running")
            result = await asyncio.to_thread(function)
            report_progress(1, 1)
            return result

    return _task


async def run_async_tasks_with_progress_bar(
    async_task_fns: Sequence[AsyncTaskFn[OutT_co]],
    task_descriptions: Sequence[str] | None = None,
    overall_progress_task_description: str = "[green]Rows:",
    show_task_bars: bool | None = None,
    _show_elapsed_time: bool = True,
) -> list[OutT_co]:
    """Runs the tasks concurrently and displays a progress bar.

    The results are returned all at once, in the order of `async_task_fns`, regardless
    of the order in which the tasks complete. By default one bar per task is only shown
    when there are at most 10 tasks.

    >>> async def double(report_progress: ReportProgressFn, value: int) -> int:
    ...     report_progress(progress=0, total=1, info="Starting.")
    ...     await asyncio.sleep(0.01 * (3 - value))
    ...     report_progress(progress=1, total=1)
    ...     return 2 * value
    >>> tasks = [functools.partial(double, value=i) for i in range(3)]
    >>> with console.capture():
    ...     results = asyncio.run(run_async_tasks_with_progress_bar(tasks))
    >>> results
    [0, 2, 4]
    """
    if task_descriptions is None:
        task_descriptions = [f"Task {i}" for i in range(len(async_task_fns))]
    if show_task_bars is None:
        show_task_bars = len(async_task_fns) <= 10
    columns = [
        SpinnerColumn(finished_text="[green]✓"),
        TextColumn("[progress.description]{task.description}"),
        MofNCompleteColumn(),
        BarColumn(bar_width=None),
        TaskProgressColumn(),
        *([TimeElapsedColumn()] if _show_elapsed_time else []),
    ]
    progress = Progress(
        *columns,
        console=console,
        transient=False,
        refresh_per_second=10,
        expand=False,
    )

    _progress_dict: dict[TaskID, ProgressDict] = {}
    tasks: dict[TaskID, asyncio.Task[OutT_co]] = {}

    overall_progress_task = progress.add_task(
        overall_progress_task_description,
        total=len(async_task_fns),
        visible=True,
        start=True,
    )
    for task_description, async_task_fn in zip(task_descriptions, async_task_fns):
        task_id = progress.add_task(
            description=task_description,
            visible=False,
            start=False,
        )
        report_progress_fn = functools.partial(
            report_progress, task_id=task_id, progress_dict=_progress_dict
        )
        coroutine = async_task_fn(report_progress=report_progress_fn)
        tasks[task_id] = asyncio.create_task(coroutine, name=task_description)

    update_pbar_task = asyncio.create_task(
        update_progress_bar(
            progress,
            tasks=tasks,
            task_descriptions=task_descriptions,
            progress_dict=_progress_dict,
            overall_progress_task=overall_progress_task,
            show_task_bars=show_task_bars,
        ),
        name=update_progress_bar.__name__,
    )
    try:
        with progress:
            await asyncio.gather(
                *[*tasks.values(), update_pbar_task], return_exceptions=True
            )
    except (KeyboardInterrupt, asyncio.CancelledError) as err:
        logger.warning(f"Received {type(err).__name__}, cancelling tasks.")
        for task in tasks.values():
            task.cancel()
        update_pbar_task.cancel()
        raise

    return [task.result() for task in tasks.values()]


async def update_progress_bar(
    progress: Progress,
    tasks: dict[TaskID, asyncio.Task[OutT_co]],
    progress_dict: dict[TaskID, ProgressDict],
    task_descriptions: Sequence[str],
    overall_progress_task: TaskID,
    show_task_bars: bool = True,
):
    assert len(task_descriptions) == len(tasks)
    _started_task_ids: set[TaskID] = set()
    while True:
        for (task_id, task), task_description in zip(tasks.items(), task_descriptions):
            if task_id not in progress_dict:
                continue
            update_data = progress_dict[task_id]

            if task_id not in _started_task_ids:
                progress.start_task(task_id)
                _started_task_ids.add(task_id)

            progress.update(
                task_id=task_id,
                completed=update_data["progress"],
                total=update_data["total"],
                description=task_description
                + (
                    " - Done."
                    if task.done()
                    else (f" - {info}" if (info := update_data.get("info")) else "")
                ),
                visible=show_task_bars,
            )

        progress.update(
            task_id=overall_progress_task,
            completed=sum(task.done() for task in tasks.values()),
        )
        if all(task.done() for task in tasks.values()):
            break

        await asyncio.sleep(0.10)
