"""
Centralized progress bar management.

Services check this context before drawing rich progress bars, so an
orchestrating command can silence the nested ones.
"""

import threading
from contextlib import contextmanager
from typing import Iterable, Iterator, Optional, TypeVar

from rich.console import Console
from rich.progress import BarColumn, Progress, TextColumn, TimeElapsedColumn

T = TypeVar("T")


class ProgressContext:
    """Thread-local switch for progress display.

    Usage:
        with ProgressContext.suppress():
            service.run()  # no progress bars
    """

    _local = threading.local()

    @classmethod
    def should_show_progress(cls) -> bool:
        return not getattr(cls._local, "suppressed", False)

    @classmethod
    @contextmanager
    def suppress(cls):
        previous_state = getattr(cls._local, "suppressed", False)
        cls._local.suppressed = True
        try:
            yield
        finally:
            cls._local.suppressed = previous_state


def track(items: Iterable[T], description: str, total: Optional[int] = None) -> Iterator[T]:
    """Iterate with a transient stderr progress bar unless progress is suppressed."""
    if not ProgressContext.should_show_progress():
        yield from items
        return
    columns = (TextColumn("{task.description}"), BarColumn(), TextColumn("{task.completed}/{task.total}"), TimeElapsedColumn())
    with Progress(*columns, console=Console(stderr=True), transient=True) as progress:
        task = progress.add_task(description, total=total)
        for item in items:
            yield item
            progress.advance(task)
