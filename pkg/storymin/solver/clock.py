"""Wall-clock deadline and interval callbacks for the branch-and-cut loop.

The solver ticks the clock after every LP; scheduled functions whose time
has come are called with the seconds since their previous call::

    clock = Clock(time_limit=60)
    clock.schedule_interval(report_progress, 5.0)
    while not clock.expired():
        ...
        clock.tick()
"""

import heapq
import itertools
import threading
import time as _time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple


@dataclass(order=True)
class _Scheduled:
    due: float
    seq: int
    func: Callable = field(compare=False)
    interval: float = field(compare=False)
    called_at: float = field(compare=False)
    args: Tuple[Any, ...] = field(compare=False, default=())
    kwargs: Dict[str, Any] = field(compare=False, default_factory=dict)


class Clock:
    """Deadline bookkeeping shared by every worker of one solve.

    ``tick`` may be called from several threads; callbacks run one at a time.
    """

    def __init__(
        self,
        time_limit: Optional[float] = None,
        time_function: Callable[[], float] = _time.perf_counter,
    ):
        self.time = time_function
        self.start_ts = self.time()
        self.deadline = None if time_limit is None else self.start_ts + time_limit
        self._scheduled: List[_Scheduled] = []
        self._counter = itertools.count()
        self._lock = threading.RLock()

    def elapsed(self) -> float:
        return self.time() - self.start_ts

    def remaining(self) -> float:
        if self.deadline is None:
            return float("inf")
        return max(0.0, self.deadline - self.time())

    def expired(self) -> bool:
        return self.deadline is not None and self.time() >= self.deadline

    def schedule_interval(self, func, interval: float, *args, **kwargs):
        """Call ``func(dt, *args, **kwargs)`` every ``interval`` seconds on tick."""
        if interval <= 0:
            raise ValueError("interval must be positive")
        now = self.time()
        entry = _Scheduled(
            now + interval, next(self._counter), func, interval, now, args, kwargs
        )
        with self._lock:
            heapq.heappush(self._scheduled, entry)

    def unschedule(self, func):
        with self._lock:
            self._scheduled = [e for e in self._scheduled if e.func is not func]
            heapq.heapify(self._scheduled)

    def tick(self) -> bool:
        """Run due callbacks; returns True if any was called."""
        with self._lock:
            now = self.time()
            called = False
            while self._scheduled and self._scheduled[0].due <= now:
                entry = heapq.heappop(self._scheduled)
                entry.func(now - entry.called_at, *entry.args, **entry.kwargs)
                called = True
                entry.called_at = now
                entry.due += entry.interval
                if entry.due <= now:
                    # missed periods are skipped, not replayed
                    entry.due = now + entry.interval
                entry.seq = next(self._counter)
                heapq.heappush(self._scheduled, entry)
            return called
