"""
Discrete-event engine

Events fire in (time, seq) order, seq being the insertion counter, so two
events at the same instant keep their insertion order.
"""
import heapq
import logging

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional

from .consts import EVENT_CAP, EVENT_TIMER_FIRE
from .errors import UsageError, SimulationError

LOGGER = logging.getLogger(__name__)


@dataclass(order=True)
class SimEvent:
    """Entry of the event queue."""

    time: float
    seq: int
    kind: str = field(compare=False)
    payload: Any = field(compare=False, default=None)
    cancelled: bool = field(compare=False, default=False)


class Engine:
    """Single-threaded event loop with handlers registered per event kind."""

    def __init__(self, *, event_cap: int = EVENT_CAP):
        self.now = 0.0
        self.event_cap = event_cap
        self.events_processed = 0
        self._queue = []
        self._seq = 0
        self._handlers: Dict[str, Callable[[SimEvent], None]] = {}

    def __repr__(self) -> str:
        """Return the representation."""
        result = f"<Engine now={self.now} pending={len(self._queue)} "
        result += f"processed={self.events_processed}>"

        return result

    def __len__(self) -> int:
        return len(self._queue)

    def on(self, kind: str, handler: Callable[[SimEvent], None]) -> None:
        """
        Register the handler for an event kind
        """
        self._handlers[kind] = handler

    def schedule(self, at: float, kind: str, payload: Any = None) -> SimEvent:
        """
        Insert an event, at must not lie in the past
        """
        if at < self.now:
            raise UsageError(f"cannot schedule {kind} at {at}, clock is {self.now}")

        event = SimEvent(time=at, seq=self._seq, kind=kind, payload=payload)
        self._seq += 1
        heapq.heappush(self._queue, event)

        return event

    def schedule_timer(self, at: float, payload: Any = None) -> SimEvent:
        """
        Arm a timer, the returned handle can be cancelled
        """
        return self.schedule(at, EVENT_TIMER_FIRE, payload)

    @staticmethod
    def cancel(handle: SimEvent) -> None:
        """
        Cancel a pending event, a no-op once it fired
        """
        handle.cancelled = True

    def step(self) -> Optional[SimEvent]:
        """
        Deliver the next live event, None when the queue is empty
        """
        while self._queue:
            event = heapq.heappop(self._queue)
            if event.cancelled:
                continue

            if event.time < self.now:
                raise SimulationError(f"clock would go back from {self.now} to {event.time}")

            self.now = event.time
            self.events_processed += 1

            if self.events_processed > self.event_cap:
                err_msg = f"event cap {self.event_cap} reached at t={self.now}"
                LOGGER.error(err_msg)
                raise SimulationError(err_msg)

            handler = self._handlers.get(event.kind)
            if handler is None:
                raise SimulationError(f"no handler registered for {event.kind!r}")

            handler(event)

            return event

        return None

    def run(self, until: Optional[float] = None) -> None:
        """
        Run until the queue drains or the next event lies past until
        """
        while self._queue:
            head = self._queue[0]
            if head.cancelled:
                heapq.heappop(self._queue)
                continue

            if until is not None and head.time > until:
                self.now = max(self.now, until)
                return

            self.step()
