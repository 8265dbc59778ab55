# fv_system/events/event_bus.py
"""
Progress events of checks and campaigns.

Campaign fan-out publishes here; subscribers turn events into log lines.
Event names are closed: only VerificationEvents members can be published
or subscribed to.
"""
import asyncio
import logging
from collections import defaultdict
from enum import Enum
from typing import Any, Awaitable, Callable, DefaultDict, Dict, List, Union

logger = logging.getLogger(__name__)

EventPayload = Dict[str, Any]
EventHandler = Callable[[EventPayload], Union[None, Awaitable[None]]]


class VerificationEvents(str, Enum):
    """Events published by experiments and campaigns."""

    CAMPAIGN_STARTED = "campaign.started"
    CAMPAIGN_FINISHED = "campaign.finished"

    TRIAL_COMPLETED = "trial.completed"
    TRIAL_FAILED = "trial.failed"

    CHECK_FINISHED = "check.finished"


class EventBus:
    """
    In-process publish/subscribe over VerificationEvents.

    Handlers may be plain callables or coroutine functions; they run in
    subscription order.
    """

    def __init__(self):
        self._handlers: DefaultDict[VerificationEvents, List[EventHandler]] = defaultdict(list)

    def subscribe(self, event: VerificationEvents, handler: EventHandler) -> None:
        event = VerificationEvents(event)
        self._handlers[event].append(handler)
        logger.debug(f"Handler {handler.__name__} subscribed to {event.value}")

    def unsubscribe(self, event: VerificationEvents, handler: EventHandler) -> None:
        event = VerificationEvents(event)
        subscribed = self._handlers.get(event, [])
        if handler in subscribed:
            subscribed.remove(handler)
            logger.debug(f"Handler {handler.__name__} unsubscribed from {event.value}")

    def handlers(self, event: VerificationEvents) -> List[EventHandler]:
        return list(self._handlers.get(VerificationEvents(event), []))

    async def emit(self, event: VerificationEvents, data: EventPayload) -> None:
        """
        Deliver `data` to every subscriber of `event`.

        Handler errors are logged, never raised.

        Raises:
            ValueError: If `event` is not a VerificationEvents member
        """
        event = VerificationEvents(event)
        subscribed = self.handlers(event)
        if not subscribed:
            return

        logger.debug(f"Emitting {event.value} to {len(subscribed)} handler(s): {data}")
        for handler in subscribed:
            try:
                result = handler(data)
                if asyncio.iscoroutine(result):
                    await result
            except Exception as e:
                logger.error(f"Error in handler {handler.__name__} for {event.value}: {e}")


# Process-wide bus used by the CLI and campaigns
event_bus = EventBus()
