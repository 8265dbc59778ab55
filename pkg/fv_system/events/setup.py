# fv_system/events/setup.py
"""
Register logging subscribers with the event bus.
"""
import logging

from fv_system.events.event_bus import event_bus, VerificationEvents
from fv_system.events.handlers import (
    handle_campaign_finished,
    handle_campaign_started,
    handle_check_finished,
    handle_trial_completed,
    handle_trial_failed,
)

logger = logging.getLogger(__name__)

_SUBSCRIPTIONS = [
    (VerificationEvents.CAMPAIGN_STARTED, handle_campaign_started),
    (VerificationEvents.TRIAL_COMPLETED, handle_trial_completed),
    (VerificationEvents.TRIAL_FAILED, handle_trial_failed),
    (VerificationEvents.CAMPAIGN_FINISHED, handle_campaign_finished),
    (VerificationEvents.CHECK_FINISHED, handle_check_finished),
]


def setup_verification_event_handlers():
    """
    Register all logging subscribers with the event bus.

    Called once by the CLI during startup.
    """
    logger.info("Setting up verification event handlers...")

    for event_name, handler in _SUBSCRIPTIONS:
        if handler not in event_bus.handlers(event_name):
            event_bus.subscribe(event_name, handler)
            logger.debug(f"Registered handler for {event_name}")

    logger.info("Verification event handlers registered successfully")


def teardown_verification_event_handlers():
    """
    Unregister all logging subscribers.
    Useful for testing or shutdown.
    """
    logger.info("Tearing down verification event handlers...")

    for event_name, handler in _SUBSCRIPTIONS:
        event_bus.unsubscribe(event_name, handler)

    logger.info("Verification event handlers unregistered")
