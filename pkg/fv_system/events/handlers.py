# fv_system/events/handlers.py
"""
Logging subscribers for verification events.
"""
import logging
from typing import Any, Dict

logger = logging.getLogger(__name__)


def handle_campaign_started(data: Dict[str, Any]):
    logger.info(f"Campaign {data.get('check')!r}: {data.get('trials')} trials, seed {data.get('seed')}")


def handle_trial_completed(data: Dict[str, Any]):
    logger.debug(
        f"Trial {data.get('check')}[{data.get('index')}] "
        f"max deviation {data.get('max_deviation', 0.0):.3e} passed={data.get('passed')}"
    )


def handle_trial_failed(data: Dict[str, Any]):
    logger.warning(
        f"Trial {data.get('check')}[{data.get('index')}] failed: {data.get('reason')}"
    )


def handle_campaign_finished(data: Dict[str, Any]):
    logger.info(
        f"✓ Campaign {data.get('check')!r} done: {data.get('passed')}/{data.get('trials')} passed, "
        f"worst deviation {data.get('worst', 0.0):.3e}"
    )


def handle_check_finished(data: Dict[str, Any]):
    status = "passed" if data.get("passed") else "FAILED"
    logger.info(f"Check {data.get('name')!r} {status}")
