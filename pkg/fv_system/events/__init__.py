# fv_system/events/__init__.py
from fv_system.events.event_bus import EventBus, VerificationEvents, event_bus

__all__ = ['EventBus', 'VerificationEvents', 'event_bus']
