# fv_system/config/__init__.py
from fv_system.config.presets import (
    GatePreset,
    ObservablePreset,
    StatePreset,
    gate_preset,
    observable_preset,
    state_preset,
)

__all__ = [
    'GatePreset',
    'StatePreset',
    'ObservablePreset',
    'gate_preset',
    'state_preset',
    'observable_preset',
]
