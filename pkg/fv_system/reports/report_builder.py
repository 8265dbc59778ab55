# fv_system/reports/report_builder.py
"""
Deterministic JSON run reports.

Keys are sorted and floats are plain Python floats, so identical
(config, seed, version) triples give byte-identical files. Wall time is
added only on request.
"""
import json
import logging
from typing import Any, Dict, List, Optional

import numpy as np

from config import Config
from fv_system.experiments.config_loader import Experiment
from fv_system.models.reports import CheckResult

logger = logging.getLogger(__name__)


def _plain(value: Any) -> Any:
    """numpy scalars and arrays, tuples and sets into JSON-native values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted(_plain(v) for v in value)
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, complex):
        return [float(value.real), float(value.imag)]
    return value


class ReportBuilder:
    """Assembles the report dictionary and serializes it."""

    def __init__(self, experiment: Experiment):
        self.experiment = experiment

    def build(self, checks: List[CheckResult], wall_time: Optional[float] = None) -> Dict[str, Any]:
        config = self.experiment.config
        report = {
            "tool": {"name": Config.TOOL_NAME, "version": Config.TOOL_VERSION},
            "experiment": config.experiment,
            "config_digest": self.experiment.digest,
            "seed": config.seed,
            "tolerance": config.tolerance,
            "passed": all(c.passed for c in checks),
            "checks": [
                {
                    "name": c.name,
                    "passed": c.passed,
                    "deviations": c.deviations,
                    "details": c.details,
                }
                for c in checks
            ],
        }
        if wall_time is not None:
            report["wall_time_s"] = wall_time
        return _plain(report)

    def to_json(self, checks: List[CheckResult], wall_time: Optional[float] = None) -> str:
        return json.dumps(self.build(checks, wall_time), sort_keys=True, indent=2) + "\n"
