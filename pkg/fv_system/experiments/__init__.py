# fv_system/experiments/__init__.py
from fv_system.experiments.config_loader import Experiment, build_experiment, parse_config
from fv_system.experiments.config_schema import ExperimentConfig
from fv_system.experiments.runner import ExperimentRunner

__all__ = ['Experiment', 'ExperimentConfig', 'ExperimentRunner', 'build_experiment', 'parse_config']
