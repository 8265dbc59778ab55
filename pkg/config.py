# fvlab/config.py
"""
Configuration management for fvlab.

Holds the ambient settings of the verifier: numerical tolerances, the dense
dimension cap, adversary search budget, campaign concurrency and logging.
Values come from built-in defaults, optionally overridden from .env.

Physics inputs (gates, states, geometry, seeds) never come from here; they
live in the experiment config so that reports stay reproducible.
"""
import os
import logging
from typing import Any, Callable, Dict, Set

from dotenv import load_dotenv

logger = logging.getLogger(__name__)


class ConfigurationError(Exception):
    """Configuration error exception."""
    pass


class Config:
    """
    Process-wide configuration registry.

    Usage:
        Config.initialize_from_env()
        tol = Config.get(Config.PHYSICS_TOLERANCE)

    Library code may call get() before initialization; built-in defaults are
    returned in that case.
    """

    # ═══════════════════════════════════════════════════════════════════════
    # CONFIGURATION KEYS
    # ═══════════════════════════════════════════════════════════════════════

    # Tolerances
    PHYSICS_TOLERANCE = "PHYSICS_TOLERANCE"
    ALGEBRA_TOLERANCE = "ALGEBRA_TOLERANCE"
    ZERO_PROBABILITY = "ZERO_PROBABILITY"

    # Dense backend
    MAX_DIMENSION = "MAX_DIMENSION"
    GENERATOR_CACHE_SIZE = "GENERATOR_CACHE_SIZE"

    # Protocols
    ADVERSARY_THRESHOLD = "ADVERSARY_THRESHOLD"
    ADVERSARY_SEARCH_BUDGET = "ADVERSARY_SEARCH_BUDGET"

    # Campaigns
    CAMPAIGN_WORKERS = "CAMPAIGN_WORKERS"

    # Logging
    LOG_LEVEL = "LOG_LEVEL"
    LOG_FILE = "LOG_FILE"

    # Tool identity (reported, not configurable)
    TOOL_NAME = "fvlab"
    TOOL_VERSION = "1.0.0"

    # ═══════════════════════════════════════════════════════════════════════
    # DEFAULTS
    # ═══════════════════════════════════════════════════════════════════════

    _DEFAULTS: Dict[str, Any] = {
        PHYSICS_TOLERANCE: 1e-9,
        ALGEBRA_TOLERANCE: 1e-12,
        ZERO_PROBABILITY: 1e-12,
        MAX_DIMENSION: 1024,
        GENERATOR_CACHE_SIZE: 4096,
        ADVERSARY_THRESHOLD: 0.01,
        ADVERSARY_SEARCH_BUDGET: 64,
        CAMPAIGN_WORKERS: 4,
        LOG_LEVEL: "INFO",
        LOG_FILE: "fvlab.log",
    }

    _PARSERS: Dict[str, Callable[[str], Any]] = {
        PHYSICS_TOLERANCE: float,
        ALGEBRA_TOLERANCE: float,
        ZERO_PROBABILITY: float,
        MAX_DIMENSION: int,
        GENERATOR_CACHE_SIZE: int,
        ADVERSARY_THRESHOLD: float,
        ADVERSARY_SEARCH_BUDGET: int,
        CAMPAIGN_WORKERS: int,
        LOG_LEVEL: str,
        LOG_FILE: str,
    }

    # Must be strictly positive
    POSITIVE_KEYS = [
        PHYSICS_TOLERANCE,
        ALGEBRA_TOLERANCE,
        ZERO_PROBABILITY,
        MAX_DIMENSION,
        GENERATOR_CACHE_SIZE,
        ADVERSARY_THRESHOLD,
        CAMPAIGN_WORKERS,
    ]

    # ═══════════════════════════════════════════════════════════════════════
    # STORAGE
    # ═══════════════════════════════════════════════════════════════════════

    _config: Dict[str, Any] = {}
    _initialized: bool = False
    _warned: Set[str] = set()

    # ═══════════════════════════════════════════════════════════════════════
    # METHODS
    # ═══════════════════════════════════════════════════════════════════════

    @classmethod
    def initialize_from_env(cls) -> None:
        """
        Load configuration from .env (if present) on top of defaults.

        Raises:
            ConfigurationError: If a value cannot be parsed or is out of range
        """
        try:
            load_dotenv()
            logger.debug("Loading configuration from .env...")

            cls._config = dict(cls._DEFAULTS)

            for key, parser in cls._PARSERS.items():
                raw = os.getenv(f"FVLAB_{key}")
                if raw is None or raw.strip() == "":
                    continue
                try:
                    cls._config[key] = parser(raw.strip())
                except ValueError as e:
                    raise ConfigurationError(f"Invalid value for FVLAB_{key}: {raw!r} ({e})")

            cls._initialized = True
            cls.validate_critical_keys()
            logger.debug("✓ Configuration loaded")

        except ConfigurationError:
            raise
        except Exception as e:
            logger.error(f"Failed to load configuration: {e}", exc_info=True)
            raise ConfigurationError(f"Configuration initialization failed: {e}")

    @classmethod
    def get(cls, key: str, default: Any = None) -> Any:
        """
        Get a configuration value by key.

        Args:
            key: Configuration key
            default: Value returned if the key is unknown

        Returns:
            Configured value, built-in default, or `default`
        """
        if not cls._initialized and key not in cls._warned:
            cls._warned.add(key)
            logger.debug(f"Config accessed before initialization: {key} (using default)")

        if key in cls._config:
            return cls._config[key]
        return cls._DEFAULTS.get(key, default)

    @classmethod
    def set(cls, key: str, value: Any) -> None:
        """
        Override a configuration value at runtime.

        Args:
            key: Configuration key
            value: New value
        """
        if not cls._config:
            cls._config = dict(cls._DEFAULTS)
        cls._config[key] = value
        logger.debug(f"Set config: {key}")

    @classmethod
    def reset(cls) -> None:
        """Drop overrides and return to defaults."""
        cls._config = dict(cls._DEFAULTS)

    @classmethod
    def validate_critical_keys(cls) -> None:
        """
        Validate that numeric settings are in range.

        Raises:
            ConfigurationError: If any positive key is not positive
        """
        bad = [key for key in cls.POSITIVE_KEYS if not cls.get(key) or cls.get(key) <= 0]
        if bad:
            error_msg = f"Configuration keys must be positive: {', '.join(bad)}"
            logger.critical(error_msg)
            raise ConfigurationError(error_msg)

        if cls.get(cls.ADVERSARY_SEARCH_BUDGET) < 0:
            raise ConfigurationError("ADVERSARY_SEARCH_BUDGET must be non-negative")

        level = str(cls.get(cls.LOG_LEVEL)).upper()
        if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ConfigurationError(f"Unknown LOG_LEVEL: {level}")
