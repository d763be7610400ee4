import logging
import os

import yaml

from hybeam.constants import INSTANCE_CONFIG, THREADS_ENV
from hybeam.errors import ConfigError

__version__ = "0.1.0"

DEFAULT_SETTINGS = {
    "THREADS": os.cpu_count() or 1,
    "OUTDIR": "results",
    "PROP_TOLERANCE": 0.05,
    "LOG_LEVEL": "WARNING",
}

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _threads(value, source):
    try:
        threads = int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{source} must be a positive integer, got '{value}'")
    if threads < 1:
        raise ConfigError(f"{source} must be a positive integer, got '{value}'")
    return threads


def _log_level(value):
    name = str(value).upper()
    if name not in LOG_LEVELS:
        raise ConfigError(f"LOG_LEVEL must be one of {', '.join(LOG_LEVELS)}, got '{value}'")
    return name


def create_settings(test_config=None):
    """
    Settings factory. Defaults are overridden by an optional hybeam.cfg.yml in
    the working directory, then by the HYBEAM_THREADS environment variable and
    finally by *test_config*.
    """

    settings = dict(DEFAULT_SETTINGS)

    if os.path.exists(INSTANCE_CONFIG):
        try:
            with open(INSTANCE_CONFIG) as handle:
                doc = yaml.safe_load(handle)
        except (OSError, UnicodeDecodeError, yaml.YAMLError) as err:
            raise ConfigError(description=f"cannot parse {INSTANCE_CONFIG}: {err}")
        if doc is not None and not isinstance(doc, dict):
            raise ConfigError(f"{INSTANCE_CONFIG} must hold a mapping of settings")
        settings.update(doc or {})

    if os.environ.get(THREADS_ENV):
        settings["THREADS"] = _threads(os.environ[THREADS_ENV], THREADS_ENV)

    if test_config is not None:
        settings.update(test_config)

    settings["THREADS"] = _threads(settings["THREADS"], "THREADS")
    settings["LOG_LEVEL"] = _log_level(settings["LOG_LEVEL"])
    return settings


def configure_logging(level=logging.WARNING):
    """
    Install one stream handler on the package logger. Calling again only
    changes the level.
    """

    logger = logging.getLogger("hybeam")
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
    logger.setLevel(level)
    return logger
