"""
Logging for rdplab, built on loguru.

Console records go to stderr: stdout belongs to the CSV tables and JSON
reports of the command line tool. An optional file sink writes one JSON
record per line. Measured simulation statistics are logged at the METRIC
level, which sits between WARNING and ERROR so they stay visible when the
console is turned down to warnings.

Environment variables override the configuration passed in code:

    - RDPLAB_LOG_DISABLED: disable rdplab logging entirely (default: false)
    - RDPLAB_CLEAR_LOGGERS: remove previously added sinks (default: true)
    - RDPLAB_LOG_LEVEL: console level, any loguru level name or METRIC
    - RDPLAB_LOG_FILE: path of the JSON lines log file
    - RDPLAB_LOG_FILE_LEVEL: file level (default INFO when a file is set)

Usage::

    from rdplab import LoggerConfig, configure_logger, logger
    from rdplab.logger import log_metrics

    configure_logger(LoggerConfig(console_log_level="WARNING"))
    log_metrics("va n=4", empirical_distortion=0.2501, empirical_tv=0.003)
"""

import os
import sys
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

from loguru import logger

from rdplab.utils.helpers import convert_to_bool

__all__ = [
    "METRIC_LEVEL",
    "LoggerConfig",
    "configure_logger",
    "log_metrics",
    "logger",
]

METRIC_LEVEL = "METRIC"
METRIC_LEVEL_NO = 38

CONSOLE_FORMAT = "{time:HH:mm:ss.SSS} | {name} | {level} - {message}"
DEFAULT_LOG_FILE = "rdplab.log"


@dataclass
class LoggerConfig:
    """
    :param disabled: silence every rdplab record
    :param clear_loggers: remove existing loguru sinks before adding ours
    :param console_log_level: stderr level, None for no console sink
    :param log_file: path of the JSON lines file sink
    :param log_file_level: level of the file sink
    """

    disabled: bool = False
    clear_loggers: bool = True
    console_log_level: Optional[str] = "INFO"
    log_file: Optional[str] = None
    log_file_level: Optional[str] = None


_ENV_OVERRIDES: Dict[str, Tuple[str, Callable[[str], object]]] = {
    "RDPLAB_LOG_DISABLED": ("disabled", convert_to_bool),
    "RDPLAB_CLEAR_LOGGERS": ("clear_loggers", convert_to_bool),
    "RDPLAB_LOG_LEVEL": ("console_log_level", str.upper),
    "RDPLAB_LOG_FILE": ("log_file", str),
    "RDPLAB_LOG_FILE_LEVEL": ("log_file_level", str.upper),
}


def _apply_environment(config: LoggerConfig) -> LoggerConfig:
    for variable, (attribute, convert) in _ENV_OVERRIDES.items():
        value = os.getenv(variable)
        if value is not None:
            setattr(config, attribute, convert(value))
    return config


def _register_metric_level():
    try:
        logger.level(METRIC_LEVEL)
    except ValueError:
        logger.level(METRIC_LEVEL, no=METRIC_LEVEL_NO, color="<yellow>")


def configure_logger(config: Optional[LoggerConfig] = None):
    """
    Set up the rdplab sinks. Environment variables take precedence over the
    values in config.

    :param config: the logger configuration, defaults to console INFO only
    """
    config = _apply_environment(config or LoggerConfig())
    _register_metric_level()

    if config.disabled:
        logger.disable("rdplab")
        return
    logger.enable("rdplab")

    if config.clear_loggers:
        logger.remove()

    if config.console_log_level:
        logger.add(
            sys.stderr, level=config.console_log_level.upper(), format=CONSOLE_FORMAT
        )

    if config.log_file or config.log_file_level:
        logger.add(
            config.log_file or DEFAULT_LOG_FILE,
            level=(config.log_file_level or "INFO").upper(),
            serialize=True,
        )


def log_metrics(scope: str, **values: float):
    """
    Log measured statistics as one METRIC record, floats to six significant
    digits: ``scope: name=value name=value``

    :param scope: what was measured, e.g. the criterion and block length
    :param values: named measurements
    """
    fields = " ".join(
        f"{name}={value:.6g}" if isinstance(value, float) else f"{name}={value}"
        for name, value in values.items()
    )
    logger.log(METRIC_LEVEL, f"{scope}: {fields}")


configure_logger()
