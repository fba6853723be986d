"""
Structured logging for the speaker identification pipeline, built on Loguru.

Every record is one JSON object on stderr:

    {"message": "Starting enrollment", "message_json": {"method": "mfcc", "speakers": 5}, "pid": "4242"}

`message` is a short fixed phrase, so records can be grouped by it; `message_json`
carries the identifiers of the unit of work (speaker, utterance, method, noise,
snr_db) and its counters (frames, clipped_samples, failed, rate). stdout stays free
for command results such as the `identify` decision lines.

Classes:
    - Logger: Per-module handle that renders records as JSON.
    - LogHandler: Singleton owning the single stderr sink and its level.
"""

import json
import os
import sys
from loguru import logger
from core.config import settings
from shared.constants import SERVICE_NAME
from utils.singleton import Singleton


class Logger:
    """
    Per-module logging handle, created once at import time as `logger = Logger(__name__)`.

    Records are bound to `<SERVICE_NAME>.<module>`. Values in `message_json` that JSON
    cannot encode (numpy scalars, paths, enums) are written through `str`.

    Args:
        class_name (str): Module or class name appended to the service name.
    """

    def __init__(self, class_name):
        self.logger = LogHandler().get_logger(class_name)

    def debug(self, msg, message_json=None):
        """Step detail: GA generations, Baum-Welch convergence, files written."""
        self.logger.debug(self.__prepare_log(msg, message_json))

    def info(self, msg, message_json=None):
        """Start and completion of pipeline operations with their key identifiers."""
        self.logger.info(self.__prepare_log(msg, message_json))

    def warning(self, msg, message_json=None):
        """
        Recoverable conditions that change results.

        Clamped samples, clamped group counts, repaired empty codebook cells and
        utterances excluded from a condition are reported here with their counts.
        """
        self.logger.warning(self.__prepare_log(msg, message_json))

    def error(self, msg, message_json=None):
        """Failures about to be raised, with the error and the operation's identifiers."""
        self.logger.error(self.__prepare_log(msg, message_json))

    def fatal(self, msg, message_json=None):
        self.logger.critical(self.__prepare_log(msg, message_json))

    def __prepare_log(self, msg, message_json):
        record = {
            "message": msg,
            "message_json": message_json or {},
            "pid": str(os.getpid()),
        }
        return json.dumps(record, default=str)


class LogHandler(metaclass=Singleton):
    """
    Owner of the process-wide stderr sink.

    The level starts at `Settings.LOG_LEVEL` (env `SPKID_LOG_LEVEL`) and the CLI's
    `--log-level` flag replaces it through `set_level`.
    """

    def __init__(self) -> None:
        self.level = settings.LOG_LEVEL
        self.__setup_root_logger()

    def get_logger(self, class_name):
        """
        Loguru logger bound to `<SERVICE_NAME>.<class_name>`.

        Args:
            class_name (str): Module or class name of the caller.

        Returns:
            logger: A bound Loguru logger.
        """
        return logger.bind(name=f"{SERVICE_NAME}.{class_name}")

    def set_level(self, level: str) -> None:
        """
        Reinstall the stderr sink at a new level.

        Args:
            level (str): A Loguru level name such as "DEBUG" or "WARNING".

        Raises:
            ValueError: If Loguru does not know the level; no sink is installed then.
        """
        self.level = level.upper()
        self.__setup_root_logger()

    def __setup_root_logger(self):
        logger.remove()
        logger.add(sys.stderr, level=self.level)
