"""
This module defines the BaseService class, which provides logging and the error-wrapping
convention shared by every orchestration service.

Classes:
    - BaseService: An abstract base class that provides logging for derived services.
"""

from abc import ABCMeta
from contextlib import contextmanager
from typing import Any, Dict, Iterator, Optional

from shared.exceptions import InternalError, SpeakerIdError
from utils.logger import Logger


class BaseService(metaclass=ABCMeta):
    """
    Abstract base service class that provides logging functionality.

    Attributes:
        logger (Logger): An instance of the Logger class for logging messages.
    """

    def __init__(self, class_name: str) -> None:
        """
        Initialize the BaseService with a logger.

        Args:
            class_name (str): The name of the class using the service, used for logging.
        """
        self.logger = Logger(class_name)

    @contextmanager
    def operation(self, name: str, message_json: Optional[Dict[str, Any]] = None) -> Iterator[None]:
        """
        Log the start and completion of an operation and normalize its failures.

        Pipeline errors pass through unchanged; anything else is logged and re-raised as
        InternalError chained to the original exception.

        Args:
            name (str): Operation name used in the log messages.
            message_json (Optional[dict]): Identifiers logged with both messages.

        Raises:
            SpeakerIdError: The original pipeline error.
            InternalError: For any other exception.
        """
        self.logger.info(f"Starting {name}", message_json)
        try:
            yield
        except SpeakerIdError as known:
            self.logger.error(
                f"{name} failed",
                {**(message_json or {}), "error": known.name, "detail": known.message},
            )
            raise known
        except Exception as e:
            self.logger.error(f"An error occurred in {name}", {"error": str(e)})
            raise InternalError(f"{name}: {e}", message_json) from e
        self.logger.info(f"{name} completed successfully", message_json)
