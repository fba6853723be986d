"""
This module contains the BaseRepository class, which provides common file
operations for other repositories.

Every repository is rooted at one directory; writes go through a temporary file in the
same directory and are moved into place, so a reader never sees a half-written file.

Classes:
    - BaseRepository: An abstract base class that provides common file read/write operations.
"""

import os
import tempfile
from abc import ABCMeta
from pathlib import Path
from typing import Union

from shared.exceptions import IoFailure, MissingFile
from utils.logger import Logger


PathLike = Union[str, Path]


class BaseRepository(metaclass=ABCMeta):
    """
    Abstract base repository class for files under one root directory.
    """

    def __init__(self, class_name: str, root: PathLike) -> None:
        """
        Initialize the BaseRepository with a root directory and logger.

        Args:
            class_name (str): The name of the class using this repository (used for logging).
            root (PathLike): Directory the repository reads and writes.
        """
        self.__root = Path(root)
        self.logger = Logger(class_name)

    @property
    def root(self) -> Path:
        return self.__root

    def path(self, name: str) -> Path:
        return self.__root / name

    def exists(self, name: str) -> bool:
        return self.path(name).is_file()

    def write_bytes(self, name: str, data: bytes) -> Path:
        """
        Atomically write a file under the root, creating the root if needed.

        Args:
            name (str): File name relative to the root.
            data (bytes): Content.

        Returns:
            Path: The written file.

        Raises:
            IoFailure: If the file cannot be written.
        """
        target = self.path(name)
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.")
            try:
                with os.fdopen(fd, "wb") as handle:
                    handle.write(data)
                os.replace(tmp, target)
            except BaseException:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                raise
        except OSError as e:
            raise IoFailure(f"cannot write {target}: {e}", {"path": str(target)}) from e
        self.logger.debug("File written", {"path": str(target), "bytes": len(data)})
        return target

    def write_text(self, name: str, text: str) -> Path:
        return self.write_bytes(name, text.encode("utf-8"))

    def read_bytes(self, name: str) -> bytes:
        """
        Read a file under the root.

        Raises:
            MissingFile: If the file does not exist.
            IoFailure: If it cannot be read.
        """
        target = self.path(name)
        if not target.is_file():
            raise MissingFile(f"file not found: {target}", {"path": str(target)})
        try:
            return target.read_bytes()
        except OSError as e:
            raise IoFailure(f"cannot read {target}: {e}", {"path": str(target)}) from e

    def read_text(self, name: str) -> str:
        return self.read_bytes(name).decode("utf-8")
