"""
This module defines the Settings class, which holds the process-level configuration, and the
loader that turns a config file plus command-line overrides into a validated RunConfig.

The settings include:
    - Service name used as the logger namespace
    - Log level of the stderr sink
    - Default run-config path used when `--config` is omitted

Functions:
    - load_run_config: Merge a JSON config file with flag overrides and validate the result.
"""

import json
from pathlib import Path
from typing import Any, Dict, Optional, Union

from pydantic import ConfigDict, ValidationError, field_validator
from pydantic_settings import BaseSettings

from schemas.run_config import RunConfig
from shared.exceptions import MissingFile, RunConfigInvalid


class Settings(BaseSettings):
    """
    Settings class that holds the configuration values for the process.

    Attributes:
        SERVICE_NAME (str): The name of the service.
        LOG_LEVEL (str): Minimum level written to stderr.
        CONFIG_PATH (Optional[str]): Run-config file used when no `--config` flag is given.
    """

    SERVICE_NAME: str = "speaker-id"
    LOG_LEVEL: str = "INFO"
    CONFIG_PATH: Optional[str] = None

    @field_validator("LOG_LEVEL")
    def normalize_level(cls, v: str) -> str:
        """
        Validate and normalize the log level name.

        Args:
            v (str): A level name in any case.

        Returns:
            str: The upper-cased level name.

        Raises:
            ValueError: If the level is not one Loguru knows.
        """
        level = v.strip().upper()
        if level not in {"TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(v)
        return level

    model_config = ConfigDict(
        case_sensitive=True,
        env_prefix="SPKID_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )


settings = Settings()


def load_run_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Optional[Dict[str, Any]] = None,
) -> RunConfig:
    """
    Build the RunConfig for one command.

    Values come from, in increasing precedence: field defaults, the config file
    (explicit `path`, else `settings.CONFIG_PATH`), then `overrides`.

    Args:
        path (Optional[Union[str, Path]]): JSON file holding a flat object of config keys.
        overrides (Optional[Dict[str, Any]]): Values taken from command-line flags.

    Returns:
        RunConfig: The validated, frozen run configuration.

    Raises:
        MissingFile: If the config file does not exist.
        RunConfigInvalid: If the file is not a JSON object, or a key is unknown or out of range.
    """
    values: Dict[str, Any] = {}
    config_path = path if path is not None else settings.CONFIG_PATH
    if config_path:
        config_path = Path(config_path)
        if not config_path.is_file():
            raise MissingFile(f"config file not found: {config_path}", {"path": str(config_path)})
        try:
            loaded = json.loads(config_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise RunConfigInvalid(f"config file is not valid JSON: {e}", {"path": str(config_path)}) from e
        if not isinstance(loaded, dict):
            raise RunConfigInvalid("config file must hold a JSON object", {"path": str(config_path)})
        values.update(loaded)
    values.update(overrides or {})
    try:
        return RunConfig.model_validate(values)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first.get("loc", ()))
        raise RunConfigInvalid(f"{location}: {first.get('msg')}", {"errors": len(e.errors())}) from e
