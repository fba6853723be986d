"""
Helpers shared by the subcommands.

Functions:
    - output_path: The `-o` target, else the configured output directory.
    - load_manifest: The manifest named by the run configuration.
"""

from pathlib import Path

from repositories.manifest_repository import ManifestRepository
from schemas.manifest import CorpusManifest
from schemas.run_config import RunConfig
from shared.exceptions import RunConfigInvalid


def output_path(args, config: RunConfig) -> Path:
    target = getattr(args, "output", None) or config.output_dir
    if not target:
        raise RunConfigInvalid("an output path is required (-o or output_dir)")
    return Path(target)


def load_manifest(config: RunConfig) -> CorpusManifest:
    if not config.manifest_path:
        raise RunConfigInvalid("a manifest is required (--manifest or manifest_path)")
    return ManifestRepository(config.manifest_path).load()
