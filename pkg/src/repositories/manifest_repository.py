"""
This module contains the ManifestRepository class for corpus manifests.

Classes:
    - ManifestRepository: Loads a manifest with its paths resolved against the manifest's
      directory, and stores manifests with paths relative to it.
"""

import json
import os
from pathlib import Path

from pydantic import ValidationError

from repositories.base_repository import BaseRepository, PathLike
from schemas.manifest import CorpusManifest
from shared.constants import MANIFEST_FILE_NAME
from shared.exceptions import ManifestInvalid


class ManifestRepository(BaseRepository):
    """
    Repository class for one manifest file.

    Attributes:
        name (str): File name of the manifest inside its directory.
    """

    def __init__(self, manifest_path: PathLike) -> None:
        manifest_path = Path(manifest_path)
        if manifest_path.suffix.lower() != ".json":
            manifest_path = manifest_path / MANIFEST_FILE_NAME
        super().__init__(class_name=__name__, root=manifest_path.parent)
        self.name = manifest_path.name

    def __resolve(self, wav_path: str) -> str:
        path = Path(wav_path)
        return str(path if path.is_absolute() else (self.root / path).resolve())

    def __relative(self, wav_path: str) -> str:
        path = Path(wav_path)
        if not path.is_absolute():
            return path.as_posix()
        return Path(os.path.relpath(path, self.root.resolve())).as_posix()

    def load(self) -> CorpusManifest:
        """
        Read and validate the manifest.

        Returns:
            CorpusManifest: Manifest with absolute wav paths.

        Raises:
            MissingFile: If the manifest does not exist.
            ManifestInvalid: If it is not valid JSON or does not match the schema.
        """
        try:
            payload = json.loads(self.read_text(self.name))
            manifest = CorpusManifest.model_validate(payload)
        except json.JSONDecodeError as e:
            raise ManifestInvalid(f"manifest is not valid JSON: {e}", {"path": str(self.path(self.name))}) from e
        except ValidationError as e:
            first = e.errors()[0]
            raise ManifestInvalid(
                f"manifest field {'.'.join(str(p) for p in first['loc'])}: {first['msg']}",
                {"path": str(self.path(self.name))},
            ) from e
        resolved = manifest.model_copy(
            update={
                "entries": [e.model_copy(update={"wav_path": self.__resolve(e.wav_path)}) for e in manifest.entries],
                "noise_files": [n.model_copy(update={"wav_path": self.__resolve(n.wav_path)}) for n in manifest.noise_files],
            }
        )
        self.logger.info(
            "Manifest loaded",
            {"path": str(self.path(self.name)), "entries": len(resolved.entries), "noises": len(resolved.noise_files)},
        )
        return resolved

    def save(self, manifest: CorpusManifest) -> Path:
        relative = manifest.model_copy(
            update={
                "entries": [e.model_copy(update={"wav_path": self.__relative(e.wav_path)}) for e in manifest.entries],
                "noise_files": [n.model_copy(update={"wav_path": self.__relative(n.wav_path)}) for n in manifest.noise_files],
            }
        )
        return self.write_text(self.name, json.dumps(relative.model_dump(mode="json"), indent=2) + "\n")
