"""
This module contains the SystemRepository class for storing and loading enrolled
systems as one versioned JSON container.

Classes:
    - SystemRepository: Converts between EnrolledSystem and its DTO and persists it.
"""

import json

from pydantic import ValidationError

from models.codebook import Codebook
from models.enrolled_system import EnrolledSystem
from models.speaker_model import SpeakerModel
from repositories.base_repository import BaseRepository, PathLike
from schemas.system import CodebookDTO, EnrolledSystemDTO, SpeakerModelDTO
from shared.constants import SYSTEM_FILE_NAME, SYSTEM_FORMAT_VERSION
from shared.exceptions import ModelInvalid


def codebook_to_dto(cb: Codebook) -> CodebookDTO:
    return CodebookDTO(
        dim=cb.dim,
        codewords=cb.codewords.tolist(),
        groups=[list(g) for g in cb.groups],
        leaders=list(cb.leaders),
        member_meta=[list(m) for m in cb.member_meta] if cb.member_meta is not None else None,
        provenance=cb.provenance,
    )


def codebook_from_dto(dto: CodebookDTO) -> Codebook:
    return Codebook(
        dto.codewords,
        groups=tuple(tuple(g) for g in dto.groups),
        leaders=tuple(dto.leaders),
        member_meta=tuple(tuple(m) for m in dto.member_meta) if dto.member_meta is not None else None,
        provenance=dto.provenance,
    )


class SystemRepository(BaseRepository):
    """
    Repository class for the `system.json` container of a model directory.
    """

    def __init__(self, root: PathLike) -> None:
        """
        Initialize the SystemRepository with its model directory.

        Args:
            root (PathLike): Model directory.
        """
        super().__init__(class_name=__name__, root=root)

    @staticmethod
    def to_dto(system: EnrolledSystem) -> EnrolledSystemDTO:
        return EnrolledSystemDTO(
            format_version=SYSTEM_FORMAT_VERSION,
            method=system.method,
            config=system.config,
            noise_names=list(system.noise_names),
            group_codebook=codebook_to_dto(system.group_codebook),
            symbol_codebook=codebook_to_dto(system.symbol_codebook),
            models=[
                SpeakerModelDTO(
                    speaker_id=speaker,
                    pi=model.pi.tolist(),
                    trans=model.trans.tolist(),
                    emit=model.emit.tolist(),
                )
                for speaker, model in system.models.items()
            ],
        )

    @staticmethod
    def from_dto(dto: EnrolledSystemDTO) -> EnrolledSystem:
        return EnrolledSystem(
            method=dto.method,
            group_codebook=codebook_from_dto(dto.group_codebook),
            symbol_codebook=codebook_from_dto(dto.symbol_codebook),
            models={m.speaker_id: SpeakerModel(m.speaker_id, m.pi, m.trans, m.emit) for m in dto.models},
            config=dto.config,
            noise_names=tuple(dto.noise_names),
        )

    def save(self, system: EnrolledSystem):
        """
        Store a system as sorted-key JSON, byte-identical for identical systems.

        Args:
            system (EnrolledSystem): The trained system.

        Returns:
            Path: The written container.
        """
        payload = self.to_dto(system).model_dump(mode="json")
        path = self.write_text(SYSTEM_FILE_NAME, json.dumps(payload, sort_keys=True, indent=2) + "\n")
        self.logger.info("System saved", {"path": str(path), "speakers": len(system.models)})
        return path

    def load(self) -> EnrolledSystem:
        """
        Load the system of this model directory.

        Returns:
            EnrolledSystem: The stored system.

        Raises:
            MissingFile: If the directory holds no container.
            ModelInvalid: If the container is malformed or of another version.
        """
        try:
            payload = json.loads(self.read_text(SYSTEM_FILE_NAME))
        except json.JSONDecodeError as e:
            raise ModelInvalid(f"system container is not valid JSON: {e}") from e
        if not isinstance(payload, dict) or payload.get("format_version") != SYSTEM_FORMAT_VERSION:
            raise ModelInvalid(
                "unsupported system container version",
                {"expected": SYSTEM_FORMAT_VERSION, "found": payload.get("format_version") if isinstance(payload, dict) else None},
            )
        try:
            dto = EnrolledSystemDTO.model_validate(payload)
        except ValidationError as e:
            first = e.errors()[0]
            raise ModelInvalid(f"malformed system container at {first['loc']}: {first['msg']}") from e
        return self.from_dto(dto)
