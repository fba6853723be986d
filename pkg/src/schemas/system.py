"""
This module contains the Data Transfer Objects of the persisted enrolled system (`system.json`).

DTOs:
    - CodebookDTO: A codebook with groups, leaders, member provenance and training metadata.
    - SpeakerModelDTO: One speaker's discrete HMM.
    - EnrolledSystemDTO: Versioned container of both codebooks, all models and the run config.
"""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from models.tags import FeatureMethod
from schemas.run_config import RunConfig
from shared.constants import SYSTEM_FORMAT_VERSION


class CodebookDTO(BaseModel):
    dim: int = Field(..., ge=1, description="Codeword dimension")
    codewords: List[List[float]] = Field(..., description="Codeword vectors")
    groups: List[List[int]] = Field(..., description="Partition of codeword indices")
    leaders: List[int] = Field(..., description="Leading codeword per group")
    member_meta: Optional[List[List[str]]] = Field(None, description="(speaker_id, utterance_id) per codeword")
    provenance: Dict[str, Any] = Field(default_factory=dict, description="Trainer, config and histories")

    model_config = ConfigDict(from_attributes=True)


class SpeakerModelDTO(BaseModel):
    speaker_id: str
    pi: List[float]
    trans: List[List[float]]
    emit: List[List[float]]

    model_config = ConfigDict(from_attributes=True)


class EnrolledSystemDTO(BaseModel):
    """
    Data Transfer Object for a persisted system.

    Attributes:
        - format_version: Container version, bumped on incompatible layout changes.
        - method: Feature method of both codebooks.
        - config: RunConfig snapshot used for training.
        - noise_names: Noise references used for grouping.
        - group_codebook: Encoder codebook.
        - symbol_codebook: DHMM symbol codebook.
        - models: Speaker models sorted by speaker id.
    """

    format_version: int = Field(SYSTEM_FORMAT_VERSION, description="Container version")
    method: FeatureMethod
    config: RunConfig
    noise_names: List[str] = Field(default_factory=list)
    group_codebook: CodebookDTO
    symbol_codebook: CodebookDTO
    models: List[SpeakerModelDTO]
