"""
This module contains the corpus manifest DTOs.

DTOs:
    - ManifestEntry: One utterance with its speaker, file and split.
    - NoiseFile: One named noise recording.
    - CorpusManifest: The whole corpus description consumed by training and evaluation.
"""

from typing import Dict, List, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from models.tags import CorpusSplit
from shared.exceptions import ManifestInvalid


class ManifestEntry(BaseModel):
    speaker_id: str = Field(..., min_length=1, description="Speaker identifier")
    utterance_id: str = Field(..., min_length=1, description="Utterance identifier, unique per speaker")
    wav_path: str = Field(..., min_length=1, description="Path of the 16-bit mono WAV file")
    split: CorpusSplit = Field(..., description="enroll or test")

    model_config = ConfigDict(frozen=True, extra="forbid")


class NoiseFile(BaseModel):
    noise_name: str = Field(..., min_length=1, description="Noise condition name")
    wav_path: str = Field(..., min_length=1, description="Path of the noise WAV file")

    model_config = ConfigDict(frozen=True, extra="forbid")


class CorpusManifest(BaseModel):
    """
    Data Transfer Object describing a corpus.

    Attributes:
        - entries: Utterances with speaker, path and split.
        - noise_files: Named noise recordings used for mixing and grouping.
        - snr_levels_db: SNR conditions of the evaluation, in dB.
    """

    entries: List[ManifestEntry] = Field(default_factory=list, description="Corpus utterances")
    noise_files: List[NoiseFile] = Field(default_factory=list, description="Noise recordings")
    snr_levels_db: List[float] = Field(default_factory=list, description="Evaluation SNRs (dB)")

    model_config = ConfigDict(frozen=True, extra="forbid")

    @model_validator(mode="after")
    def check_unique(self) -> "CorpusManifest":
        keys = [(e.speaker_id, e.utterance_id) for e in self.entries]
        if len(keys) != len(set(keys)):
            raise ValueError("(speaker_id, utterance_id) pairs must be unique")
        names = [n.noise_name for n in self.noise_files]
        if len(names) != len(set(names)):
            raise ValueError("noise names must be unique")
        return self

    def split(self, split: CorpusSplit) -> List[ManifestEntry]:
        return [e for e in self.entries if e.split == split]

    def speakers(self) -> List[str]:
        return sorted({e.speaker_id for e in self.entries})

    def by_speaker(self, split: CorpusSplit) -> Dict[str, List[ManifestEntry]]:
        grouped: Dict[str, List[ManifestEntry]] = {}
        for entry in self.split(split):
            grouped.setdefault(entry.speaker_id, []).append(entry)
        return dict(sorted(grouped.items()))

    def validate_for_evaluation(self) -> None:
        """
        Check the invariants an evaluation run depends on.

        Raises:
            ManifestInvalid: If there are no test entries, no noise files, no SNR levels,
                or a speaker lacks an enroll or a test utterance.
        """
        if not self.split(CorpusSplit.TEST):
            raise ManifestInvalid("manifest has no test entries")
        if not self.noise_files:
            raise ManifestInvalid("manifest has no noise files")
        if not self.snr_levels_db:
            raise ManifestInvalid("manifest has no SNR levels")
        enroll = set(self.by_speaker(CorpusSplit.ENROLL))
        test = set(self.by_speaker(CorpusSplit.TEST))
        incomplete: List[Tuple[str, str]] = [
            (s, "enroll") for s in sorted(test - enroll)
        ] + [(s, "test") for s in sorted(enroll - test)]
        if incomplete:
            raise ManifestInvalid(
                "every speaker needs at least one enroll and one test utterance",
                {"missing": incomplete},
            )

    def validate_for_training(self) -> None:
        if not self.split(CorpusSplit.ENROLL):
            raise ManifestInvalid("manifest has no enroll entries")
        if not self.noise_files:
            raise ManifestInvalid("manifest has no noise files")
