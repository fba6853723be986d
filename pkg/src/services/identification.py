"""
This module implements closed-set speaker identification: the probe is encoded to a
group of the grouped codebook, its frames are quantized against the symbol codebook and
the candidate speakers' models are scored by forward log-likelihood.

Classes:
    - IdentificationResult: Decision, encoded group and per-speaker scores.

Functions:
    - identify: Identify a probe against codebooks and speaker models.
    - identify_with_system: Identify a probe against an EnrolledSystem.
"""

from dataclasses import dataclass
from typing import Dict, Mapping, Optional

from models.codebook import Codebook
from models.enrolled_system import EnrolledSystem
from models.feature_sequence import FeatureSequence
from models.speaker_model import SpeakerModel
from models.tags import SearchMode
from services.dhmm import forward_log_likelihood
from services.vq import encode, quantize
from shared.exceptions import EmptyModelSet


@dataclass(frozen=True)
class IdentificationResult:
    """
    Attributes:
        speaker_id (str): Highest-scoring candidate; lowest id on ties.
        group (Optional[int]): Encoded group, None in exhaustive mode.
        scores (Dict[str, float]): Log-likelihood per scored speaker, sorted by id.
    """

    speaker_id: str
    group: Optional[int]
    scores: Dict[str, float]


def identify(
    probe: FeatureSequence,
    group_codebook: Codebook,
    symbol_codebook: Codebook,
    models: Mapping[str, SpeakerModel],
    mode: SearchMode = SearchMode.GROUPED,
) -> IdentificationResult:
    """
    Identify the speaker of a probe.

    GROUPED scores only the speakers owning utterances of the probe's group; EXHAUSTIVE
    scores every model. Always answers with an enrolled speaker.

    Args:
        probe (FeatureSequence): Probe features.
        group_codebook (Codebook): Grouped utterance codebook with speaker provenance.
        symbol_codebook (Codebook): Frame-level codebook the models were trained on.
        models (Mapping[str, SpeakerModel]): Speaker models by id.
        mode (SearchMode): Candidate selection.

    Returns:
        IdentificationResult: The decision and its scores.

    Raises:
        EmptyModelSet: If there are no models or a candidate has no model.
        DimMismatch: If the probe dimension differs from the codebooks'.
    """
    if not models:
        raise EmptyModelSet("no speaker models to score")

    group = None
    if SearchMode(mode) == SearchMode.GROUPED:
        group = encode(probe, group_codebook)
        candidates = group_codebook.speakers_in_group(group)
        missing = [s for s in candidates if s not in models]
        if missing:
            raise EmptyModelSet("group speakers without a model", {"missing": missing, "group": group})
    else:
        candidates = tuple(models)

    symbols, _ = quantize(probe, symbol_codebook)
    scores = {speaker: forward_log_likelihood(models[speaker], symbols) for speaker in sorted(candidates)}

    best = None
    for speaker, score in scores.items():
        if best is None or score > scores[best]:
            best = speaker
    return IdentificationResult(speaker_id=best, group=group, scores=scores)


def identify_with_system(
    probe: FeatureSequence,
    system: EnrolledSystem,
    mode: Optional[SearchMode] = None,
) -> IdentificationResult:
    return identify(
        probe,
        system.group_codebook,
        system.symbol_codebook,
        system.models,
        mode or system.config.search_mode,
    )
