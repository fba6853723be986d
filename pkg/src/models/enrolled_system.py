"""
This module defines EnrolledSystem, everything identification needs after training.

Classes:
    - EnrolledSystem: Group codebook, symbol codebook and one speaker model per enrolled speaker.
"""

from dataclasses import dataclass, field
from typing import Dict, Tuple

from models.codebook import Codebook
from models.speaker_model import SpeakerModel
from models.tags import FeatureMethod
from schemas.run_config import RunConfig
from shared.exceptions import EmptyModelSet, ModelInvalid


@dataclass(frozen=True, eq=False)
class EnrolledSystem:
    """
    A trained identification system.

    Attributes:
        method (FeatureMethod): Feature method both codebooks were trained on.
        group_codebook (Codebook): Utterance-mean codewords grouped by noise profile.
        symbol_codebook (Codebook): Frame-level codebook producing DHMM symbols.
        models (Dict[str, SpeakerModel]): Speaker models keyed by speaker id.
        config (RunConfig): Configuration the system was trained with.
        noise_names (tuple): Noise references used for the grouping profiles.
    """

    method: FeatureMethod
    group_codebook: Codebook
    symbol_codebook: Codebook
    models: Dict[str, SpeakerModel]
    config: RunConfig
    noise_names: Tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if not self.models:
            raise EmptyModelSet("an enrolled system needs at least one speaker model")
        for speaker_id, model in self.models.items():
            if model.n_symbols != self.symbol_codebook.size:
                raise ModelInvalid(
                    "speaker model alphabet does not match the symbol codebook",
                    {"speaker_id": speaker_id, "n_symbols": model.n_symbols},
                )
        missing = set(self.group_codebook.speakers()) - set(self.models)
        if missing:
            raise EmptyModelSet(
                "group codebook references speakers without a model",
                {"missing": sorted(missing)},
            )
        object.__setattr__(self, "method", FeatureMethod(self.method))
        object.__setattr__(self, "models", dict(sorted(self.models.items())))
        object.__setattr__(self, "noise_names", tuple(self.noise_names))

    @property
    def speakers(self) -> Tuple[str, ...]:
        return tuple(self.models)
