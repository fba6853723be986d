"""
This module defines the tag enumerations shared by configs, domain types and persisted files.

Classes:
    - FeatureMethod: The six feature extractors.
    - FitnessMode: The two readings of the GA fitness.
    - SearchMode: Grouped or exhaustive identification search.
    - CorpusSplit: Manifest split of an utterance.
    - CodebookTrainer: GA or LBG symbol-codebook design.
    - HmmTopology: Initial transition structure of a speaker model.
    - DeltaMode: Standalone or concatenated delta features.
"""

from enum import Enum


class FeatureMethod(str, Enum):
    LPC = "lpc"
    LPCC = "lpcc"
    RCC = "rcc"
    MFCC = "mfcc"
    DMFCC = "dmfcc"
    DDMFCC = "ddmfcc"

    @property
    def code(self) -> int:
        """Stable integer used by the binary feature file."""
        return list(FeatureMethod).index(self) + 1

    @classmethod
    def from_code(cls, code: int) -> "FeatureMethod":
        members = list(cls)
        if not 1 <= code <= len(members):
            raise ValueError(f"unknown feature method code {code}")
        return members[code - 1]


class FitnessMode(str, Enum):
    SIMILARITY = "similarity"
    NEG_DISTORTION = "neg_distortion"


class SearchMode(str, Enum):
    GROUPED = "grouped"
    EXHAUSTIVE = "exhaustive"


class CorpusSplit(str, Enum):
    ENROLL = "enroll"
    TEST = "test"


class CodebookTrainer(str, Enum):
    GA = "ga"
    LBG = "lbg"


class HmmTopology(str, Enum):
    LEFT_TO_RIGHT = "left_to_right"
    ERGODIC = "ergodic"


class DeltaMode(str, Enum):
    STANDALONE = "standalone"
    CONCATENATED = "concatenated"
