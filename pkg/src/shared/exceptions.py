"""
This module defines the error hierarchy shared by every stage of the pipeline.

Every concrete error carries the name the command line prints and the module it
originates from, so a failed run can be diagnosed from a single output line.

Classes:
    - SpeakerIdError: Base class of every pipeline error.
    - SignalIOError, PreprocessError, FeatureError, VQError, DHMMError,
      EvaluationError, ConfigError: Per-module intermediate classes.
"""

from typing import Any, Dict, Optional


class SpeakerIdError(Exception):
    """
    Base class for all errors raised by the toolkit.

    Attributes:
        module (str): The pipeline module the error originates from.
        message (str): Human readable description.
        context (dict): Identifiers useful for diagnosis (paths, speaker ids, sizes).
    """

    module = "core"

    def __init__(self, message: str = "", context: Optional[Dict[str, Any]] = None) -> None:
        self.message = message or self.__class__.__name__
        self.context = dict(context or {})
        super().__init__(self.message)

    @property
    def name(self) -> str:
        return type(self).__name__

    def one_line(self) -> str:
        """
        Render the error as a single machine-parsable line.

        Returns:
            str: `error=<Name> module=<module> message="<message>"`.
        """
        message = self.message.replace('"', "'").replace("\n", " ")
        return f'error={self.name} module={self.module} message="{message}"'


class InternalError(SpeakerIdError):
    """An unexpected failure wrapped by a service."""


class SignalIOError(SpeakerIdError):
    module = "signal_io"


class MissingFile(SignalIOError):
    pass


class UnsupportedFormat(SignalIOError):
    pass


class IoFailure(SignalIOError):
    pass


class EmptyBuffer(SignalIOError):
    pass


class SampleOutOfRange(SignalIOError):
    pass


class RateMismatch(SignalIOError):
    pass


class SilentNoise(SignalIOError):
    pass


class NoiseTooShort(SignalIOError):
    pass


class PreprocessError(SpeakerIdError):
    module = "preprocess"


class TooShort(PreprocessError):
    pass


class EmptyFrame(PreprocessError):
    pass


class NoSpeech(PreprocessError):
    pass


class EmptySegments(PreprocessError):
    pass


class InvalidSegments(PreprocessError):
    pass


class AlphaOutOfRange(PreprocessError):
    pass


class FrameMsOutOfRange(PreprocessError):
    pass


class OverlapOutOfRange(PreprocessError):
    pass


class LengthMismatch(PreprocessError):
    pass


class FeatureError(SpeakerIdError):
    module = "features"


class LagTooLarge(FeatureError):
    pass


class ZeroEnergy(FeatureError):
    pass


class UnstableRecursion(FeatureError):
    pass


class ZeroFrame(FeatureError):
    pass


class ConfigInvalid(FeatureError):
    pass


class NonFiniteFeatures(FeatureError):
    pass


class FeatureFileInvalid(FeatureError):
    pass


class VQError(SpeakerIdError):
    module = "vq"


class EmptySequence(VQError):
    pass


class DimMismatch(VQError):
    pass


class ZeroVector(VQError):
    pass


class PoolTooSmall(VQError):
    pass


class TooFewUtterances(VQError):
    pass


class NoNoiseRefs(VQError):
    pass


class EmptyModelSet(VQError):
    pass


class CodebookInvalid(VQError):
    pass


class DHMMError(SpeakerIdError):
    module = "dhmm"


class SymbolOutOfRange(DHMMError):
    pass


class EmptyTrainingSet(DHMMError):
    pass


class ModelInvalid(DHMMError):
    pass


class EvaluationError(SpeakerIdError):
    module = "eval"


class ManifestInvalid(EvaluationError):
    pass


class EmptyReport(EvaluationError):
    pass


class SweepInvalid(EvaluationError):
    pass


class ReportInvalid(EvaluationError):
    pass


class ConfigError(SpeakerIdError):
    module = "cli"


class RunConfigInvalid(ConfigError):
    pass
