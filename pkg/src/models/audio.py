"""
This module defines the immutable signal containers consumed and produced by the preprocessing chain.

Classes:
    - AudioBuffer: Normalized mono samples with their sample rate.
    - FrameMatrix: Fixed-length, possibly overlapping frames cut from an AudioBuffer.
"""

from dataclasses import dataclass

import numpy as np

from shared.exceptions import (
    LengthMismatch,
    OverlapOutOfRange,
    SampleOutOfRange,
    UnsupportedFormat,
)


def _frozen_array(values, ndim: int) -> np.ndarray:
    array = np.array(values, dtype=np.float64, copy=True)
    if ndim == 1:
        array = array.reshape(-1)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class AudioBuffer:
    """
    Normalized mono audio.

    Attributes:
        samples (np.ndarray): Read-only float64 amplitudes, each within [-1, 1].
        sample_rate_hz (int): Positive sample rate.
    """

    samples: np.ndarray
    sample_rate_hz: int

    def __post_init__(self) -> None:
        samples = _frozen_array(self.samples, ndim=1)
        if int(self.sample_rate_hz) <= 0:
            raise UnsupportedFormat(
                f"sample rate must be positive, got {self.sample_rate_hz}",
                {"sample_rate_hz": self.sample_rate_hz},
            )
        if samples.size and (not np.all(np.isfinite(samples)) or np.max(np.abs(samples)) > 1.0):
            raise SampleOutOfRange(
                "samples must be finite and within [-1, 1]",
                {"max_abs": float(np.max(np.abs(samples)))},
            )
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate_hz", int(self.sample_rate_hz))

    def __len__(self) -> int:
        return int(self.samples.size)

    @property
    def duration_s(self) -> float:
        return len(self) / self.sample_rate_hz

    def with_samples(self, samples) -> "AudioBuffer":
        """Same rate, new content."""
        return AudioBuffer(samples, self.sample_rate_hz)


@dataclass(frozen=True, eq=False)
class FrameMatrix:
    """
    Frames cut from a buffer; frame `i` covers source samples [i*hop, i*hop + frame_len).

    Attributes:
        frames (np.ndarray): Read-only array of shape (n_frames, frame_len).
        frame_len (int): Samples per frame.
        hop (int): Samples between consecutive frame starts, 0 < hop <= frame_len.
        sample_rate_hz (int): Rate of the source buffer.
    """

    frames: np.ndarray
    frame_len: int
    hop: int
    sample_rate_hz: int

    def __post_init__(self) -> None:
        frames = np.array(self.frames, dtype=np.float64, copy=True)
        if frames.ndim != 2 or frames.shape[1] != int(self.frame_len):
            raise LengthMismatch(
                f"frames must have shape (n, {self.frame_len}), got {frames.shape}",
                {"shape": frames.shape},
            )
        if not 0 < int(self.hop) <= int(self.frame_len):
            raise OverlapOutOfRange(
                f"hop must satisfy 0 < hop <= frame_len, got hop={self.hop}",
                {"hop": self.hop, "frame_len": self.frame_len},
            )
        frames.setflags(write=False)
        object.__setattr__(self, "frames", frames)
        object.__setattr__(self, "frame_len", int(self.frame_len))
        object.__setattr__(self, "hop", int(self.hop))
        object.__setattr__(self, "sample_rate_hz", int(self.sample_rate_hz))

    @property
    def n_frames(self) -> int:
        return int(self.frames.shape[0])

    def __len__(self) -> int:
        return self.n_frames

    def with_frames(self, frames) -> "FrameMatrix":
        return FrameMatrix(frames, self.frame_len, self.hop, self.sample_rate_hz)
