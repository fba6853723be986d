"""
This module implements the preprocessing chain applied to every utterance before feature
extraction: Wiener denoising, endpoint detection and silence removal, pre-emphasis, frame
blocking and Hamming windowing.

Functions:
    - wiener_filter: STFT-domain Wiener gain with a decision-directed a-priori SNR.
    - short_term_log_energy: Frame energy in dB.
    - frame_energies: Log energy of every frame of a sample array.
    - detect_endpoints: Energy-threshold speech segments in sample units.
    - remove_silence: Concatenate speech segments.
    - pre_emphasize: First-order FIR high-pass.
    - frame_geometry: Frame length and hop for a duration and overlap.
    - frame_signal: Cut a buffer into overlapping frames.
    - hamming_window: Symmetric Hamming window.
    - apply_window: Multiply every frame by a window.

Classes:
    - PreprocessService: Runs the chain in its fixed order with the settings of a RunConfig.
"""

import math
from typing import List, Tuple

import numpy as np
from scipy import fft as sp_fft
from scipy.signal import get_window

from models.audio import AudioBuffer, FrameMatrix
from schemas.configs import EndpointConfig, WienerConfig
from schemas.run_config import RunConfig
from services.base import BaseService
from shared.constants import LOG_ENERGY_EPSILON, NOISE_FLOOR_QUANTILE
from shared.exceptions import (
    AlphaOutOfRange,
    EmptyFrame,
    EmptySegments,
    FrameMsOutOfRange,
    InternalError,
    InvalidSegments,
    LengthMismatch,
    NoSpeech,
    OverlapOutOfRange,
    SpeakerIdError,
    TooShort,
)
from utils.logger import Logger


logger = Logger(__name__)

Segment = Tuple[int, int]


def _clamped(buf: AudioBuffer, samples: np.ndarray, stage: str) -> AudioBuffer:
    clipped = int(np.count_nonzero(np.abs(samples) > 1.0))
    if clipped:
        logger.warning("Samples clamped to unit range", {"stage": stage, "clipped_samples": clipped})
        samples = np.clip(samples, -1.0, 1.0)
    return buf.with_samples(samples)


def _frames_view(samples: np.ndarray, frame_len: int, hop: int) -> np.ndarray:
    return np.lib.stride_tricks.sliding_window_view(samples, frame_len)[::hop]


def wiener_filter(buf: AudioBuffer, cfg: WienerConfig) -> AudioBuffer:
    """
    Denoise a buffer with a frequency-domain Wiener gain.

    The STFT uses square-root periodic Hann analysis and synthesis windows at 50%
    overlap, which makes analysis followed by synthesis a contraction: since every gain
    lies in [gain_floor, 1], the output energy never exceeds the input energy. The noise
    PSD is the mean power of the first `noise_estimate_frames` full frames. The a-priori
    SNR follows the decision-directed rule
    xi = alpha * G_prev**2 * gamma_prev + (1 - alpha) * max(gamma - 1, 0)
    and the gain is xi / (1 + xi).

    Args:
        buf (AudioBuffer): Noisy input.
        cfg (WienerConfig): Frame length, noise frames, smoothing and gain floor.

    Returns:
        AudioBuffer: Denoised audio of the same length.

    Raises:
        TooShort: If the buffer is shorter than noise_estimate_frames * frame_len samples.
    """
    n = cfg.frame_len
    needed = cfg.noise_estimate_frames * n
    if len(buf) < needed:
        raise TooShort(
            "buffer too short for the Wiener noise estimate",
            {"samples": len(buf), "required": needed},
        )

    hop = n // 2
    window = np.sqrt(get_window("hann", n, fftbins=True))
    left = n - hop
    padded_len = left + len(buf) + n
    padded_len += (-(padded_len - n)) % hop
    padded = np.zeros(padded_len)
    padded[left : left + len(buf)] = buf.samples

    frames = _frames_view(padded, n, hop) * window
    spectra = sp_fft.rfft(frames, axis=1)
    power = np.abs(spectra) ** 2

    noise_psd = power[1 : 1 + cfg.noise_estimate_frames].mean(axis=0) + 1e-12
    alpha = cfg.smoothing_alpha
    gains = np.empty_like(power)
    gain_prev = None
    gamma_prev = None
    for i in range(power.shape[0]):
        gamma = power[i] / noise_psd
        if gain_prev is None:
            xi = alpha + (1.0 - alpha) * np.maximum(gamma - 1.0, 0.0)
        else:
            xi = alpha * gain_prev ** 2 * gamma_prev + (1.0 - alpha) * np.maximum(gamma - 1.0, 0.0)
        gain = np.clip(xi / (1.0 + xi), cfg.gain_floor, 1.0)
        gains[i] = gain
        gain_prev, gamma_prev = gain, gamma

    filtered = sp_fft.irfft(spectra * gains, n=n, axis=1) * window
    output = np.zeros(padded_len)
    for i, frame in enumerate(filtered):
        output[i * hop : i * hop + n] += frame
    return _clamped(buf, output[left : left + len(buf)], "wiener_filter")


def short_term_log_energy(frame) -> float:
    """
    Log energy of a frame, 10*log10(sum(s**2) + 1e-12).

    Args:
        frame: Non-empty sample vector.

    Returns:
        float: Energy in dB; an all-zero frame gives -120 dB.

    Raises:
        EmptyFrame: If the frame is empty.
    """
    frame = np.asarray(frame, dtype=np.float64)
    if frame.size == 0:
        raise EmptyFrame("cannot compute the energy of an empty frame")
    return float(10.0 * np.log10(np.sum(frame ** 2) + LOG_ENERGY_EPSILON))


def frame_energies(samples: np.ndarray, frame_len: int, hop: int) -> np.ndarray:
    frames = _frames_view(np.asarray(samples, dtype=np.float64), frame_len, hop)
    return 10.0 * np.log10(np.sum(frames ** 2, axis=1) + LOG_ENERGY_EPSILON)


def _runs(mask: np.ndarray) -> List[Tuple[int, int]]:
    """Inclusive (first, last) frame indices of every True run."""
    runs = []
    start = None
    for i, flag in enumerate(mask):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(mask) - 1))
    return runs


def detect_endpoints(buf: AudioBuffer, frame_len: int, hop: int, cfg: EndpointConfig) -> List[Segment]:
    """
    Locate speech by comparing frame energies against an estimated noise floor.

    The floor is the median energy of the quietest 10% of frames, capped at
    `energy_floor_db`; frames above floor + threshold_offset_db are speech candidates.
    Runs shorter than `min_speech_frames` are dropped, then gaps shorter than
    `min_silence_frames` between the remaining runs are bridged.

    Args:
        buf (AudioBuffer): Input audio.
        frame_len (int): Analysis frame length in samples.
        hop (int): Analysis hop in samples.
        cfg (EndpointConfig): Thresholds and run lengths.

    Returns:
        List[Segment]: Disjoint ascending half-open (start, end) sample ranges.

    Raises:
        TooShort: If the buffer is not longer than one frame.
        NoSpeech: If no speech run survives.
    """
    if len(buf) <= frame_len:
        raise TooShort(
            "endpoint detection needs more than one frame",
            {"samples": len(buf), "frame_len": frame_len},
        )
    energies = frame_energies(buf.samples, frame_len, hop)
    n_frames = energies.size
    quiet_count = max(1, math.ceil(NOISE_FLOOR_QUANTILE * n_frames))
    noise_floor = min(float(np.median(np.sort(energies)[:quiet_count])), cfg.energy_floor_db)
    threshold = noise_floor + cfg.threshold_offset_db

    runs = [
        (first, last)
        for first, last in _runs(energies > threshold)
        if last - first + 1 >= cfg.min_speech_frames
    ]
    if not runs:
        raise NoSpeech(
            "no frame run exceeds the speech threshold",
            {"threshold_db": threshold, "frames": n_frames},
        )

    bridged = [runs[0]]
    for first, last in runs[1:]:
        gap = first - bridged[-1][1] - 1
        if gap < cfg.min_silence_frames:
            bridged[-1] = (bridged[-1][0], last)
        else:
            bridged.append((first, last))

    segments: List[Segment] = []
    for first, last in bridged:
        start = first * hop
        end = len(buf) if last == n_frames - 1 else last * hop + frame_len
        if segments and start <= segments[-1][1]:
            segments[-1] = (segments[-1][0], max(end, segments[-1][1]))
        else:
            segments.append((start, end))
    return segments


def remove_silence(buf: AudioBuffer, segments: List[Segment]) -> AudioBuffer:
    """
    Keep only the speech segments, in order.

    Raises:
        EmptySegments: If no segment is given.
        InvalidSegments: If a segment is empty, out of bounds, or overlaps its predecessor.
    """
    if not segments:
        raise EmptySegments("no speech segments to keep")
    previous_end = 0
    for start, end in segments:
        if not 0 <= start < end <= len(buf) or start < previous_end:
            raise InvalidSegments(
                "segments must be non-empty, in bounds, ascending and disjoint",
                {"segment": (start, end), "samples": len(buf)},
            )
        previous_end = end
    return buf.with_samples(np.concatenate([buf.samples[start:end] for start, end in segments]))


def pre_emphasize(buf: AudioBuffer, alpha: float) -> AudioBuffer:
    """
    Apply y[0] = x[0], y[t] = x[t] - alpha * x[t-1].

    Raises:
        AlphaOutOfRange: If alpha is outside [0, 1].
    """
    if not 0.0 <= alpha <= 1.0:
        raise AlphaOutOfRange(f"pre-emphasis alpha must be in [0, 1], got {alpha}", {"alpha": alpha})
    x = buf.samples
    y = x.copy()
    y[1:] = x[1:] - alpha * x[:-1]
    return _clamped(buf, y, "pre_emphasize")


def frame_geometry(frame_ms: float, overlap_fraction: float, sample_rate_hz: int) -> Tuple[int, int]:
    """
    Frame length and hop in samples.

    Returns:
        Tuple[int, int]: round(frame_ms * rate / 1000) and round(frame_len * (1 - overlap)).

    Raises:
        FrameMsOutOfRange: If frame_ms is outside [10, 30].
        OverlapOutOfRange: If overlap_fraction is outside [0.25, 0.75].
    """
    if not 10.0 <= frame_ms <= 30.0:
        raise FrameMsOutOfRange(f"frame length must be 10-30 ms, got {frame_ms}", {"frame_ms": frame_ms})
    if not 0.25 <= overlap_fraction <= 0.75:
        raise OverlapOutOfRange(
            f"overlap must be 0.25-0.75, got {overlap_fraction}",
            {"overlap_fraction": overlap_fraction},
        )
    frame_len = int(round(frame_ms * sample_rate_hz / 1000.0))
    hop = max(1, int(round(frame_len * (1.0 - overlap_fraction))))
    return frame_len, hop


def frame_signal(buf: AudioBuffer, frame_ms: float, overlap_fraction: float) -> FrameMatrix:
    """
    Cut a buffer into overlapping frames; trailing partial samples are dropped.

    Args:
        buf (AudioBuffer): Input audio.
        frame_ms (float): Frame length in milliseconds.
        overlap_fraction (float): Fraction of a frame shared with the next one.

    Returns:
        FrameMatrix: floor((len - frame_len) / hop) + 1 frames.

    Raises:
        FrameMsOutOfRange: If frame_ms is outside [10, 30].
        OverlapOutOfRange: If overlap_fraction is outside [0.25, 0.75].
        TooShort: If the buffer is shorter than one frame.
    """
    frame_len, hop = frame_geometry(frame_ms, overlap_fraction, buf.sample_rate_hz)
    if len(buf) < frame_len:
        raise TooShort(
            "buffer shorter than one frame",
            {"samples": len(buf), "frame_len": frame_len},
        )
    return FrameMatrix(_frames_view(buf.samples, frame_len, hop), frame_len, hop, buf.sample_rate_hz)


def hamming_window(n_len: int) -> np.ndarray:
    """
    Symmetric Hamming window w(n) = 0.54 - 0.46 * cos(2*pi*n / (n_len - 1)).

    Raises:
        TooShort: If n_len < 2.
    """
    if n_len < 2:
        raise TooShort(f"window length must be at least 2, got {n_len}", {"n_len": n_len})
    n = np.arange(n_len)
    w = 0.54 - 0.46 * np.cos(2.0 * np.pi * n / (n_len - 1))
    return 0.5 * (w + w[::-1])


def apply_window(fm: FrameMatrix, window) -> FrameMatrix:
    window = np.asarray(window, dtype=np.float64)
    if window.shape != (fm.frame_len,):
        raise LengthMismatch(
            "window length differs from frame length",
            {"window": window.shape, "frame_len": fm.frame_len},
        )
    return fm.with_frames(fm.frames * window)


class PreprocessService(BaseService):
    """
    Runs the preprocessing chain in its fixed order:
    denoise, endpoint and silence removal, pre-emphasis, framing, windowing.

    Attributes:
        config (RunConfig): Source of every stage parameter.
    """

    def __init__(self, config: RunConfig) -> None:
        super().__init__(__name__)
        self.config = config

    def enhance(self, buf: AudioBuffer) -> AudioBuffer:
        """
        Denoise and strip silence, the audio-to-audio part of the chain.

        Args:
            buf (AudioBuffer): Raw utterance.

        Returns:
            AudioBuffer: Enhanced speech.
        """
        try:
            out = buf
            if self.config.wiener_enabled:
                out = wiener_filter(out, self.config.wiener_config())
            if self.config.endpoint_enabled:
                frame_len, hop = frame_geometry(
                    self.config.frame_ms, self.config.overlap_fraction, out.sample_rate_hz
                )
                segments = detect_endpoints(out, frame_len, hop, self.config.endpoint_config())
                out = remove_silence(out, segments)
                self.logger.debug(
                    "Silence removed",
                    {"segments": len(segments), "samples_in": len(buf), "samples_out": len(out)},
                )
            return out
        except SpeakerIdError as known:
            raise known
        except Exception as e:
            self.logger.error("An error occurred in enhance", {"error": str(e)})
            raise InternalError(f"enhance: {e}") from e

    def run(self, buf: AudioBuffer) -> FrameMatrix:
        """
        Full chain from raw audio to windowed frames.

        Args:
            buf (AudioBuffer): Raw utterance.

        Returns:
            FrameMatrix: Hamming-windowed frames.
        """
        enhanced = self.enhance(buf)
        try:
            emphasized = pre_emphasize(enhanced, self.config.pre_emphasis_alpha)
            frames = frame_signal(emphasized, self.config.frame_ms, self.config.overlap_fraction)
            return apply_window(frames, hamming_window(frames.frame_len))
        except SpeakerIdError as known:
            raise known
        except Exception as e:
            self.logger.error("An error occurred in run", {"error": str(e)})
            raise InternalError(f"run: {e}") from e

    def frames_only(self, buf: AudioBuffer) -> FrameMatrix:
        """Pre-emphasis, framing and windowing without denoising or endpointing."""
        emphasized = pre_emphasize(buf, self.config.pre_emphasis_alpha)
        frames = frame_signal(emphasized, self.config.frame_ms, self.config.overlap_fraction)
        return apply_window(frames, hamming_window(frames.frame_len))
