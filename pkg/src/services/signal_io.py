"""
This module reads and writes 16-bit PCM WAV files and builds noisy mixtures at target SNRs.

Functions:
    - read_wav: Load a mono 16-bit WAV file as an AudioBuffer.
    - write_wav: Store an AudioBuffer as a mono 16-bit WAV file.
    - rms: Root-mean-square amplitude.
    - snr_gain: Noise gain that yields a target SNR.
    - mix_signals: Add a scaled noise segment and clamp, reporting the clip count.
    - mix_at_snr: Mix clean speech with noise at a target SNR.
    - segmental_snr: Frame-averaged SNR of a processed signal against its clean reference.
"""

from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
import soundfile as sf

from models.audio import AudioBuffer
from shared.constants import (
    PCM_MAX,
    PCM_MIN,
    PCM_SCALE,
    SEGMENTAL_SNR_MAX_DB,
    SEGMENTAL_SNR_MIN_DB,
)
from shared.exceptions import (
    EmptyBuffer,
    IoFailure,
    LengthMismatch,
    MissingFile,
    NoiseTooShort,
    RateMismatch,
    SilentNoise,
    UnsupportedFormat,
)
from utils.logger import Logger


logger = Logger(__name__)

PathLike = Union[str, Path]


def read_wav(path: PathLike) -> AudioBuffer:
    """
    Read a RIFF/WAVE file holding 16-bit PCM mono audio.

    Args:
        path (PathLike): File to read.

    Returns:
        AudioBuffer: Samples divided by 32768 with the header's sample rate.

    Raises:
        MissingFile: If the file does not exist.
        UnsupportedFormat: If the file is not WAV, not 16-bit PCM, or not mono.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"audio file not found: {path}", {"path": str(path)})
    try:
        info = sf.info(str(path))
    except RuntimeError as e:
        raise UnsupportedFormat(f"not a readable audio file: {path}", {"path": str(path)}) from e
    if info.format != "WAV" or info.subtype != "PCM_16" or info.channels != 1:
        raise UnsupportedFormat(
            f"expected 16-bit PCM mono WAV, got {info.format}/{info.subtype} with {info.channels} channels",
            {"path": str(path)},
        )
    data, sample_rate = sf.read(str(path), dtype="int16", always_2d=False)
    return AudioBuffer(np.asarray(data, dtype=np.float64) / PCM_SCALE, int(sample_rate))


def write_wav(path: PathLike, buf: AudioBuffer) -> None:
    """
    Write an AudioBuffer as 16-bit PCM mono WAV.

    Amplitudes are scaled by 32768, rounded and clamped to the int16 range, so 1.0
    is stored as 32767.

    Args:
        path (PathLike): Destination file.
        buf (AudioBuffer): Non-empty audio.

    Raises:
        EmptyBuffer: If the buffer holds no samples.
        IoFailure: If the file cannot be written.
    """
    if len(buf) == 0:
        raise EmptyBuffer("refusing to write an empty buffer", {"path": str(path)})
    pcm = np.clip(np.round(buf.samples * PCM_SCALE), PCM_MIN, PCM_MAX).astype(np.int16)
    try:
        sf.write(str(path), pcm, buf.sample_rate_hz, format="WAV", subtype="PCM_16")
    except (RuntimeError, OSError) as e:
        raise IoFailure(f"cannot write {path}: {e}", {"path": str(path)}) from e


def rms(samples) -> float:
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size == 0:
        return 0.0
    return float(np.sqrt(np.mean(samples ** 2)))


def snr_gain(clean_rms: float, noise_rms: float, snr_db: float) -> float:
    """
    Gain g such that 20*log10(clean_rms / (g * noise_rms)) equals snr_db.

    Raises:
        SilentNoise: If noise_rms is zero.
    """
    if noise_rms <= 0.0:
        raise SilentNoise("noise RMS is zero, no gain reaches the target SNR")
    return float(clean_rms / (noise_rms * 10.0 ** (snr_db / 20.0)))


def mix_signals(clean: np.ndarray, noise: np.ndarray, gain: float) -> Tuple[np.ndarray, int]:
    """
    Add `gain * noise` to `clean` and clamp to [-1, 1].

    Returns:
        Tuple[np.ndarray, int]: The clamped mixture and the number of clamped samples.
    """
    mixed = np.asarray(clean, dtype=np.float64) + gain * np.asarray(noise, dtype=np.float64)
    clipped = int(np.count_nonzero(np.abs(mixed) > 1.0))
    return np.clip(mixed, -1.0, 1.0), clipped


def mix_at_snr(
    clean: AudioBuffer,
    noise: AudioBuffer,
    snr_db: float,
    rng: Optional[np.random.Generator] = None,
) -> AudioBuffer:
    """
    Mix clean speech with a noise segment at a target SNR.

    The segment is the leading len(clean) samples of the noise, or a random one when
    an `rng` is given. The gain is computed from the RMS of the segment actually used,
    so 20*log10(rms(clean) / rms(g * segment)) equals snr_db.

    Args:
        clean (AudioBuffer): Clean utterance.
        noise (AudioBuffer): Noise recording, at least as long as the utterance.
        snr_db (float): Target SNR in dB.
        rng (Optional[np.random.Generator]): Draws the segment offset when given.

    Returns:
        AudioBuffer: The mixture, clamped to [-1, 1].

    Raises:
        EmptyBuffer: If the clean buffer is empty.
        RateMismatch: If the sample rates differ.
        NoiseTooShort: If the noise is shorter than the utterance.
        SilentNoise: If the selected noise segment has zero RMS.
    """
    if len(clean) == 0:
        raise EmptyBuffer("cannot mix an empty utterance")
    if clean.sample_rate_hz != noise.sample_rate_hz:
        raise RateMismatch(
            "clean and noise sample rates differ",
            {"clean": clean.sample_rate_hz, "noise": noise.sample_rate_hz},
        )
    if len(noise) < len(clean):
        raise NoiseTooShort(
            "noise is shorter than the utterance",
            {"noise": len(noise), "clean": len(clean)},
        )

    offset = 0
    if rng is not None:
        offset = int(rng.integers(0, len(noise) - len(clean) + 1))
    segment = noise.samples[offset : offset + len(clean)]

    gain = snr_gain(rms(clean.samples), rms(segment), snr_db)
    mixed, clipped = mix_signals(clean.samples, segment, gain)
    if clipped:
        logger.warning("Mixture clipped", {"clipped_samples": clipped, "snr_db": snr_db})
    return clean.with_samples(mixed)


def segmental_snr(clean: AudioBuffer, processed: AudioBuffer, frame_len: int = 256) -> float:
    """
    Mean per-frame SNR of `processed` against `clean`.

    Non-overlapping frames; each frame's SNR is clamped to [-10, 35] dB and frames whose
    clean energy is zero are skipped.

    Args:
        clean (AudioBuffer): Reference signal.
        processed (AudioBuffer): Signal under test, same length.
        frame_len (int): Frame length in samples.

    Returns:
        float: Segmental SNR in dB.

    Raises:
        LengthMismatch: If the signals differ in length or are shorter than one frame.
    """
    if len(clean) != len(processed) or len(clean) < frame_len:
        raise LengthMismatch(
            "segmental SNR needs equal-length signals of at least one frame",
            {"clean": len(clean), "processed": len(processed), "frame_len": frame_len},
        )
    n_frames = len(clean) // frame_len
    reference = clean.samples[: n_frames * frame_len].reshape(n_frames, frame_len)
    error = reference - processed.samples[: n_frames * frame_len].reshape(n_frames, frame_len)

    signal_energy = np.sum(reference ** 2, axis=1)
    error_energy = np.sum(error ** 2, axis=1)
    active = signal_energy > 0.0
    if not np.any(active):
        return SEGMENTAL_SNR_MIN_DB
    with np.errstate(divide="ignore"):
        per_frame = 10.0 * np.log10(signal_energy[active] / np.maximum(error_energy[active], 1e-20))
    return float(np.mean(np.clip(per_frame, SEGMENTAL_SNR_MIN_DB, SEGMENTAL_SNR_MAX_DB)))
