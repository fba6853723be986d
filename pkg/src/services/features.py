"""
This module implements the feature extractors: LPC, LPCC, RCC, MFCC and the delta and
delta-delta derivatives of MFCC, plus the `extract` entry point that runs preprocessing
and the selected extractor.

Functions:
    - autocorrelation: Biased autocorrelation up to a maximum lag.
    - levinson_durbin: Prediction polynomial, error and reflection coefficients.
    - lpc: Predictor coefficients and gain of a frame.
    - lpcc: Cepstra of the all-pole model from predictor coefficients.
    - rcc: Real cepstrum of a frame.
    - hz_to_mel / mel_to_hz: Mel scale mapping.
    - mel_center_frequencies: Filter centers equally spaced on the mel scale.
    - mel_filterbank: Peak-normalized triangular filters.
    - filterbank_energies: Power spectra projected on a filterbank.
    - cepstra_from_log_energies: Orthonormal type-II DCT stage of MFCC.
    - mfcc: Mel cepstra of windowed frames.
    - delta: Regression derivative of a feature sequence.
    - extract: Full pipeline from raw audio to features.

Classes:
    - FeatureExtractor: Extraction with a fixed RunConfig and a cached filterbank.
"""

from typing import Dict, Optional, Tuple

import numpy as np
from scipy import fft as sp_fft

from models.audio import AudioBuffer, FrameMatrix
from models.feature_sequence import FeatureSequence
from models.tags import DeltaMode, FeatureMethod
from schemas.configs import FeatureConfig, MfccConfig
from schemas.run_config import RunConfig
from services.base import BaseService
from services.preprocess import PreprocessService
from shared.constants import MFCC_EPSILON, RCC_EPSILON
from shared.exceptions import (
    ConfigInvalid,
    EmptySequence,
    LagTooLarge,
    UnstableRecursion,
    ZeroEnergy,
    ZeroFrame,
)


def autocorrelation(frame, max_lag: int) -> np.ndarray:
    """
    r[k] = sum_{t=0}^{N-1-k} s[t] * s[t+k] for k = 0..max_lag.

    Raises:
        LagTooLarge: If max_lag is negative or not below the frame length.
    """
    s = np.asarray(frame, dtype=np.float64)
    if not 0 <= max_lag < s.size:
        raise LagTooLarge(
            f"max_lag must be in [0, {s.size - 1}], got {max_lag}",
            {"max_lag": max_lag, "frame_len": s.size},
        )
    return np.array([np.dot(s[: s.size - k], s[k:]) for k in range(max_lag + 1)])


def levinson_durbin(r: np.ndarray, order: int) -> Tuple[np.ndarray, float, np.ndarray]:
    """
    Solve the autocorrelation normal equations for A(z) = 1 + sum a[k] z^-k.

    Args:
        r (np.ndarray): Autocorrelation r[0..order].
        order (int): Prediction order.

    Returns:
        Tuple[np.ndarray, float, np.ndarray]: Polynomial a[0..order] with a[0] = 1,
            final prediction error, reflection coefficients k[1..order].

    Raises:
        ZeroEnergy: If r[0] <= 0.
        UnstableRecursion: If a reflection coefficient leaves [-1, 1] or the error
            stops being positive.
    """
    if r[0] <= 0.0:
        raise ZeroEnergy("frame energy is zero", {"r0": float(r[0])})
    a = np.zeros(order + 1)
    a[0] = 1.0
    err = float(r[0])
    reflections = np.zeros(order)
    for i in range(1, order + 1):
        acc = r[i] + np.dot(a[1:i], r[i - 1 : 0 : -1])
        k = -acc / err
        if abs(k) > 1.0:
            raise UnstableRecursion(
                "reflection coefficient magnitude exceeds 1",
                {"stage": i, "reflection": float(k)},
            )
        a[1:i] = a[1:i] + k * a[i - 1 : 0 : -1]
        a[i] = k
        reflections[i - 1] = k
        err *= 1.0 - k * k
        if err <= 0.0:
            raise UnstableRecursion("prediction error is not positive", {"stage": i})
    return a, err, reflections


def lpc(frame, order: int) -> Tuple[np.ndarray, float]:
    """
    Linear prediction of a frame by the autocorrelation method.

    The predictor is s_hat[t] = sum_k coeffs[k-1] * s[t-k]; the residual energy is gain**2.

    Args:
        frame: Sample vector longer than `order`.
        order (int): Prediction order, at least 1.

    Returns:
        Tuple[np.ndarray, float]: Predictor coefficients a[1..order] and gain.

    Raises:
        ConfigInvalid: If order < 1.
        LagTooLarge: If order is not below the frame length.
        ZeroEnergy: If the frame is silent.
        UnstableRecursion: On numerical breakdown.
    """
    if order < 1:
        raise ConfigInvalid(f"LPC order must be at least 1, got {order}")
    r = autocorrelation(frame, order)
    a, err, _ = levinson_durbin(r, order)
    return -a[1:], float(np.sqrt(err))


def lpcc(lpc_coeffs, n_ceps: int) -> np.ndarray:
    """
    Cepstrum of the all-pole model 1 / (1 - sum a[k] z^-k), coefficients c[1..n_ceps].

    Args:
        lpc_coeffs: Predictor coefficients a[1..p].
        n_ceps (int): Number of cepstral coefficients.

    Returns:
        np.ndarray: c[1..n_ceps].

    Raises:
        ConfigInvalid: If n_ceps < 1 or no coefficients are given.
    """
    a = np.asarray(lpc_coeffs, dtype=np.float64)
    p = a.size
    if n_ceps < 1 or p < 1:
        raise ConfigInvalid("lpcc needs at least one coefficient in and out", {"p": p, "n_ceps": n_ceps})
    c = np.zeros(n_ceps + 1)
    for m in range(1, n_ceps + 1):
        acc = a[m - 1] if m <= p else 0.0
        for k in range(max(1, m - p), m):
            acc += (k / m) * c[k] * a[m - k - 1]
        c[m] = acc
    return c[1:]


def rcc(frame, n_ceps: int, n_fft: int) -> np.ndarray:
    """
    Real cepstrum: first n_ceps coefficients of IDFT(log(|DFT(frame, n_fft)| + 1e-10)).

    Raises:
        ZeroFrame: If the frame is all zeros.
        ConfigInvalid: If n_fft is shorter than the frame or n_ceps is out of range.
    """
    frame = np.asarray(frame, dtype=np.float64)
    if n_fft < frame.size or not 1 <= n_ceps <= n_fft:
        raise ConfigInvalid(
            "rcc needs n_fft >= frame length and 1 <= n_ceps <= n_fft",
            {"n_fft": n_fft, "frame_len": frame.size, "n_ceps": n_ceps},
        )
    if not np.any(frame):
        raise ZeroFrame("real cepstrum of an all-zero frame is undefined")
    spectrum = np.abs(sp_fft.rfft(frame, n_fft))
    return sp_fft.irfft(np.log(spectrum + RCC_EPSILON), n_fft)[:n_ceps]


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def _band_edges(cfg: MfccConfig, sample_rate_hz: int) -> np.ndarray:
    nyquist = sample_rate_hz / 2.0
    fmax = nyquist if cfg.fmax_hz is None else cfg.fmax_hz
    if not 0.0 <= cfg.fmin_hz < fmax <= nyquist:
        raise ConfigInvalid(
            "mel band must satisfy 0 <= fmin < fmax <= sample_rate / 2",
            {"fmin_hz": cfg.fmin_hz, "fmax_hz": fmax, "nyquist": nyquist},
        )
    kept = cfg.n_ceps if cfg.include_c0 else cfg.n_ceps + 1
    if kept > cfg.n_filters:
        raise ConfigInvalid(
            "more cepstral coefficients requested than filters",
            {"n_ceps": cfg.n_ceps, "n_filters": cfg.n_filters, "include_c0": cfg.include_c0},
        )
    return mel_to_hz(np.linspace(hz_to_mel(cfg.fmin_hz), hz_to_mel(fmax), cfg.n_filters + 2))


def mel_center_frequencies(cfg: MfccConfig, sample_rate_hz: int) -> np.ndarray:
    """Filter centers in Hz, equally spaced on the mel scale."""
    return _band_edges(cfg, sample_rate_hz)[1:-1]


def mel_filterbank(cfg: MfccConfig, sample_rate_hz: int) -> np.ndarray:
    """
    Triangular mel filters over the rfft bins, each normalized to a peak of 1.0.

    Adjacent filters share half of their base: filter m rises from edge m to edge m+1
    and falls to edge m+2.

    Args:
        cfg (MfccConfig): FFT size, filter count, band limits.
        sample_rate_hz (int): Sample rate.

    Returns:
        np.ndarray: Matrix of shape (n_filters, n_fft // 2 + 1).

    Raises:
        ConfigInvalid: If the band is invalid, too many cepstra are requested, or a
            filter is too narrow to cover any FFT bin.
    """
    edges = _band_edges(cfg, sample_rate_hz)
    freqs = np.arange(cfg.n_fft // 2 + 1) * sample_rate_hz / cfg.n_fft
    bank = np.zeros((cfg.n_filters, freqs.size))
    for m in range(cfg.n_filters):
        lo, center, hi = edges[m], edges[m + 1], edges[m + 2]
        rising = (freqs - lo) / (center - lo)
        falling = (hi - freqs) / (hi - center)
        bank[m] = np.maximum(0.0, np.minimum(rising, falling))
        peak = bank[m].max()
        if peak <= 0.0:
            raise ConfigInvalid(
                "mel filter covers no FFT bin; raise n_fft or lower n_filters",
                {"filter": m, "n_fft": cfg.n_fft, "n_filters": cfg.n_filters},
            )
        bank[m] /= peak
    return bank


def filterbank_energies(power_spectra: np.ndarray, bank: np.ndarray) -> np.ndarray:
    return np.asarray(power_spectra, dtype=np.float64) @ bank.T


def cepstra_from_log_energies(log_energies: np.ndarray, n_ceps: int, include_c0: bool = False) -> np.ndarray:
    """
    Orthonormal type-II DCT of log filterbank energies.

    Keeps coefficients 1..n_ceps, or 0..n_ceps-1 when c0 is included.
    """
    cepstra = sp_fft.dct(np.asarray(log_energies, dtype=np.float64), type=2, norm="ortho", axis=-1)
    start = 0 if include_c0 else 1
    return cepstra[..., start : start + n_ceps]


def mfcc(fm: FrameMatrix, cfg: MfccConfig, bank: Optional[np.ndarray] = None) -> FeatureSequence:
    """
    Mel-frequency cepstral coefficients of windowed frames.

    Per frame: power spectrum, filterbank energies, log(E + 1e-10), type-II DCT.

    Args:
        fm (FrameMatrix): Windowed frames.
        cfg (MfccConfig): Filterbank and cepstrum sizes.
        bank (np.ndarray): Precomputed filterbank for `cfg` and the frame rate.

    Returns:
        FeatureSequence: MFCC vectors of dimension n_ceps.

    Raises:
        ConfigInvalid: If n_fft is shorter than the frame or the filterbank is invalid.
    """
    if cfg.n_fft < fm.frame_len:
        raise ConfigInvalid(
            "n_fft must be at least the frame length",
            {"n_fft": cfg.n_fft, "frame_len": fm.frame_len},
        )
    if bank is None:
        bank = mel_filterbank(cfg, fm.sample_rate_hz)
    power = np.abs(sp_fft.rfft(fm.frames, cfg.n_fft, axis=1)) ** 2
    log_energies = np.log(filterbank_energies(power, bank) + MFCC_EPSILON)
    return FeatureSequence(cepstra_from_log_energies(log_energies, cfg.n_ceps, cfg.include_c0), FeatureMethod.MFCC)


_NEXT_DELTA = {
    FeatureMethod.MFCC: FeatureMethod.DMFCC,
    FeatureMethod.DMFCC: FeatureMethod.DDMFCC,
}


def delta(fs: FeatureSequence, k_window: int) -> FeatureSequence:
    """
    d[t] = sum_{k=1}^{K} k * (c[t+k] - c[t-k]) / (2 * sum_{k=1}^{K} k**2).

    Out-of-range frames replicate the edge frames, so the length is preserved.

    Raises:
        ConfigInvalid: If k_window < 1.
        EmptySequence: If the sequence has no frames.
    """
    if k_window < 1:
        raise ConfigInvalid(f"delta window must be at least 1, got {k_window}")
    if fs.n_frames == 0:
        raise EmptySequence("cannot differentiate an empty feature sequence")
    c = fs.vectors
    padded = np.pad(c, ((k_window, k_window), (0, 0)), mode="edge")
    n = c.shape[0]
    numerator = np.zeros_like(c)
    for k in range(1, k_window + 1):
        numerator += k * (padded[k_window + k : k_window + k + n] - padded[k_window - k : k_window - k + n])
    denominator = 2.0 * sum(k * k for k in range(1, k_window + 1))
    return FeatureSequence(numerator / denominator, _NEXT_DELTA.get(fs.method, fs.method))


class FeatureExtractor(BaseService):
    """
    Feature extraction bound to one RunConfig.

    Attributes:
        config (RunConfig): Preprocessing and extractor settings.
        preprocess (PreprocessService): The preprocessing chain.
    """

    def __init__(self, config: RunConfig) -> None:
        super().__init__(__name__)
        self.config = config
        self.feature_config: FeatureConfig = config.feature_config()
        self.preprocess = PreprocessService(config)
        self.__banks: Dict[int, np.ndarray] = {}

    def extract(self, buf: AudioBuffer, method: FeatureMethod) -> FeatureSequence:
        """
        Run the full preprocessing chain and the selected extractor.

        Args:
            buf (AudioBuffer): Raw utterance.
            method (FeatureMethod): Extractor.

        Returns:
            FeatureSequence: Features tagged with `method`.

        Raises:
            NoSpeech: If endpointing finds no speech.
            ZeroEnergy: If an LPC-family frame is silent.
        """
        return self.from_frames(self.preprocess.run(buf), method)

    def extract_noise_reference(self, buf: AudioBuffer, method: FeatureMethod) -> FeatureSequence:
        """Features of a noise recording: no denoising, no endpointing."""
        return self.from_frames(self.preprocess.frames_only(buf), method)

    def from_frames(self, fm: FrameMatrix, method: FeatureMethod) -> FeatureSequence:
        method = FeatureMethod(method)
        cfg = self.feature_config
        if method == FeatureMethod.LPC:
            return FeatureSequence(np.array([lpc(frame, cfg.lpc_order)[0] for frame in fm.frames]), method)
        if method == FeatureMethod.LPCC:
            return FeatureSequence(
                np.array([lpcc(lpc(frame, cfg.lpc_order)[0], cfg.lpcc_n_ceps) for frame in fm.frames]),
                method,
            )
        if method == FeatureMethod.RCC:
            return FeatureSequence(np.array([rcc(frame, cfg.rcc_n_ceps, cfg.rcc_n_fft) for frame in fm.frames]), method)

        base = mfcc(fm, cfg.mfcc, self.__bank(fm.sample_rate_hz))
        if method == FeatureMethod.MFCC:
            return base
        first = delta(base, cfg.delta_window)
        if method == FeatureMethod.DMFCC:
            if cfg.delta_mode == DeltaMode.CONCATENATED:
                return FeatureSequence(np.hstack([base.vectors, first.vectors]), method)
            return first
        second = delta(first, cfg.delta_window)
        if cfg.delta_mode == DeltaMode.CONCATENATED:
            return FeatureSequence(np.hstack([base.vectors, first.vectors, second.vectors]), method)
        return second

    def __bank(self, sample_rate_hz: int) -> np.ndarray:
        if sample_rate_hz not in self.__banks:
            bank = mel_filterbank(self.feature_config.mfcc, sample_rate_hz)
            bank.setflags(write=False)
            self.__banks[sample_rate_hz] = bank
        return self.__banks[sample_rate_hz]


def extract(buf: AudioBuffer, method: FeatureMethod, config: RunConfig) -> FeatureSequence:
    """
    Preprocess an utterance and extract the selected features.

    Args:
        buf (AudioBuffer): Raw utterance.
        method (FeatureMethod): Extractor.
        config (RunConfig): Pipeline settings.

    Returns:
        FeatureSequence: The utterance features.
    """
    return FeatureExtractor(config).extract(buf, method)
