import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from scipy.signal import get_window

from models.audio import AudioBuffer, FrameMatrix
from schemas.configs import EndpointConfig, WienerConfig
from schemas.run_config import RunConfig
from services.preprocess import (
    PreprocessService,
    apply_window,
    detect_endpoints,
    frame_geometry,
    frame_signal,
    hamming_window,
    pre_emphasize,
    remove_silence,
    short_term_log_energy,
    wiener_filter,
)
from services.signal_io import mix_at_snr, segmental_snr
from shared.exceptions import (
    AlphaOutOfRange,
    EmptyFrame,
    EmptySegments,
    FrameMsOutOfRange,
    InvalidSegments,
    LengthMismatch,
    NoSpeech,
    OverlapOutOfRange,
    TooShort,
)

SR = 11025

samples = arrays(np.float64, 64, elements=st.floats(-0.25, 0.25, allow_nan=False))


def test_log_energy_of_unit_frame():
    assert short_term_log_energy(np.ones(100)) == pytest.approx(20.0, abs=1e-9)


def test_log_energy_of_zero_frame_hits_floor():
    assert short_term_log_energy(np.zeros(256)) == pytest.approx(-120.0)


def test_log_energy_empty_frame():
    with pytest.raises(EmptyFrame):
        short_term_log_energy([])


@given(frame=arrays(np.float64, 32, elements=st.floats(0.1, 1.0)), gain=st.floats(1.01, 100.0))
def test_log_energy_scales_by_twenty_log_gain(frame, gain):
    delta = short_term_log_energy(frame * gain) - short_term_log_energy(frame)

    assert delta == pytest.approx(20 * np.log10(gain), abs=1e-9)


def test_pre_emphasis_of_constant():
    out = pre_emphasize(AudioBuffer([1.0, 1.0, 1.0], SR), 0.97)

    assert out.samples == pytest.approx([1.0, 0.03, 0.03])


def test_pre_emphasis_alpha_out_of_range():
    with pytest.raises(AlphaOutOfRange):
        pre_emphasize(AudioBuffer([0.1, 0.2], SR), 1.5)


@given(x=samples, y=samples, a=st.floats(-1.0, 1.0), b=st.floats(-1.0, 1.0))
def test_pre_emphasis_is_linear(x, y, a, b):
    def emphasize(v):
        return pre_emphasize(AudioBuffer(v, SR), 0.95).samples

    assert np.allclose(emphasize(a * x + b * y), a * emphasize(x) + b * emphasize(y), atol=1e-12, rtol=0)


def test_frame_geometry_default_frame():
    assert frame_geometry(23.22, 0.5, SR) == (256, 128)


@pytest.mark.parametrize("frame_ms, overlap, error", [(5.0, 0.5, FrameMsOutOfRange), (40.0, 0.5, FrameMsOutOfRange), (20.0, 0.1, OverlapOutOfRange), (20.0, 0.9, OverlapOutOfRange)])
def test_frame_geometry_ranges(frame_ms, overlap, error):
    with pytest.raises(error):
        frame_geometry(frame_ms, overlap, SR)


@pytest.mark.parametrize("n_samples", [256, 300, 1000, 4096])
def test_frame_count(n_samples, rng):
    buf = AudioBuffer(rng.uniform(-0.5, 0.5, n_samples), SR)

    fm = frame_signal(buf, 23.22, 0.5)

    assert fm.n_frames == (n_samples - 256) // 128 + 1
    assert np.array_equal(fm.frames[-1], buf.samples[(fm.n_frames - 1) * 128 : (fm.n_frames - 1) * 128 + 256])


def test_frame_signal_too_short():
    with pytest.raises(TooShort):
        frame_signal(AudioBuffer(np.zeros(100), SR), 23.22, 0.5)


def test_hamming_endpoints_and_center():
    w = hamming_window(257)

    assert w[0] == pytest.approx(0.08)
    assert w[-1] == pytest.approx(0.08)
    assert w[128] == pytest.approx(1.0)
    assert np.array_equal(w, w[::-1])
    assert np.allclose(w, get_window("hamming", 257, fftbins=False), atol=1e-12)


def test_hamming_too_short():
    with pytest.raises(TooShort):
        hamming_window(1)


def test_apply_window_with_ones_keeps_frames(rng):
    fm = frame_signal(AudioBuffer(rng.uniform(-0.5, 0.5, 1024), SR), 23.22, 0.5)

    out = apply_window(fm, np.ones(fm.frame_len))

    assert np.array_equal(out.frames, fm.frames)


def test_apply_window_to_unit_frame_gives_the_window():
    window = hamming_window(11)

    out = apply_window(FrameMatrix(np.ones((1, 11)), 11, 5, SR), window)

    assert np.allclose(out.frames[0], window, atol=1e-15, rtol=0)


def test_apply_window_length_mismatch(rng):
    fm = frame_signal(AudioBuffer(rng.uniform(-0.5, 0.5, 1024), SR), 23.22, 0.5)

    with pytest.raises(LengthMismatch):
        apply_window(fm, np.ones(100))


def silence_tone_silence(rng, lead, length, tail, amp=0.3, freq=500.0):
    t = np.arange(length) / SR
    tone = amp * np.sin(2 * np.pi * freq * t + rng.uniform(0, 2 * np.pi))
    samples = np.concatenate([np.zeros(lead), tone, np.zeros(tail)])
    samples += rng.normal(0.0, 0.001, samples.size)
    return AudioBuffer(np.clip(samples, -1, 1), SR)


def test_endpoint_recovery_over_seeded_variants():
    frame_len, hop = 256, 128
    hits = 0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        lead, length, tail = (int(rng.integers(2000, 5000)), int(rng.integers(3000, 8000)), int(rng.integers(2000, 5000)))
        buf = silence_tone_silence(rng, lead, length, tail)

        segments = detect_endpoints(buf, frame_len, hop, EndpointConfig())

        start, end = segments[0][0], segments[-1][1]
        if abs(start - lead) <= frame_len and abs(end - (lead + length)) <= frame_len:
            hits += 1

    assert hits >= 19


def test_endpoints_bridge_short_gaps(rng):
    tone = silence_tone_silence(rng, 3000, 4000, 0).samples
    gap = rng.normal(0.0, 0.001, 600)
    second = silence_tone_silence(rng, 0, 4000, 3000).samples
    buf = AudioBuffer(np.clip(np.concatenate([tone, gap, second]), -1, 1), SR)

    segments = detect_endpoints(buf, 256, 128, EndpointConfig())

    assert len(segments) == 1


def test_endpoints_keep_long_gaps(rng):
    tone = silence_tone_silence(rng, 3000, 4000, 0).samples
    gap = rng.normal(0.0, 0.001, 5000)
    second = silence_tone_silence(rng, 0, 4000, 3000).samples
    buf = AudioBuffer(np.clip(np.concatenate([tone, gap, second]), -1, 1), SR)

    segments = detect_endpoints(buf, 256, 128, EndpointConfig())

    assert len(segments) == 2
    assert segments[0][1] < segments[1][0]


@settings(max_examples=25)
@given(
    lengths=st.lists(st.integers(1500, 5000), min_size=2, max_size=6),
    seed=st.integers(0, 2**32 - 1),
)
def test_segments_are_disjoint_ascending_and_in_bounds(lengths, seed):
    rng = np.random.default_rng(seed)
    blocks = [
        0.3 * np.sin(2 * np.pi * 500.0 * np.arange(n) / SR) if i % 2 else np.zeros(n)
        for i, n in enumerate(lengths)
    ]
    samples = np.concatenate(blocks) + rng.normal(0.0, 0.001, sum(lengths))
    buf = AudioBuffer(np.clip(samples, -1, 1), SR)

    segments = detect_endpoints(buf, 256, 128, EndpointConfig())

    assert segments
    for start, end in segments:
        assert 0 <= start < end <= len(buf)
    for (_, end), (start, _) in zip(segments, segments[1:]):
        assert end < start


def test_full_scale_tone_is_one_segment():
    buf = AudioBuffer(0.99 * np.sin(2 * np.pi * 440.0 * np.arange(SR) / SR), SR)

    assert detect_endpoints(buf, 256, 128, EndpointConfig()) == [(0, SR)]


def test_no_speech_in_silence(rng):
    buf = AudioBuffer(rng.normal(0.0, 0.001, 8000), SR)

    with pytest.raises(NoSpeech):
        detect_endpoints(buf, 256, 128, EndpointConfig())


def test_remove_silence_concatenates_segments():
    buf = AudioBuffer(np.linspace(-0.5, 0.5, 10), SR)

    out = remove_silence(buf, [(0, 2), (5, 8)])

    assert np.array_equal(out.samples, np.concatenate([buf.samples[0:2], buf.samples[5:8]]))


@pytest.mark.parametrize("segments, error", [([], EmptySegments), ([(3, 3)], InvalidSegments), ([(0, 20)], InvalidSegments), ([(0, 5), (4, 8)], InvalidSegments)])
def test_remove_silence_rejects_bad_segments(segments, error):
    with pytest.raises(error):
        remove_silence(AudioBuffer(np.zeros(10), SR), segments)


def noisy_sine(rng, snr_db=5.0):
    lead = np.zeros(int(0.3 * SR))
    t = np.arange(SR) / SR
    clean = AudioBuffer(np.concatenate([lead, 0.3 * np.sin(2 * np.pi * 440.0 * t)]), SR)
    noise = AudioBuffer(np.clip(rng.normal(0.0, 0.1, len(clean)), -1, 1), SR)
    return clean, mix_at_snr(clean, noise, snr_db)


def test_wiener_improves_segmental_snr():
    clean, noisy = noisy_sine(np.random.default_rng(42))

    enhanced = wiener_filter(noisy, WienerConfig())

    assert len(enhanced) == len(noisy)
    assert segmental_snr(clean, enhanced) - segmental_snr(clean, noisy) >= 3.0


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_wiener_never_adds_energy_to_noise(seed):
    noise = AudioBuffer(np.clip(np.random.default_rng(seed).normal(0.0, 0.2, 6000), -1, 1), SR)

    enhanced = wiener_filter(noise, WienerConfig())

    assert np.sum(enhanced.samples ** 2) <= np.sum(noise.samples ** 2) * (1 + 1e-9)


def test_wiener_is_repeatable():
    _, noisy = noisy_sine(np.random.default_rng(7))

    first = wiener_filter(noisy, WienerConfig())
    second = wiener_filter(noisy, WienerConfig())

    assert np.array_equal(first.samples, second.samples)


def test_wiener_too_short():
    with pytest.raises(TooShort):
        wiener_filter(AudioBuffer(np.zeros(500), SR), WienerConfig())


def test_service_run_without_denoising_windows_emphasized_frames(rng):
    config = RunConfig(wiener_enabled=False, endpoint_enabled=False)
    buf = AudioBuffer(rng.uniform(-0.5, 0.5, 2048), SR)

    fm = PreprocessService(config).run(buf)

    emphasized = pre_emphasize(buf, 0.97).samples
    assert fm.frame_len == 256
    assert np.allclose(fm.frames[0], emphasized[:256] * hamming_window(256))


def test_service_enhance_strips_silence(rng):
    config = RunConfig(wiener_enabled=False)
    buf = silence_tone_silence(rng, 4000, 5000, 4000)

    out = PreprocessService(config).enhance(buf)

    assert 5000 <= len(out) <= 5000 + 2 * 256
