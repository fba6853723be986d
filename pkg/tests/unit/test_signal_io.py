import numpy as np
import pytest
import soundfile as sf

from models.audio import AudioBuffer
from services.signal_io import (
    mix_at_snr,
    mix_signals,
    read_wav,
    rms,
    segmental_snr,
    snr_gain,
    write_wav,
)
from shared.exceptions import (
    EmptyBuffer,
    LengthMismatch,
    MissingFile,
    NoiseTooShort,
    RateMismatch,
    SampleOutOfRange,
    SilentNoise,
    UnsupportedFormat,
)


def sine(freq=440.0, seconds=0.5, sr=11025, amp=0.3):
    t = np.arange(int(seconds * sr)) / sr
    return AudioBuffer(amp * np.sin(2 * np.pi * freq * t), sr)


def test_write_then_read_preserves_samples_within_pcm_step(tmp_path):
    buf = sine()
    path = tmp_path / "tone.wav"

    write_wav(path, buf)
    loaded = read_wav(path)

    assert loaded.sample_rate_hz == 11025
    assert len(loaded) == len(buf)
    assert np.max(np.abs(loaded.samples - buf.samples)) <= 1.0 / 32768


def test_full_scale_is_stored_as_int16_max(tmp_path):
    path = tmp_path / "full.wav"

    write_wav(path, AudioBuffer([1.0, -1.0, 0.0], 8000))
    data, _ = sf.read(str(path), dtype="int16")

    assert data.tolist() == [32767, -32768, 0]


def test_read_missing_file(tmp_path):
    with pytest.raises(MissingFile):
        read_wav(tmp_path / "absent.wav")


def test_read_rejects_float_wav(tmp_path):
    path = tmp_path / "float.wav"
    sf.write(str(path), np.zeros(100, dtype=np.float32), 11025, subtype="FLOAT")

    with pytest.raises(UnsupportedFormat):
        read_wav(path)


def test_read_rejects_stereo(tmp_path):
    path = tmp_path / "stereo.wav"
    sf.write(str(path), np.zeros((100, 2), dtype=np.int16), 11025, subtype="PCM_16")

    with pytest.raises(UnsupportedFormat):
        read_wav(path)


def test_read_rejects_non_audio(tmp_path):
    path = tmp_path / "notes.wav"
    path.write_text("not a riff file")

    with pytest.raises(UnsupportedFormat):
        read_wav(path)


def test_write_empty_buffer(tmp_path):
    with pytest.raises(EmptyBuffer):
        write_wav(tmp_path / "empty.wav", AudioBuffer([], 11025))


def test_audio_buffer_rejects_out_of_range_samples():
    with pytest.raises(SampleOutOfRange):
        AudioBuffer([0.5, 1.5], 11025)


def test_rms_of_constant_and_empty():
    assert rms([0.5, -0.5, 0.5, -0.5]) == pytest.approx(0.5)
    assert rms([]) == 0.0


def test_snr_gain_reaches_target():
    gain = snr_gain(0.2, 0.05, 10.0)

    assert 20 * np.log10(0.2 / (gain * 0.05)) == pytest.approx(10.0, abs=1e-12)


def test_snr_gain_silent_noise():
    with pytest.raises(SilentNoise):
        snr_gain(0.2, 0.0, 10.0)


def test_mix_signals_counts_clamped_samples():
    mixed, clipped = mix_signals(np.array([0.9, 0.1, -0.9]), np.array([1.0, 0.0, -1.0]), 0.5)

    assert clipped == 2
    assert mixed.tolist() == [1.0, 0.1, -1.0]


@pytest.mark.parametrize("snr_db", [15.0, 10.0, 5.0, 0.0])
def test_mix_at_snr_hits_target(snr_db, rng):
    clean = sine(amp=0.1)
    noise = AudioBuffer(rng.normal(0.0, 0.05, size=len(clean) * 2), 11025)

    mixed = mix_at_snr(clean, noise, snr_db)
    residual = mixed.samples - clean.samples

    assert 20 * np.log10(rms(clean.samples) / rms(residual)) == pytest.approx(snr_db, abs=1e-6)


def test_mix_at_high_snr_is_nearly_clean(rng):
    clean = sine()
    noise = AudioBuffer(np.clip(rng.normal(0.0, 0.3, size=len(clean)), -1, 1), 11025)

    mixed = mix_at_snr(clean, noise, 120.0)

    assert rms(mixed.samples - clean.samples) < 1e-5


def test_mix_at_snr_random_offset_is_seeded(rng):
    clean = sine(amp=0.1)
    noise = AudioBuffer(rng.uniform(-0.2, 0.2, size=len(clean) * 3), 11025)

    first = mix_at_snr(clean, noise, 5.0, np.random.default_rng(7))
    second = mix_at_snr(clean, noise, 5.0, np.random.default_rng(7))

    assert np.array_equal(first.samples, second.samples)


def test_mix_at_snr_preconditions(rng):
    clean = sine()
    with pytest.raises(RateMismatch):
        mix_at_snr(clean, AudioBuffer(rng.normal(0, 0.1, len(clean)).clip(-1, 1), 8000), 5.0)
    with pytest.raises(NoiseTooShort):
        mix_at_snr(clean, AudioBuffer(np.full(10, 0.1), 11025), 5.0)
    with pytest.raises(SilentNoise):
        mix_at_snr(clean, AudioBuffer(np.zeros(len(clean)), 11025), 5.0)
    with pytest.raises(EmptyBuffer):
        mix_at_snr(AudioBuffer([], 11025), AudioBuffer(np.full(10, 0.1), 11025), 5.0)


def test_segmental_snr_identical_signals_hits_upper_clamp():
    clean = sine()

    assert segmental_snr(clean, clean) == pytest.approx(35.0)


def test_segmental_snr_length_mismatch():
    with pytest.raises(LengthMismatch):
        segmental_snr(sine(seconds=0.5), sine(seconds=0.4))
