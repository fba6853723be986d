import numpy as np
import pytest

from models.tags import CorpusSplit
from repositories.manifest_repository import ManifestRepository
from services.signal_io import read_wav, rms
from services.synthetic_corpus import SyntheticCorpusService


def test_layout_and_manifest(tmp_path):
    manifest = SyntheticCorpusService(seed=5).generate(tmp_path, n_speakers=3, snr_levels_db=(10, 0))

    assert manifest.speakers() == ["spk01", "spk02", "spk03"]
    assert len(manifest.split(CorpusSplit.ENROLL)) == 6
    assert len(manifest.split(CorpusSplit.TEST)) == 6
    assert [n.noise_name for n in manifest.noise_files] == ["white", "brown"]
    assert manifest.snr_levels_db == [10.0, 0.0]
    assert (tmp_path / "speech" / "spk02" / "t1.wav").is_file()
    assert (tmp_path / "noise" / "brown.wav").is_file()
    assert ManifestRepository(tmp_path / "manifest.json").load().entries[0].wav_path == str(
        (tmp_path / "speech" / "spk01" / "e0.wav").resolve()
    )
    manifest.validate_for_evaluation()


def test_utterances_are_framed_by_silence():
    service = SyntheticCorpusService(seed=5)

    buf = service.utterance(0, "spk01", "e0")
    edge = int(0.2 * service.sample_rate_hz)

    assert buf.sample_rate_hz == 11025
    assert rms(buf.samples[: edge - 10]) < 0.01
    assert rms(buf.samples[edge + 200 : -edge - 200]) > 0.1


def test_speakers_differ_in_formants():
    service = SyntheticCorpusService()

    assert service.formants(0) == [250.0, 900.0, 2000.0]
    assert service.formants(2) == [490.0, 1320.0, 2340.0]


@pytest.mark.parametrize("kind", ["white", "brown"])
def test_noise_level(kind):
    buf = SyntheticCorpusService(seed=5).noise(kind, 1.0)

    assert buf.samples.size == 11025
    assert rms(buf.samples) == pytest.approx(0.1, rel=0.05)


def test_generation_is_seeded(tmp_path):
    SyntheticCorpusService(seed=9).generate(tmp_path / "a", n_speakers=2)
    SyntheticCorpusService(seed=9).generate(tmp_path / "b", n_speakers=2)
    SyntheticCorpusService(seed=10).generate(tmp_path / "c", n_speakers=2)

    first = read_wav(tmp_path / "a" / "speech" / "spk02" / "e1.wav").samples
    assert np.array_equal(first, read_wav(tmp_path / "b" / "speech" / "spk02" / "e1.wav").samples)
    assert not np.array_equal(first, read_wav(tmp_path / "c" / "speech" / "spk02" / "e1.wav").samples)
