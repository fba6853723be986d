"""End-to-end runs of enrollment, identification and evaluation on the synthetic corpus."""

import pytest

from models.tags import CorpusSplit, SearchMode
from schemas.run_config import RunConfig
from services.enrollment import EnrollmentService
from services.evaluation import EvaluationService
from services.features import FeatureExtractor
from services.identification import identify_with_system
from services.reporting import render_report
from services.signal_io import mix_at_snr, read_wav

pytestmark = pytest.mark.slow

CLEAN_SNR_DB = 120.0


@pytest.fixture(scope="module")
def config(fast_values):
    return RunConfig(**fast_values)


@pytest.fixture(scope="module")
def system(synthetic_corpus, config):
    manifest, _ = synthetic_corpus
    return EnrollmentService(config).enroll(manifest, config.feature_method)


def features_of(path, config, noise=None):
    buf = read_wav(path)
    if noise is not None:
        buf = mix_at_snr(buf, noise, CLEAN_SNR_DB)
    return FeatureExtractor(config).extract(buf, config.feature_method)


@pytest.fixture(scope="module")
def clean_probes(synthetic_corpus, config):
    manifest, _ = synthetic_corpus
    noise = read_wav(manifest.noise_files[0].wav_path)
    return [(entry.speaker_id, features_of(entry.wav_path, config, noise)) for entry in manifest.split(CorpusSplit.TEST)]


def test_system_covers_every_speaker(system, synthetic_corpus):
    manifest, _ = synthetic_corpus

    assert system.speakers == tuple(manifest.speakers())
    assert system.group_codebook.n_groups == 2
    assert system.symbol_codebook.size == 8
    assert system.noise_names == ("brown", "white")


def test_clean_probes_are_all_identified(system, clean_probes):
    decisions = [identify_with_system(fs, system, SearchMode.EXHAUSTIVE).speaker_id for _, fs in clean_probes]

    assert decisions == [speaker for speaker, _ in clean_probes]


def test_grouped_search_agrees_with_exhaustive(system, clean_probes):
    agree = sum(
        identify_with_system(fs, system, SearchMode.GROUPED).speaker_id
        == identify_with_system(fs, system, SearchMode.EXHAUSTIVE).speaker_id
        for _, fs in clean_probes
    )

    assert agree >= 0.9 * len(clean_probes)


def test_enrolled_utterance_identifies_its_speaker(system, synthetic_corpus, config):
    manifest, _ = synthetic_corpus

    for entry in manifest.split(CorpusSplit.ENROLL):
        probe = features_of(entry.wav_path, config)
        assert identify_with_system(probe, system, SearchMode.EXHAUSTIVE).speaker_id == entry.speaker_id


def test_evaluation_is_deterministic(synthetic_corpus, config):
    manifest, _ = synthetic_corpus

    first = EvaluationService(config).evaluate(manifest)
    second = EvaluationService(config).evaluate(manifest)

    assert len(first.cells) == 2 * 4
    assert {c.total for c in first.cells} == {10}
    assert render_report(first, "csv") == render_report(second, "csv")
    assert render_report(first, "markdown") == render_report(second, "markdown")


def test_clean_rate_is_at_least_the_mean_noisy_rate(synthetic_corpus, config):
    manifest, _ = synthetic_corpus
    service = EvaluationService(config)

    noisy = service.run_identification(manifest, config.feature_method)
    clean = service.run_identification(
        manifest.model_copy(update={"snr_levels_db": [CLEAN_SNR_DB]}), config.feature_method
    )

    for noise in noisy.noises():
        assert clean.noise_average(noise, config.feature_method) >= noisy.noise_average(noise, config.feature_method)
