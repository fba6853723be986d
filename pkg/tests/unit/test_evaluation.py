import json
from pathlib import Path
from types import SimpleNamespace
from unittest.mock import MagicMock, patch

import pytest

from models.tags import CorpusSplit, FeatureMethod
from schemas.manifest import CorpusManifest, ManifestEntry, NoiseFile
from schemas.report import EvalReport, RateCell
from schemas.run_config import RunConfig
from services.evaluation import EvaluationService, average_rates
from shared.exceptions import EmptyReport, ManifestInvalid, NoSpeech, SweepInvalid

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


def reference_tables():
    return json.loads((FIXTURES / "reference_rate_tables.json").read_text())


def reference_report(tables):
    cells = [
        RateCell(noise_name=table["noise_name"], snr_db=row["snr_db"], method=FeatureMethod(method), rate=rate)
        for table in tables["noise_tables"]
        for row in table["rows"]
        for method, rate in zip(tables["methods"], row["rates"])
    ]
    return average_rates(EvalReport(cells=cells))


def test_per_noise_averages_match_reference_tables():
    tables = reference_tables()
    report = reference_report(tables)

    for table in tables["noise_tables"]:
        for method, expected in zip(tables["methods"], table["average"]):
            assert report.noise_average(table["noise_name"], FeatureMethod(method)) == pytest.approx(expected, abs=0.01)


def test_overall_averages_match_reference_tables():
    tables = reference_tables()
    report = reference_report(tables)

    for method, expected in zip(tables["methods"], tables["overall"]["average"]):
        assert report.method_average(FeatureMethod(method)) == pytest.approx(expected, abs=0.01)


def test_method_average_is_mean_of_noise_averages():
    cells = [
        RateCell(noise_name="a", snr_db=10.0, method=FeatureMethod.MFCC, rate=100.0),
        RateCell(noise_name="a", snr_db=0.0, method=FeatureMethod.MFCC, rate=0.0),
        RateCell(noise_name="b", snr_db=10.0, method=FeatureMethod.MFCC, rate=80.0),
    ]

    report = average_rates(EvalReport(cells=cells))

    assert report.noise_average("a", FeatureMethod.MFCC) == 50.0
    assert report.method_average(FeatureMethod.MFCC) == 65.0


def test_averaging_requires_cells():
    with pytest.raises(EmptyReport):
        average_rates(EvalReport())


def small_manifest():
    entries = [
        ManifestEntry(speaker_id=speaker, utterance_id=utt, wav_path=f"{speaker}/{utt}.wav", split=split)
        for speaker in ("spk01", "spk02")
        for utt, split in (("e0", CorpusSplit.ENROLL), ("t0", CorpusSplit.TEST))
    ]
    return CorpusManifest(
        entries=entries,
        noise_files=[NoiseFile(noise_name="white", wav_path="noise/white.wav")],
        snr_levels_db=[10.0, 0.0],
    )


def fake_extract(mixed, method):
    if mixed.startswith("spk02"):
        raise NoSpeech("nothing above threshold")
    return SimpleNamespace(speaker="spk01")


@pytest.fixture
def patched_pipeline():
    with patch("services.evaluation.EnrollmentService") as enrollment, patch(
        "services.evaluation.read_wav", side_effect=lambda path: path
    ), patch("services.evaluation.mix_at_snr", side_effect=lambda clean, noise, snr, rng: clean), patch(
        "services.evaluation.FeatureExtractor"
    ) as extractor, patch(
        "services.evaluation.identify_with_system",
        side_effect=lambda features, system: SimpleNamespace(speaker_id=features.speaker),
    ) as identify:
        extractor.return_value.extract.side_effect = fake_extract
        enrollment.return_value.train.return_value = MagicMock()
        yield SimpleNamespace(enrollment=enrollment, extractor=extractor, identify=identify)


@pytest.mark.parametrize("exclude_failed, total, rate", [(False, 2, 50.0), (True, 1, 100.0)])
def test_failed_probes_are_wrong_or_excluded(patched_pipeline, exclude_failed, total, rate):
    service = EvaluationService(RunConfig(exclude_failed=exclude_failed))

    report = service.run_identification(small_manifest(), FeatureMethod.MFCC)

    assert [(c.snr_db, c.correct, c.total, c.failed, c.rate) for c in report.cells] == [
        (10.0, 1, total, 1, rate),
        (0.0, 1, total, 1, rate),
    ]
    assert report.method_average(FeatureMethod.MFCC) == rate


def test_enrollment_features_are_cached_across_runs(patched_pipeline):
    service = EvaluationService(RunConfig())

    service.run_identification(small_manifest(), FeatureMethod.MFCC)
    service.run_identification(small_manifest(), FeatureMethod.MFCC, RunConfig(ga_generations=3))

    assert patched_pipeline.enrollment.return_value.extract_features.call_count == 1
    assert patched_pipeline.enrollment.return_value.train.call_count == 2
    assert patched_pipeline.extractor.return_value.extract.call_count == 4


def test_evaluate_merges_methods_and_records_run_meta(patched_pipeline):
    config = RunConfig(eval_methods=["mfcc", "rcc"], seed=42)

    report = EvaluationService(config).evaluate(small_manifest())

    assert [m.value for m in report.methods()] == ["mfcc", "rcc"]
    assert len(report.cells) == 4
    assert report.run_meta["methods"] == ["mfcc", "rcc"]
    assert report.run_meta["seeds"]["global"] == 42
    assert report.run_meta["speakers"] == ["spk01", "spk02"]
    assert report.run_meta["config"]["seed"] == 42


def test_evaluation_needs_test_entries():
    manifest = small_manifest()
    enroll_only = manifest.model_copy(update={"entries": manifest.split(CorpusSplit.ENROLL)})

    with pytest.raises(ManifestInvalid):
        EvaluationService(RunConfig()).run_identification(enroll_only, FeatureMethod.MFCC)


def test_sweep_points_follow_values(patched_pipeline):
    service = EvaluationService(RunConfig())

    curve = service.sweep_generations(small_manifest(), FeatureMethod.MFCC, [5, 1])

    assert curve.param == "generations"
    assert [(p.x, p.rate) for p in curve.points] == [(5, 50.0), (1, 50.0)]


@pytest.mark.parametrize(
    "param, values",
    [("mutation", [1]), ("crossover", []), ("generations", [-1]), ("crossover", [0]), ("crossover", ["two"])],
)
def test_sweep_rejects_bad_requests(param, values):
    with pytest.raises(SweepInvalid):
        EvaluationService(RunConfig()).sweep(small_manifest(), FeatureMethod.MFCC, param, values)


@pytest.fixture(scope="module")
def sweep_corpus(synthetic_corpus):
    manifest, _ = synthetic_corpus
    return manifest.model_copy(update={"snr_levels_db": [10.0]})


@pytest.mark.slow
def test_crossover_sweep_on_corpus_is_repeatable(sweep_corpus, fast_values):
    config = RunConfig(**fast_values)

    first = EvaluationService(config).sweep_crossover(sweep_corpus, FeatureMethod.MFCC, [1, 5])
    second = EvaluationService(config).sweep_crossover(sweep_corpus, FeatureMethod.MFCC, [1, 5])

    assert first.param == "crossover"
    assert [p.x for p in first.points] == [1, 5]
    assert all(0.0 <= p.rate <= 100.0 for p in first.points)
    assert first.points == second.points


@pytest.mark.slow
def test_generation_sweep_accepts_zero_generations(sweep_corpus, fast_values):
    config = RunConfig(**fast_values)

    curve = EvaluationService(config).sweep_generations(sweep_corpus, FeatureMethod.MFCC, [0])

    assert [p.x for p in curve.points] == [0]
    assert 0.0 <= curve.points[0].rate <= 100.0
