from unittest.mock import patch

import numpy as np
import pytest

from models.feature_sequence import FeatureSequence
from models.tags import CodebookTrainer, FeatureMethod
from schemas.manifest import CorpusManifest
from schemas.run_config import RunConfig
from services.enrollment import EnrollmentFeatures, EnrollmentService
from services.genetic import GeneticTrainer
from shared.exceptions import ManifestInvalid, PoolTooSmall


def features(rng, speakers=("spk01", "spk02", "spk03"), per_speaker=1):
    utterances = {
        speaker: [
            (f"e{u}", FeatureSequence(rng.normal(loc=3.0 * i, size=(40, 4)), FeatureMethod.MFCC))
            for u in range(per_speaker)
        ]
        for i, speaker in enumerate(speakers)
    }
    noise_refs = {
        "white": FeatureSequence(rng.normal(size=(20, 4)), FeatureMethod.MFCC),
        "brown": FeatureSequence(rng.normal(loc=5.0, size=(20, 4)), FeatureMethod.MFCC),
    }
    return EnrollmentFeatures(FeatureMethod.MFCC, utterances, noise_refs)


def small_config(**values):
    base = dict(
        seed=77,
        codebook_size=4,
        training_pool_limit=100,
        ga_population_size=6,
        ga_generations=2,
        group_count=2,
        hmm_n_states=2,
        hmm_max_iters=3,
    )
    return RunConfig(**{**base, **values})


def test_train_builds_every_part(rng):
    system = EnrollmentService(small_config()).train(features(rng))

    assert system.speakers == ("spk01", "spk02", "spk03")
    assert system.group_codebook.n_groups == 2
    assert system.group_codebook.size == 3
    assert system.symbol_codebook.size == 4
    assert system.symbol_codebook.provenance["trainer"] == "ga"
    assert system.noise_names == ("brown", "white")
    assert all(model.n_symbols == 4 for model in system.models.values())


def test_lbg_trainer_is_selectable(rng):
    system = EnrollmentService(small_config(codebook_trainer=CodebookTrainer.LBG)).train(features(rng))

    assert system.symbol_codebook.provenance["trainer"] == "lbg"


def test_group_count_is_clamped_to_utterances(rng):
    service = EnrollmentService(small_config(group_count=5))

    with patch.object(service.logger, "warning") as warning:
        system = service.train(features(rng))

    assert system.group_codebook.n_groups == 3
    warning.assert_called_once()


def test_training_is_deterministic():
    first = EnrollmentService(small_config()).train(features(np.random.default_rng(3)))
    second = EnrollmentService(small_config()).train(features(np.random.default_rng(3)))

    assert np.array_equal(first.symbol_codebook.codewords, second.symbol_codebook.codewords)
    assert first.group_codebook.groups == second.group_codebook.groups
    for speaker in first.speakers:
        assert np.array_equal(first.models[speaker].emit, second.models[speaker].emit)


def test_ga_trainer_receives_derived_seed(rng):
    service = EnrollmentService(small_config())

    with patch("services.enrollment.GeneticTrainer", wraps=GeneticTrainer) as trainer:
        service.train(features(rng))

    config = trainer.call_args[0][1]
    assert config.seed != 77
    assert config.population_size == 6


def test_pool_smaller_than_codebook(rng):
    with pytest.raises(PoolTooSmall):
        EnrollmentService(small_config(codebook_size=4, training_pool_limit=3)).train(features(rng))


def test_extraction_needs_enroll_entries():
    with pytest.raises(ManifestInvalid):
        EnrollmentService(small_config()).extract_features(CorpusManifest(), FeatureMethod.MFCC)
