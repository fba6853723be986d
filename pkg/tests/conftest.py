"""
Shared fixtures for the speaker identification tests.

Fixtures:
    - synthetic_corpus: A 5-speaker synthetic corpus written once per test session, with
      its manifest.
    - fast_values: RunConfig values small enough for end-to-end runs on the synthetic corpus.
    - fast_config: The RunConfig built from fast_values, writing under the test directory.
    - rng: A seeded numpy Generator for each test function.
"""

import hypothesis
import numpy as np
import pytest

from schemas.run_config import RunConfig
from services.synthetic_corpus import SyntheticCorpusService

np.seterr(all="warn")

hypothesis.settings.register_profile("default", deadline=None, max_examples=50)
hypothesis.settings.register_profile("fast", deadline=None, max_examples=5)
hypothesis.settings.register_profile("debugger", deadline=None, report_multiple_bugs=False)
hypothesis.settings.load_profile("default")


@pytest.fixture(scope="session")
def synthetic_corpus(tmp_path_factory):
    """
    Generate the corpus at the start of the session.

    Returns the manifest (absolute paths) and the directory holding `manifest.json`.
    """
    root = tmp_path_factory.mktemp("corpus")
    manifest = SyntheticCorpusService(seed=1234).generate(root, n_speakers=5)
    return manifest, root


@pytest.fixture(scope="session")
def fast_values():
    return {
        "seed": 1234,
        "feature_method": "mfcc",
        "codebook_size": 8,
        "training_pool_limit": 1500,
        "ga_population_size": 12,
        "ga_generations": 3,
        "group_count": 2,
        "hmm_n_states": 3,
        "hmm_max_iters": 10,
        "eval_methods": ["mfcc"],
    }


@pytest.fixture(scope="function")
def fast_config(fast_values, tmp_path):
    return RunConfig(**fast_values, output_dir=str(tmp_path / "out"))


@pytest.fixture(scope="function")
def rng():
    return np.random.default_rng(20240601)
