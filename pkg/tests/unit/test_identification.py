import numpy as np
import pytest

from models.codebook import Codebook
from models.enrolled_system import EnrolledSystem
from models.feature_sequence import FeatureSequence
from models.speaker_model import SpeakerModel
from models.tags import FeatureMethod, SearchMode
from schemas.run_config import RunConfig
from services.dhmm import forward_log_likelihood
from services.identification import identify, identify_with_system
from shared.exceptions import DimMismatch, EmptyModelSet


def group_codebook():
    return Codebook(
        np.array([[0.0, 0.0], [0.5, 0.0], [10.0, 10.0], [10.5, 10.0]]),
        groups=((0, 1), (2, 3)),
        leaders=(0, 2),
        member_meta=(("alice", "e0"), ("alice", "e1"), ("bob", "e0"), ("bob", "e1")),
    )


def symbol_codebook():
    return Codebook.single_group(np.array([[0.0, 0.0], [10.0, 10.0]]))


def model(speaker_id, favourite):
    emit = np.full((1, 2), 0.1)
    emit[0, favourite] = 0.9
    return SpeakerModel(speaker_id, [1.0], [[1.0]], emit)


def models():
    return {"alice": model("alice", 0), "bob": model("bob", 1)}


def probe_near(point, rng):
    return FeatureSequence(rng.normal(point, 0.1, size=(10, 2)), FeatureMethod.MFCC)


def test_grouped_scores_only_group_speakers(rng):
    result = identify(probe_near([0.0, 0.0], rng), group_codebook(), symbol_codebook(), models())

    assert result.speaker_id == "alice"
    assert result.group == 0
    assert list(result.scores) == ["alice"]


def test_exhaustive_scores_every_speaker(rng):
    probe = probe_near([10.0, 10.0], rng)

    result = identify(probe, group_codebook(), symbol_codebook(), models(), SearchMode.EXHAUSTIVE)

    assert result.speaker_id == "bob"
    assert result.group is None
    assert list(result.scores) == ["alice", "bob"]
    assert result.scores["bob"] == pytest.approx(forward_log_likelihood(models()["bob"], np.ones(10, dtype=int)))


def test_ties_go_to_lowest_speaker_id(rng):
    tied = {"zed": model("zed", 0), "amy": model("amy", 0)}
    cb = Codebook.single_group(np.zeros((1, 2)), member_meta=[("zed", "e0")])

    result = identify(probe_near([0.0, 0.0], rng), cb, symbol_codebook(), tied, SearchMode.EXHAUSTIVE)

    assert result.speaker_id == "amy"


def test_errors(rng):
    probe = probe_near([0.0, 0.0], rng)
    with pytest.raises(EmptyModelSet):
        identify(probe, group_codebook(), symbol_codebook(), {})
    with pytest.raises(EmptyModelSet):
        identify(probe, group_codebook(), symbol_codebook(), {"bob": model("bob", 1)})
    with pytest.raises(DimMismatch):
        identify(FeatureSequence(np.ones((3, 5)), FeatureMethod.MFCC), group_codebook(), symbol_codebook(), models())


def test_system_search_mode_is_the_default(rng):
    system = EnrolledSystem(
        method=FeatureMethod.MFCC,
        group_codebook=group_codebook(),
        symbol_codebook=symbol_codebook(),
        models=models(),
        config=RunConfig(search_mode=SearchMode.EXHAUSTIVE),
    )
    probe = probe_near([0.0, 0.0], rng)

    assert identify_with_system(probe, system).group is None
    assert identify_with_system(probe, system, SearchMode.GROUPED).group == 0
