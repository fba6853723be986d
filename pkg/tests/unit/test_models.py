import numpy as np
import pytest

from models.audio import AudioBuffer, FrameMatrix
from models.codebook import Chromosome, Codebook
from models.enrolled_system import EnrolledSystem
from models.feature_sequence import FeatureSequence
from models.speaker_model import SpeakerModel
from models.tags import FeatureMethod
from schemas.run_config import RunConfig
from shared.exceptions import (
    CodebookInvalid,
    EmptyModelSet,
    LengthMismatch,
    ModelInvalid,
    NonFiniteFeatures,
    OverlapOutOfRange,
    UnsupportedFormat,
)


def test_audio_buffer_is_read_only():
    buf = AudioBuffer([0.1, 0.2], 8000)

    with pytest.raises(ValueError):
        buf.samples[0] = 0.5
    assert buf.duration_s == pytest.approx(2 / 8000)


def test_audio_buffer_rejects_bad_rate():
    with pytest.raises(UnsupportedFormat):
        AudioBuffer([0.1], 0)


def test_frame_matrix_checks_shape_and_hop():
    with pytest.raises(LengthMismatch):
        FrameMatrix(np.zeros((2, 10)), 12, 6, 8000)
    with pytest.raises(OverlapOutOfRange):
        FrameMatrix(np.zeros((2, 10)), 10, 11, 8000)


def test_feature_sequence_rejects_non_finite():
    with pytest.raises(NonFiniteFeatures):
        FeatureSequence(np.array([[1.0, np.nan]]), FeatureMethod.MFCC)


def test_feature_sequence_mean_and_tag():
    fs = FeatureSequence(np.array([[1.0, 2.0], [3.0, 4.0]]), "lpcc")

    assert fs.method == FeatureMethod.LPCC
    assert fs.mean_vector().tolist() == [2.0, 3.0]
    assert (fs.n_frames, fs.dim) == (2, 2)


@pytest.mark.parametrize("method, code", [(FeatureMethod.LPC, 1), (FeatureMethod.MFCC, 4), (FeatureMethod.DDMFCC, 6)])
def test_feature_method_codes(method, code):
    assert method.code == code
    assert FeatureMethod.from_code(code) == method


def test_feature_method_unknown_code():
    with pytest.raises(ValueError):
        FeatureMethod.from_code(7)


@pytest.mark.parametrize(
    "groups, leaders",
    [
        (((0, 1),), (0,)),
        (((0, 1, 2), (2,)), (0, 2)),
        (((0,), ()), (0,)),
        (((0, 1), (2,)), (2, 2)),
    ],
)
def test_codebook_partition_invariants(groups, leaders):
    with pytest.raises(CodebookInvalid):
        Codebook(np.zeros((3, 2)), groups=groups, leaders=leaders)


def test_codebook_speakers_per_group():
    cb = Codebook(
        np.zeros((3, 2)),
        groups=((0, 2), (1,)),
        leaders=(2, 1),
        member_meta=(("b", "u0"), ("a", "u0"), ("a", "u1")),
    )

    assert cb.speakers_in_group(0) == ("a", "b")
    assert cb.speakers() == ("a", "b")
    assert cb.leader_vectors.shape == (2, 2)


def test_codebook_without_meta_has_no_speakers():
    cb = Codebook.single_group(np.ones((2, 2)))

    assert cb.speakers() == ()
    with pytest.raises(CodebookInvalid):
        cb.speakers_in_group(0)


def test_chromosome_genes_distinct():
    with pytest.raises(CodebookInvalid):
        Chromosome((1, 1))
    assert Chromosome((3, 1)).key == (1, 3)


def test_chromosome_fitness_is_set_at_construction():
    assert Chromosome((0, 2), -1.5).fitness == -1.5
    with pytest.raises(CodebookInvalid):
        Chromosome((0, 2), float("nan"))


def test_speaker_model_permutation_keeps_rows_stochastic():
    model = SpeakerModel("a", [0.2, 0.8], [[0.9, 0.1], [0.3, 0.7]], [[0.5, 0.5], [1.0, 0.0]])

    permuted = model.permuted([1, 0])

    assert permuted.pi.tolist() == [0.8, 0.2]
    assert permuted.trans.tolist() == [[0.7, 0.3], [0.1, 0.9]]


def test_speaker_model_shape_mismatch():
    with pytest.raises(ModelInvalid):
        SpeakerModel("a", [1.0], [[1.0]], [[0.5, 0.5], [0.5, 0.5]])


def enrolled_system(models):
    return EnrolledSystem(
        method=FeatureMethod.MFCC,
        group_codebook=Codebook.single_group(np.zeros((1, 2)), member_meta=[("a", "e0")]),
        symbol_codebook=Codebook.single_group(np.zeros((2, 2))),
        models=models,
        config=RunConfig(),
    )


def test_enrolled_system_checks_models():
    single = SpeakerModel("a", [1.0], [[1.0]], [[0.5, 0.5]])

    assert enrolled_system({"a": single}).speakers == ("a",)
    with pytest.raises(EmptyModelSet):
        enrolled_system({})
    with pytest.raises(EmptyModelSet):
        enrolled_system({"b": SpeakerModel("b", [1.0], [[1.0]], [[0.5, 0.5]])})
    with pytest.raises(ModelInvalid):
        enrolled_system({"a": SpeakerModel("a", [1.0], [[1.0]], [[1.0]])})
