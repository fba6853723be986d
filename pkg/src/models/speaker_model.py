"""
This module defines SpeakerModel, a discrete hidden Markov model over codebook symbols.

Classes:
    - SpeakerModel: Initial, transition and emission distributions of one enrolled speaker.
"""

from dataclasses import dataclass

import numpy as np

from shared.exceptions import ModelInvalid


STOCHASTIC_TOLERANCE = 1e-9


def _stochastic(name: str, matrix: np.ndarray) -> None:
    if not np.all(np.isfinite(matrix)) or np.any(matrix < 0):
        raise ModelInvalid(f"{name} must hold finite non-negative probabilities")
    sums = matrix.sum(axis=-1)
    if np.any(np.abs(sums - 1.0) > STOCHASTIC_TOLERANCE):
        raise ModelInvalid(
            f"{name} rows must sum to 1",
            {"max_deviation": float(np.max(np.abs(sums - 1.0)))},
        )


@dataclass(frozen=True, eq=False)
class SpeakerModel:
    """
    Discrete HMM.

    Attributes:
        speaker_id (str): Enrolled speaker the model belongs to.
        pi (np.ndarray): Initial state distribution, shape (n_states,).
        trans (np.ndarray): Row-stochastic transitions, shape (n_states, n_states).
        emit (np.ndarray): Row-stochastic emissions, shape (n_states, n_symbols).
    """

    speaker_id: str
    pi: np.ndarray
    trans: np.ndarray
    emit: np.ndarray

    def __post_init__(self) -> None:
        pi = np.array(self.pi, dtype=np.float64, copy=True).reshape(-1)
        trans = np.array(self.trans, dtype=np.float64, copy=True)
        emit = np.array(self.emit, dtype=np.float64, copy=True)
        n = pi.size
        if n == 0 or trans.shape != (n, n) or emit.ndim != 2 or emit.shape[0] != n or emit.shape[1] == 0:
            raise ModelInvalid(
                "inconsistent model shapes",
                {"pi": pi.shape, "trans": trans.shape, "emit": emit.shape},
            )
        _stochastic("pi", pi)
        _stochastic("trans", trans)
        _stochastic("emit", emit)
        for array in (pi, trans, emit):
            array.setflags(write=False)
        object.__setattr__(self, "speaker_id", str(self.speaker_id))
        object.__setattr__(self, "pi", pi)
        object.__setattr__(self, "trans", trans)
        object.__setattr__(self, "emit", emit)

    @property
    def n_states(self) -> int:
        return int(self.pi.size)

    @property
    def n_symbols(self) -> int:
        return int(self.emit.shape[1])

    def permuted(self, order) -> "SpeakerModel":
        """The same model with its states relabeled by `order`."""
        order = np.asarray(order, dtype=int)
        return SpeakerModel(
            self.speaker_id,
            self.pi[order],
            self.trans[np.ix_(order, order)],
            self.emit[order],
        )
