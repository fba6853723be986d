"""
This module implements discrete hidden Markov models over codebook symbols: the scaled
forward recursion used for scoring and multi-sequence Baum-Welch training.

Functions:
    - forward_log_likelihood: log P(symbols | model).
    - baum_welch_with_history: Train a model and return the log-likelihood trajectory.
    - baum_welch: Train a model.
"""

from typing import List, Sequence, Tuple

import numpy as np

from models.speaker_model import SpeakerModel
from models.tags import HmmTopology
from shared.exceptions import EmptySequence, EmptyTrainingSet, SymbolOutOfRange
from utils.logger import Logger


logger = Logger(__name__)


def _symbols(symbols, n_symbols: int) -> np.ndarray:
    obs = np.asarray(symbols).reshape(-1)
    if obs.size == 0:
        raise EmptySequence("symbol sequence is empty")
    if not np.issubdtype(obs.dtype, np.integer):
        if not np.all(np.equal(np.mod(obs, 1), 0)):
            raise SymbolOutOfRange("symbols must be integers")
        obs = obs.astype(np.int64)
    if obs.min() < 0 or obs.max() >= n_symbols:
        raise SymbolOutOfRange(
            "symbol outside the model alphabet",
            {"min": int(obs.min()), "max": int(obs.max()), "n_symbols": n_symbols},
        )
    return obs.astype(np.int64)


def _forward(pi: np.ndarray, trans: np.ndarray, emit: np.ndarray, obs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Scaled forward pass: normalized alphas (T, N) and scale factors (T,); a zero scale stops the pass."""
    alpha = np.zeros((obs.size, pi.size))
    scale = np.zeros(obs.size)
    a = pi * emit[:, obs[0]]
    for t in range(obs.size):
        if t:
            a = (alpha[t - 1] @ trans) * emit[:, obs[t]]
        scale[t] = a.sum()
        if scale[t] <= 0.0:
            break
        alpha[t] = a / scale[t]
    return alpha, scale


def _backward(trans: np.ndarray, emit: np.ndarray, obs: np.ndarray, scale: np.ndarray) -> np.ndarray:
    beta = np.ones((obs.size, trans.shape[0]))
    for t in range(obs.size - 2, -1, -1):
        beta[t] = trans @ (emit[:, obs[t + 1]] * beta[t + 1]) / scale[t + 1]
    return beta


def forward_log_likelihood(model: SpeakerModel, symbols) -> float:
    """
    Log-probability of a symbol sequence under a model, by the scaled forward recursion.

    Args:
        model (SpeakerModel): The model.
        symbols: Codebook indices.

    Returns:
        float: log P(symbols | model), at most 0; -inf if the sequence is impossible.

    Raises:
        EmptySequence: If the sequence is empty.
        SymbolOutOfRange: If a symbol is not in [0, n_symbols).
    """
    obs = _symbols(symbols, model.n_symbols)
    _, scale = _forward(model.pi, model.trans, model.emit, obs)
    if np.any(scale <= 0.0):
        return float("-inf")
    return float(np.sum(np.log(scale)))


def _floored_distribution(counts: np.ndarray, floor: float) -> np.ndarray:
    """
    Maximize sum(counts * log(p)) subject to p >= floor and sum(p) == 1.

    The optimum is p_k = max(floor, counts_k / lam); entries are pinned at the floor until
    the remaining mass is consistent.
    """
    counts = np.asarray(counts, dtype=np.float64)
    pinned = np.zeros(counts.size, dtype=bool)
    while True:
        free = ~pinned
        mass = 1.0 - floor * np.count_nonzero(pinned)
        p = np.full(counts.size, floor)
        p[free] = counts[free] * mass / counts[free].sum()
        newly_pinned = free & (p < floor)
        if not np.any(newly_pinned):
            return p / p.sum()
        pinned |= newly_pinned


def _initial_model(
    sequences: Sequence[np.ndarray],
    n_states: int,
    n_symbols: int,
    topology: HmmTopology,
    emission_floor: float,
    rng: np.random.Generator,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    if topology == HmmTopology.LEFT_TO_RIGHT:
        pi = np.zeros(n_states)
        pi[0] = 1.0
        trans = np.zeros((n_states, n_states))
        for i in range(n_states - 1):
            stay = rng.uniform(0.4, 0.6)
            trans[i, i], trans[i, i + 1] = stay, 1.0 - stay
        trans[-1, -1] = 1.0
    else:
        pi = rng.uniform(0.8, 1.2, size=n_states)
        pi /= pi.sum()
        trans = rng.uniform(0.8, 1.2, size=(n_states, n_states))
        trans /= trans.sum(axis=1, keepdims=True)

    frequencies = np.bincount(np.concatenate(sequences), minlength=n_symbols).astype(np.float64)
    frequencies /= frequencies.sum()
    emit = np.vstack(
        [
            _floored_distribution(frequencies * rng.uniform(0.8, 1.2, size=n_symbols), emission_floor)
            for _ in range(n_states)
        ]
    )
    return pi, trans, emit


def baum_welch_with_history(
    sequences,
    n_states: int,
    n_symbols: int,
    max_iters: int = 20,
    tol: float = 1e-4,
    seed: int = 0,
    topology: HmmTopology = HmmTopology.LEFT_TO_RIGHT,
    emission_floor: float = 1e-8,
    speaker_id: str = "",
) -> Tuple[SpeakerModel, List[float]]:
    """
    Baum-Welch re-estimation over several symbol sequences.

    Expected counts of all sequences are summed; the initial distribution is the mean
    first-frame state posterior. Emission rows are re-estimated under the floor
    constraint, so every iteration keeps emissions >= emission_floor and the total
    log-likelihood never decreases. A state with no expected occupancy keeps its rows.
    Training stops after max_iters updates or when the log-likelihood improves by less
    than tol.

    Args:
        sequences: Symbol sequences; empty ones are ignored.
        n_states (int): Hidden states.
        n_symbols (int): Alphabet size, the codebook size.
        max_iters (int): Maximum re-estimation steps.
        tol (float): Minimum log-likelihood improvement.
        seed (int): Seed of the initial perturbation.
        topology (HmmTopology): Initial transition structure.
        emission_floor (float): Minimum emission probability.
        speaker_id (str): Identifier stored in the model.

    Returns:
        Tuple[SpeakerModel, List[float]]: The model and the total log-likelihood of every
            evaluated parameter set, in order.

    Raises:
        EmptyTrainingSet: If no non-empty sequence is given.
        SymbolOutOfRange: If a symbol is not in [0, n_symbols).
    """
    observations = [_symbols(s, n_symbols) for s in sequences if np.asarray(s).size]
    if not observations:
        raise EmptyTrainingSet("no non-empty training sequence", {"speaker": speaker_id})

    rng = np.random.default_rng(seed)
    pi, trans, emit = _initial_model(observations, n_states, n_symbols, topology, emission_floor, rng)
    history: List[float] = []

    for iteration in range(max_iters + 1):
        pi_acc = np.zeros(n_states)
        trans_acc = np.zeros((n_states, n_states))
        emit_acc = np.zeros((n_symbols, n_states))
        total = 0.0
        for obs in observations:
            alpha, scale = _forward(pi, trans, emit, obs)
            total += float(np.sum(np.log(scale)))
            beta = _backward(trans, emit, obs, scale)
            gamma = alpha * beta
            gamma /= gamma.sum(axis=1, keepdims=True)
            pi_acc += gamma[0]
            if obs.size > 1:
                weighted = emit[:, obs[1:]].T * beta[1:] / scale[1:, None]
                trans_acc += trans * (alpha[:-1].T @ weighted)
            np.add.at(emit_acc, obs, gamma)
        history.append(total)

        if iteration == max_iters or (iteration and total - history[-2] < tol):
            break

        pi = pi_acc / pi_acc.sum()
        occupied = trans_acc.sum(axis=1) > 0.0
        trans = trans.copy()
        trans[occupied] = trans_acc[occupied] / trans_acc[occupied].sum(axis=1, keepdims=True)
        emit = emit.copy()
        for state, counts in enumerate(emit_acc.T):
            if counts.sum() > 0.0:
                emit[state] = _floored_distribution(counts, emission_floor)

    logger.debug(
        "Baum-Welch finished",
        {"speaker": speaker_id, "iterations": len(history), "log_likelihood": history[-1]},
    )
    return SpeakerModel(speaker_id, pi, trans, emit), history


def baum_welch(
    sequences,
    n_states: int,
    n_symbols: int,
    max_iters: int = 20,
    tol: float = 1e-4,
    seed: int = 0,
    topology: HmmTopology = HmmTopology.LEFT_TO_RIGHT,
    emission_floor: float = 1e-8,
    speaker_id: str = "",
) -> SpeakerModel:
    model, _ = baum_welch_with_history(
        sequences, n_states, n_symbols, max_iters, tol, seed, topology, emission_floor, speaker_id
    )
    return model
