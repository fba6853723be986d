"""
This module implements vector quantization: distances, nearest-codeword quantization,
Lloyd refinement, the splitting LBG trainer and the grouped encoder.

Functions:
    - distortion: Squared Euclidean distance.
    - similarity: Cosine similarity.
    - squared_distances: All pairwise squared distances between vectors and codewords.
    - nearest: Nearest-codeword index and distance per vector.
    - quantize: Map a feature sequence to codebook symbols.
    - lloyd_refine: Lloyd iterations with empty-cell repair.
    - lbg_train: Splitting LBG codebook design.
    - encode: Group of the leader closest to a probe's mean vector.
    - pool_from: Stack feature sequences into a training pool.
"""

from typing import List, Optional, Tuple

import numpy as np

from models.codebook import Codebook
from models.feature_sequence import FeatureSequence
from shared.exceptions import (
    CodebookInvalid,
    DimMismatch,
    EmptySequence,
    PoolTooSmall,
    ZeroVector,
)
from utils.logger import Logger


logger = Logger(__name__)

_CHUNK_ROWS = 2048


def _vector(v) -> np.ndarray:
    return np.asarray(v, dtype=np.float64).reshape(-1)


def distortion(v, w) -> float:
    """
    Squared Euclidean distance sum((v - w)**2).

    Raises:
        DimMismatch: If the vectors differ in length.
    """
    v, w = _vector(v), _vector(w)
    if v.shape != w.shape:
        raise DimMismatch("vectors differ in dimension", {"left": v.size, "right": w.size})
    return float(np.sum((v - w) ** 2))


def similarity(a, b) -> float:
    """
    Cosine similarity (a . b) / (|a| |b|), clipped to [-1, 1].

    Raises:
        DimMismatch: If the vectors differ in length.
        ZeroVector: If either vector is zero.
    """
    a, b = _vector(a), _vector(b)
    if a.shape != b.shape:
        raise DimMismatch("vectors differ in dimension", {"left": a.size, "right": b.size})
    norm_a, norm_b = np.linalg.norm(a), np.linalg.norm(b)
    if norm_a == 0.0 or norm_b == 0.0:
        raise ZeroVector("cosine similarity of a zero vector is undefined")
    return float(np.clip(np.dot(a, b) / (norm_a * norm_b), -1.0, 1.0))


def squared_distances(vectors: np.ndarray, codewords: np.ndarray) -> np.ndarray:
    """
    Matrix D[i, j] = sum((vectors[i] - codewords[j])**2), computed in row chunks.

    Raises:
        DimMismatch: If the dimensions differ.
    """
    vectors = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
    codewords = np.atleast_2d(np.asarray(codewords, dtype=np.float64))
    if vectors.shape[1] != codewords.shape[1]:
        raise DimMismatch(
            "vectors and codewords differ in dimension",
            {"vectors": vectors.shape[1], "codewords": codewords.shape[1]},
        )
    out = np.empty((vectors.shape[0], codewords.shape[0]))
    for start in range(0, vectors.shape[0], _CHUNK_ROWS):
        block = vectors[start : start + _CHUNK_ROWS]
        out[start : start + block.shape[0]] = np.sum((block[:, None, :] - codewords[None, :, :]) ** 2, axis=-1)
    return out


def nearest(vectors: np.ndarray, codewords: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Index of the nearest codeword (lowest index on ties) and its distance, per vector."""
    d = squared_distances(vectors, codewords)
    labels = np.argmin(d, axis=1)
    return labels, d[np.arange(d.shape[0]), labels]


def quantize(fs: FeatureSequence, cb: Codebook) -> Tuple[np.ndarray, float]:
    """
    Map every frame to its minimum-distortion codeword.

    Args:
        fs (FeatureSequence): Frames to quantize.
        cb (Codebook): Codebook of the same dimension.

    Returns:
        Tuple[np.ndarray, float]: Symbol per frame and mean per-frame distortion.

    Raises:
        EmptySequence: If the sequence has no frames.
        DimMismatch: If the dimensions differ.
    """
    if fs.n_frames == 0:
        raise EmptySequence("cannot quantize an empty feature sequence")
    if fs.dim != cb.dim:
        raise DimMismatch("feature and codebook dimensions differ", {"features": fs.dim, "codebook": cb.dim})
    symbols, dists = nearest(fs.vectors, cb.codewords)
    return symbols.astype(np.int64), float(np.mean(dists))


def lloyd_refine(
    pool: np.ndarray,
    codewords: np.ndarray,
    max_iters: int,
    tol: float,
) -> Tuple[np.ndarray, List[float]]:
    """
    Alternate nearest-codeword assignment and centroid update.

    A codeword left without members is moved onto the pool vector farthest from its
    current codeword. Stops when the relative distortion improvement drops below `tol`.

    Args:
        pool (np.ndarray): Training vectors (n, dim).
        codewords (np.ndarray): Initial codewords (k, dim).
        max_iters (int): Maximum number of assignments.
        tol (float): Relative improvement threshold.

    Returns:
        Tuple[np.ndarray, List[float]]: Refined codewords and the mean distortion of
            every assignment, non-increasing.
    """
    codewords = np.array(codewords, dtype=np.float64, copy=True)
    history: List[float] = []
    for _ in range(max_iters):
        labels, dists = nearest(pool, codewords)
        current = float(np.mean(dists))
        history.append(current)
        if len(history) > 1:
            previous = history[-2]
            if previous <= 0.0 or (previous - current) / previous < tol:
                break

        counts = np.bincount(labels, minlength=codewords.shape[0])
        for j in np.flatnonzero(counts):
            codewords[j] = pool[labels == j].mean(axis=0)
        empty = np.flatnonzero(counts == 0)
        if empty.size:
            logger.warning("Repairing empty codebook cells", {"empty_cells": int(empty.size)})
            taken = set()
            order = np.argsort(-dists, kind="stable")
            candidates = iter(i for i in order if i not in taken)
            for j in empty:
                i = next(candidates)
                taken.add(i)
                codewords[j] = pool[i]
    return codewords, history


def lbg_train(
    pool,
    k: int,
    epsilon: float,
    seed: int = 0,
    max_iters: int = 100,
    tol: float = 1e-6,
) -> Codebook:
    """
    Splitting LBG codebook design.

    Starts from the pool centroid. Each round perturbs codewords by +/- epsilon times the
    per-dimension pool spread and Lloyd-refines; when k is not a power of two the last
    round splits only the highest-distortion cells.

    Args:
        pool: Training vectors (n, dim).
        k (int): Codebook size.
        epsilon (float): Relative split perturbation, > 0.
        seed (int): Recorded in provenance; the algorithm draws no random numbers.
        max_iters (int): Lloyd iterations per round.
        tol (float): Relative improvement that ends a round.

    Returns:
        Codebook: A single-group codebook of k codewords.

    Raises:
        PoolTooSmall: If the pool holds fewer than k vectors.
        CodebookInvalid: If k < 1 or epsilon <= 0.
    """
    pool = np.atleast_2d(np.asarray(pool, dtype=np.float64))
    if k < 1 or epsilon <= 0.0:
        raise CodebookInvalid("LBG needs k >= 1 and epsilon > 0", {"k": k, "epsilon": epsilon})
    if pool.shape[0] < k:
        raise PoolTooSmall("training pool smaller than the codebook", {"pool": pool.shape[0], "k": k})

    spread = pool.std(axis=0)
    spread[spread == 0.0] = 1.0
    step = epsilon * spread

    codewords = pool.mean(axis=0, keepdims=True)
    history: List[float] = [float(np.mean(nearest(pool, codewords)[1]))]
    while codewords.shape[0] < k:
        m = codewords.shape[0]
        n_split = min(m, k - m)
        if n_split == m:
            chosen = np.arange(m)
        else:
            labels, dists = nearest(pool, codewords)
            cell_distortion = np.bincount(labels, weights=dists, minlength=m)
            chosen = np.sort(np.argsort(-cell_distortion, kind="stable")[:n_split])
        split = codewords.copy()
        split[chosen] += step
        codewords = np.vstack([split, codewords[chosen] - step])
        codewords, round_history = lloyd_refine(pool, codewords, max_iters, tol)
        history.extend(round_history)

    return Codebook.single_group(
        codewords,
        provenance={
            "trainer": "lbg",
            "epsilon": float(epsilon),
            "seed": int(seed),
            "max_iters": int(max_iters),
            "distortion_history": history,
        },
    )


def encode(probe: FeatureSequence, cb: Codebook) -> int:
    """
    Group whose leader is closest to the probe's time-averaged vector; lowest index on ties.

    Raises:
        EmptySequence: If the probe has no frames.
        DimMismatch: If the dimensions differ.
    """
    if probe.n_frames == 0:
        raise EmptySequence("cannot encode an empty probe")
    if probe.dim != cb.dim:
        raise DimMismatch("probe and codebook dimensions differ", {"probe": probe.dim, "codebook": cb.dim})
    d = squared_distances(probe.mean_vector()[None, :], cb.leader_vectors)[0]
    return int(np.argmin(d))


def pool_from(sequences: List[FeatureSequence], limit: Optional[int] = None, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """
    Stack frames of several sequences into one training pool.

    When `limit` is exceeded, a sorted random subset of `limit` rows is kept.
    """
    if not sequences:
        raise EmptySequence("no sequences to pool")
    pool = np.vstack([fs.vectors for fs in sequences])
    if limit is not None and pool.shape[0] > limit:
        rng = rng or np.random.default_rng(0)
        keep = np.sort(rng.choice(pool.shape[0], size=limit, replace=False))
        pool = pool[keep]
    return pool
