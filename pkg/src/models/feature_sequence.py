"""
This module defines FeatureSequence, the per-frame feature vectors every extractor produces.

Classes:
    - FeatureSequence: Read-only (n_frames, dim) matrix tagged with its extraction method.
"""

from dataclasses import dataclass

import numpy as np

from models.tags import FeatureMethod
from shared.exceptions import NonFiniteFeatures


@dataclass(frozen=True, eq=False)
class FeatureSequence:
    """
    Per-frame feature vectors.

    Attributes:
        vectors (np.ndarray): Read-only array of shape (n_frames, dim), all entries finite.
        method (FeatureMethod): The extractor that produced the vectors.
    """

    vectors: np.ndarray
    method: FeatureMethod

    def __post_init__(self) -> None:
        vectors = np.array(self.vectors, dtype=np.float64, copy=True)
        if vectors.ndim == 1:
            vectors = vectors.reshape(1, -1) if vectors.size else vectors.reshape(0, 0)
        if vectors.ndim != 2:
            raise NonFiniteFeatures(f"feature vectors must be 2-D, got ndim={vectors.ndim}")
        if not np.all(np.isfinite(vectors)):
            raise NonFiniteFeatures(
                "feature vectors contain NaN or Inf",
                {"method": FeatureMethod(self.method).value},
            )
        vectors.setflags(write=False)
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "method", FeatureMethod(self.method))

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    @property
    def n_frames(self) -> int:
        return int(self.vectors.shape[0])

    def __len__(self) -> int:
        return self.n_frames

    def mean_vector(self) -> np.ndarray:
        """Time-averaged vector used for utterance-level comparisons."""
        return self.vectors.mean(axis=0)

    def scaled(self, factor: float) -> "FeatureSequence":
        return FeatureSequence(self.vectors * factor, self.method)
