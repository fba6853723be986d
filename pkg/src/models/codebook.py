"""
This module defines the vector-quantization containers.

Classes:
    - Codebook: Codewords partitioned into groups, each group with one leading codeword.
    - Chromosome: An index selection over a training pool, as evolved by the GA trainer.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from shared.exceptions import CodebookInvalid


MemberMeta = Tuple[str, str]


@dataclass(frozen=True, eq=False)
class Codebook:
    """
    Codeword vectors with a group partition.

    Attributes:
        codewords (np.ndarray): Read-only (K, dim) matrix, all entries finite.
        groups (tuple): G disjoint, non-empty tuples of codeword indices covering 0..K-1.
        leaders (tuple): One codeword index per group, `leaders[g] in groups[g]`.
        member_meta (Optional[tuple]): (speaker_id, utterance_id) per codeword when index-trained.
        provenance (dict): Trainer name, config and training histories.
    """

    codewords: np.ndarray
    groups: Tuple[Tuple[int, ...], ...]
    leaders: Tuple[int, ...]
    member_meta: Optional[Tuple[MemberMeta, ...]] = None
    provenance: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        codewords = np.array(self.codewords, dtype=np.float64, copy=True)
        if codewords.ndim != 2 or codewords.shape[0] == 0:
            raise CodebookInvalid(f"codewords must be a non-empty (K, dim) matrix, got {codewords.shape}")
        if not np.all(np.isfinite(codewords)):
            raise CodebookInvalid("codewords contain NaN or Inf")
        k = codewords.shape[0]
        groups = tuple(tuple(int(i) for i in group) for group in self.groups)
        leaders = tuple(int(i) for i in self.leaders)

        if not groups or any(len(group) == 0 for group in groups):
            raise CodebookInvalid("every group must be non-empty")
        flat = [i for group in groups for i in group]
        if sorted(flat) != list(range(k)):
            raise CodebookInvalid(
                "groups must partition the codeword indices",
                {"codewords": k, "indexed": len(flat)},
            )
        if len(leaders) != len(groups) or any(
            leader not in group for leader, group in zip(leaders, groups)
        ):
            raise CodebookInvalid("each group needs exactly one leader drawn from its members")

        member_meta = None
        if self.member_meta is not None:
            member_meta = tuple((str(s), str(u)) for s, u in self.member_meta)
            if len(member_meta) != k:
                raise CodebookInvalid("member_meta must describe every codeword")

        codewords.setflags(write=False)
        object.__setattr__(self, "codewords", codewords)
        object.__setattr__(self, "groups", groups)
        object.__setattr__(self, "leaders", leaders)
        object.__setattr__(self, "member_meta", member_meta)
        object.__setattr__(self, "provenance", dict(self.provenance))

    @classmethod
    def single_group(
        cls,
        codewords,
        leader: int = 0,
        member_meta: Optional[Sequence[MemberMeta]] = None,
        provenance: Optional[Dict[str, Any]] = None,
    ) -> "Codebook":
        """
        Build a codebook whose codewords form one group.

        Args:
            codewords: (K, dim) matrix.
            leader (int): Index of the leading codeword.
            member_meta (Optional[Sequence]): Per-codeword provenance.
            provenance (Optional[dict]): Training metadata.

        Returns:
            Codebook: The single-group codebook.
        """
        k = int(np.asarray(codewords).shape[0])
        return cls(
            codewords,
            groups=(tuple(range(k)),),
            leaders=(leader,),
            member_meta=tuple(member_meta) if member_meta is not None else None,
            provenance=provenance or {},
        )

    @property
    def size(self) -> int:
        return int(self.codewords.shape[0])

    @property
    def dim(self) -> int:
        return int(self.codewords.shape[1])

    @property
    def n_groups(self) -> int:
        return len(self.groups)

    @property
    def leader_vectors(self) -> np.ndarray:
        return self.codewords[list(self.leaders)]

    def speakers_in_group(self, group: int) -> Tuple[str, ...]:
        """Sorted distinct speaker ids owning codewords of a group."""
        if self.member_meta is None:
            raise CodebookInvalid("codebook carries no speaker provenance")
        return tuple(sorted({self.member_meta[i][0] for i in self.groups[group]}))

    def speakers(self) -> Tuple[str, ...]:
        if self.member_meta is None:
            return ()
        return tuple(sorted({speaker for speaker, _ in self.member_meta}))


@dataclass(frozen=True)
class Chromosome:
    """
    Distinct training-pool indices selected as codewords.

    Attributes:
        genes (tuple): K distinct pool indices.
        fitness (Optional[float]): Cached fitness once evaluated.
    """

    genes: Tuple[int, ...]
    fitness: Optional[float] = None

    def __post_init__(self) -> None:
        genes = tuple(int(g) for g in self.genes)
        if len(set(genes)) != len(genes):
            raise CodebookInvalid("chromosome genes must be distinct", {"genes": genes})
        if any(g < 0 for g in genes):
            raise CodebookInvalid("chromosome genes must be non-negative pool indices")
        if self.fitness is not None and not np.isfinite(self.fitness):
            raise CodebookInvalid("chromosome fitness must be finite")
        object.__setattr__(self, "genes", genes)

    @property
    def key(self) -> Tuple[int, ...]:
        """Order-free identity of the selected set."""
        return tuple(sorted(self.genes))
