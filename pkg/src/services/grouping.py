"""
This module builds the grouped codebook used by the identification encoder: every
enrolled utterance becomes a codeword, utterances are clustered by how they compare to
the environmental noise references, and each group receives one leading codeword.

Functions:
    - noise_profiles: Similarity of each utterance mean to each noise mean.
    - cluster_profiles: Seeded k-means clustering of profiles into g non-empty groups.
    - build_groups: The grouped codebook.
"""

from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sklearn.cluster import KMeans

from models.codebook import Codebook
from models.feature_sequence import FeatureSequence
from models.tags import FitnessMode
from schemas.configs import GAConfig
from services.genetic import GeneticTrainer
from services.vq import similarity
from shared.exceptions import DimMismatch, NoNoiseRefs, TooFewUtterances
from utils.logger import Logger
from utils.seeding import derive_seed


logger = Logger(__name__)

EnrolledUtterances = Dict[str, Sequence[Tuple[str, FeatureSequence]]]

_KMEANS_MAX_ITER = 100
_KMEANS_TOL = 1e-12


def noise_profiles(means: np.ndarray, noise_means: np.ndarray) -> np.ndarray:
    """Matrix P[i, j] = cosine similarity of utterance mean i and noise mean j."""
    return np.array([[similarity(m, n) for n in noise_means] for m in means])


def cluster_profiles(profiles: np.ndarray, g: int, seed: int) -> List[Tuple[int, ...]]:
    """
    Partition profile rows into g non-empty groups ordered by their smallest member.

    One k-means++ initialization refined by Lloyd iterations. A group left empty by
    the final assignment takes the member farthest from its centroid out of a group
    with several members.

    Args:
        profiles (np.ndarray): One row per utterance.
        g (int): Number of groups, 1 <= g <= rows.
        seed (int): Seed of the initialization, reduced to the 32-bit range KMeans accepts.

    Returns:
        List[Tuple[int, ...]]: Row indices per group.
    """
    n = profiles.shape[0]
    if g == 1:
        return [tuple(range(n))]
    if g == n:
        return [(i,) for i in range(n)]

    kmeans = KMeans(
        n_clusters=g,
        init="k-means++",
        n_init=1,
        algorithm="lloyd",
        max_iter=_KMEANS_MAX_ITER,
        tol=_KMEANS_TOL,
        random_state=int(seed) & 0xFFFFFFFF,
    ).fit(profiles)
    labels = kmeans.labels_.copy()
    dists = kmeans.transform(profiles)[np.arange(n), labels]

    for empty in np.flatnonzero(np.bincount(labels, minlength=g) == 0):
        counts = np.bincount(labels, minlength=g)
        movable = np.flatnonzero(counts[labels] > 1)
        donor = movable[np.argmax(dists[movable])]
        labels[donor] = empty
        dists[donor] = 0.0

    groups = [tuple(int(i) for i in np.flatnonzero(labels == j)) for j in range(g)]
    return sorted(groups, key=lambda members: members[0])


def build_groups(
    enrolled: EnrolledUtterances,
    noise_refs: Dict[str, FeatureSequence],
    g: int,
    seed: int,
    ga_config: Optional[GAConfig] = None,
) -> Codebook:
    """
    Grouped codebook over all enrolled utterances.

    Codewords are the time-averaged utterance vectors, speakers in sorted order and
    utterances in the given order. Each group's leader is the member the genetic
    trainer selects as the best single codeword for that group.

    Args:
        enrolled (EnrolledUtterances): (utterance_id, features) pairs per speaker.
        noise_refs (Dict[str, FeatureSequence]): Noise reference features by name.
        g (int): Number of groups.
        seed (int): Seed of the clustering and the leader searches.
        ga_config (Optional[GAConfig]): Leader-search parameters; defaults use
            SIMILARITY fitness.

    Returns:
        Codebook: Codewords with member_meta (speaker_id, utterance_id), g groups and leaders.

    Raises:
        TooFewUtterances: If there are no utterances or g exceeds their number.
        NoNoiseRefs: If no noise reference is given.
    """
    meta = [(speaker, utt) for speaker in sorted(enrolled) for utt, _ in enrolled[speaker]]
    means = [fs.mean_vector() for speaker in sorted(enrolled) for _, fs in enrolled[speaker]]
    n = len(means)
    if n == 0 or g < 1 or g > n:
        raise TooFewUtterances("group count must be between 1 and the number of utterances", {"groups": g, "utterances": n})
    if not noise_refs:
        raise NoNoiseRefs("grouping needs at least one noise reference")

    means = np.vstack(means)
    noise_means = np.vstack([noise_refs[name].mean_vector() for name in sorted(noise_refs)])
    if noise_means.shape[1] != means.shape[1]:
        raise DimMismatch(
            "noise references and utterances differ in dimension",
            {"noise": noise_means.shape[1], "utterances": means.shape[1]},
        )

    profiles = noise_profiles(means, noise_means)
    groups = cluster_profiles(profiles, g, derive_seed(seed, "grouping"))

    base = ga_config or GAConfig(fitness_mode=FitnessMode.SIMILARITY)
    leaders, leader_fitness = [], []
    for index, members in enumerate(groups):
        if len(members) == 1:
            leaders.append(members[0])
            continue
        cfg = base.model_copy(update={"seed": derive_seed(seed, "leader", index)})
        result = GeneticTrainer(means[list(members)], cfg).evolve(1)
        leaders.append(members[result.chromosome.genes[0]])
        leader_fitness.append(result.best_fitness)

    logger.info("Utterance groups built", {"groups": g, "utterances": n, "noise_refs": len(noise_refs)})
    return Codebook(
        means,
        groups=tuple(groups),
        leaders=tuple(leaders),
        member_meta=tuple(meta),
        provenance={
            "trainer": "grouping",
            "seed": int(seed),
            "noise_names": sorted(noise_refs),
            "leader_fitness_mode": base.fitness_mode.value,
            "leader_fitness": leader_fitness,
        },
    )
