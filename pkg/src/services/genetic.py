"""
This module implements the genetic-algorithm codebook trainer. A chromosome selects K
distinct training-pool vectors as codewords; the population evolves by roulette
selection, multi-point crossover with duplicate repair, per-gene mutation and elitism.

Classes:
    - GAResult: Best chromosome, per-generation best fitness and the LBG baseline fitness.
    - GeneticTrainer: Seeded trainer bound to one pool and one GAConfig.

Functions:
    - ga_fitness: Fitness of a chromosome over a pool.
    - ga_train: Train a single-group codebook with the genetic algorithm.
"""

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Dict, List, Optional, Tuple

import numpy as np

from models.codebook import Chromosome, Codebook
from models.tags import FitnessMode
from schemas.configs import GAConfig
from services.base import BaseService
from services.vq import lbg_train, nearest, squared_distances
from shared.exceptions import CodebookInvalid, PoolTooSmall


_ENUMERATION_FACTOR = 4
_MAX_DRAWS_FACTOR = 50


def _as_pool(pool) -> np.ndarray:
    return np.atleast_2d(np.asarray(pool, dtype=np.float64))


def ga_fitness(ch: Chromosome, pool, cfg: GAConfig) -> float:
    """
    Fitness of the codebook formed by the chromosome's pool vectors; higher is fitter.

    NEG_DISTORTION is the negative mean squared distance of every pool vector to its
    nearest codeword. SIMILARITY is the mean cosine similarity of every pool vector to
    that same nearest codeword; a zero vector contributes 0.

    Args:
        ch (Chromosome): Selected pool indices.
        pool: Training vectors (n, dim).
        cfg (GAConfig): Supplies the fitness mode.

    Returns:
        float: The fitness value.

    Raises:
        CodebookInvalid: If a gene is not a pool index.
    """
    pool = _as_pool(pool)
    genes = np.asarray(ch.genes, dtype=np.int64)
    if genes.size == 0 or genes.max() >= pool.shape[0]:
        raise CodebookInvalid("chromosome genes must index the training pool", {"pool": pool.shape[0]})
    codewords = pool[genes]
    labels, dists = nearest(pool, codewords)
    if cfg.fitness_mode == FitnessMode.NEG_DISTORTION:
        return -float(np.mean(dists))

    matched = codewords[labels]
    dots = np.sum(pool * matched, axis=1)
    norms = np.linalg.norm(pool, axis=1) * np.linalg.norm(matched, axis=1)
    cosines = np.divide(dots, norms, out=np.zeros_like(dots), where=norms > 0.0)
    return float(np.mean(np.clip(cosines, -1.0, 1.0)))


@dataclass(frozen=True)
class GAResult:
    chromosome: Chromosome
    history: Tuple[float, ...]
    lbg_fitness: float

    @property
    def best_fitness(self) -> float:
        return float(self.chromosome.fitness)


class GeneticTrainer(BaseService):
    """
    Genetic-algorithm search over K-subsets of a training pool.

    The initial population holds one chromosome snapped from an LBG codebook (each LBG
    codeword replaced by its nearest unused pool vector) and seeded random ones. When
    the number of K-subsets is small the random part enumerates them instead, so tiny
    instances are searched exhaustively.

    Attributes:
        pool (np.ndarray): Training vectors (n, dim).
        config (GAConfig): Trainer parameters.
    """

    def __init__(self, pool, config: GAConfig, lbg_epsilon: float = 0.01) -> None:
        super().__init__(self.__class__.__name__)
        self.pool = _as_pool(pool)
        self.config = config
        self.__lbg_epsilon = lbg_epsilon
        self.__rng = np.random.default_rng(config.seed)
        self.__cache: Dict[Tuple[int, ...], float] = {}

    def fitness(self, genes) -> float:
        key = tuple(sorted(int(g) for g in genes))
        if key not in self.__cache:
            self.__cache[key] = ga_fitness(Chromosome(key), self.pool, self.config)
        return self.__cache[key]

    def lbg_chromosome(self, k: int) -> Tuple[int, ...]:
        """Pool indices nearest to the LBG codewords, greedily without reuse."""
        codebook = lbg_train(self.pool, k, self.__lbg_epsilon, seed=self.config.seed)
        d = squared_distances(codebook.codewords, self.pool)
        used: List[int] = []
        for row in d:
            for i in np.argsort(row, kind="stable"):
                if int(i) not in used:
                    used.append(int(i))
                    break
        return tuple(used)

    def initial_population(self, k: int, seed_genes: Tuple[int, ...]) -> List[Tuple[int, ...]]:
        n, size = self.pool.shape[0], self.config.population_size
        seed_key = tuple(sorted(seed_genes))
        population = [seed_genes]

        if comb(n, k) <= _ENUMERATION_FACTOR * size:
            others = [c for c in combinations(range(n), k) if c != seed_key]
            order = self.__rng.permutation(len(others))
            population.extend(others[i] for i in order[: size - 1])
        else:
            seen = {seed_key}
            for _ in range(_MAX_DRAWS_FACTOR * size):
                if len(population) == size:
                    break
                genes = tuple(int(g) for g in self.__rng.choice(n, size=k, replace=False))
                key = tuple(sorted(genes))
                if key not in seen:
                    seen.add(key)
                    population.append(genes)

        while len(population) < size:
            if comb(n, k) <= _ENUMERATION_FACTOR * size:
                population.append(population[int(self.__rng.integers(len(population)))])
            else:
                population.append(tuple(int(g) for g in self.__rng.choice(n, size=k, replace=False)))
        return population

    def select(self, fitness: np.ndarray) -> int:
        weights = fitness - fitness.min() + 1e-12
        return int(self.__rng.choice(fitness.size, p=weights / weights.sum()))

    def crossover(self, left: Tuple[int, ...], right: Tuple[int, ...]) -> Tuple[List[int], List[int]]:
        k = len(left)
        if k == 1:
            return list(left), list(right)
        n_points = min(self.config.crossover_points, k - 1)
        cuts = np.sort(self.__rng.choice(np.arange(1, k), size=n_points, replace=False))
        a, b = list(left), list(right)
        first, second = [], []
        bounds = [0, *cuts.tolist(), k]
        for segment, (start, stop) in enumerate(zip(bounds[:-1], bounds[1:])):
            src_a, src_b = (a, b) if segment % 2 == 0 else (b, a)
            first.extend(src_a[start:stop])
            second.extend(src_b[start:stop])
        return first, second

    def repair(self, genes: List[int]) -> List[int]:
        """Replace repeated genes with random unused pool indices."""
        seen, dup_positions = set(), []
        for pos, g in enumerate(genes):
            if g in seen:
                dup_positions.append(pos)
            seen.add(g)
        if dup_positions:
            unused = np.setdiff1d(np.arange(self.pool.shape[0]), np.fromiter(seen, dtype=np.int64))
            fresh = self.__rng.choice(unused, size=len(dup_positions), replace=False)
            for pos, g in zip(dup_positions, fresh):
                genes[pos] = int(g)
        return genes

    def mutate(self, genes: List[int]) -> List[int]:
        n = self.pool.shape[0]
        for pos in range(len(genes)):
            if self.__rng.random() >= self.config.mutation_prob:
                continue
            unused = np.setdiff1d(np.arange(n), np.asarray(genes, dtype=np.int64))
            if unused.size:
                genes[pos] = int(self.__rng.choice(unused))
        return genes

    def evolve(self, k: int) -> GAResult:
        """
        Run the search for a K-codeword selection.

        Returns:
            GAResult: Best-ever chromosome with sorted genes, best fitness after the initial
                population and after every generation (non-decreasing), and the fitness of
                the LBG-snapped chromosome.

        Raises:
            PoolTooSmall: If the pool holds fewer than k vectors.
            CodebookInvalid: If k < 1.
        """
        if k < 1:
            raise CodebookInvalid("codebook size must be at least 1", {"k": k})
        if self.pool.shape[0] < k:
            raise PoolTooSmall("training pool smaller than the codebook", {"pool": self.pool.shape[0], "k": k})

        seed_genes = self.lbg_chromosome(k)
        lbg_fitness = self.fitness(seed_genes)
        population = self.initial_population(k, seed_genes)
        scores = np.array([self.fitness(g) for g in population])

        best_index = int(np.argmax(scores))
        best_genes, best_score = population[best_index], float(scores[best_index])
        history = [best_score]

        for _ in range(self.config.generations):
            elite_order = np.argsort(-scores, kind="stable")[: self.config.elitism_count]
            next_population = [population[i] for i in elite_order]
            while len(next_population) < self.config.population_size:
                left = population[self.select(scores)]
                right = population[self.select(scores)]
                for child in self.crossover(left, right):
                    if len(next_population) == self.config.population_size:
                        break
                    next_population.append(tuple(self.mutate(self.repair(child))))
            population = next_population
            scores = np.array([self.fitness(g) for g in population])

            generation_best = int(np.argmax(scores))
            if scores[generation_best] > best_score:
                best_genes, best_score = population[generation_best], float(scores[generation_best])
            history.append(best_score)

        self.logger.debug(
            "GA search finished",
            {"k": k, "best_fitness": best_score, "lbg_fitness": lbg_fitness, "evaluations": len(self.__cache)},
        )
        return GAResult(
            chromosome=Chromosome(tuple(sorted(best_genes)), best_score),
            history=tuple(history),
            lbg_fitness=float(lbg_fitness),
        )

    def train(self, k: int, member_meta=None) -> Codebook:
        with self.operation("GA codebook training", {"k": k, "pool": int(self.pool.shape[0])}):
            result = self.evolve(k)
            genes = np.asarray(result.chromosome.genes, dtype=np.int64)
            return Codebook.single_group(
                self.pool[genes],
                member_meta=member_meta,
                provenance={
                    "trainer": "ga",
                    "config": self.config.model_dump(mode="json"),
                    "fitness_history": list(result.history),
                    "lbg_fitness": result.lbg_fitness,
                    "best_fitness": result.best_fitness,
                    "genes": [int(g) for g in genes],
                },
            )


def ga_train(pool, k: int, cfg: GAConfig, lbg_epsilon: Optional[float] = None) -> Codebook:
    """
    Train a single-group codebook of k pool vectors with the genetic algorithm.

    Args:
        pool: Training vectors (n, dim).
        k (int): Codebook size.
        cfg (GAConfig): Trainer parameters, including the seed.
        lbg_epsilon (Optional[float]): Split perturbation of the LBG-seeded chromosome.

    Returns:
        Codebook: Best-ever selection; fitness history and LBG baseline in provenance.
    """
    trainer = GeneticTrainer(pool, cfg, lbg_epsilon if lbg_epsilon is not None else 0.01)
    return trainer.train(k)
