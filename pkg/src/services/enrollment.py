"""
This module contains the EnrollmentService class, the training step shared by the
`train` command and by evaluation runs.

Classes:
    - EnrollmentFeatures: Enroll-split features per speaker and the noise reference features.
    - EnrollmentService: Feature extraction, grouping, codebook and speaker-model training.
"""

from dataclasses import dataclass
from typing import Dict, List, Tuple

from models.codebook import Codebook
from models.enrolled_system import EnrolledSystem
from models.feature_sequence import FeatureSequence
from models.tags import CodebookTrainer, CorpusSplit, FeatureMethod
from schemas.manifest import CorpusManifest
from schemas.run_config import RunConfig
from services.base import BaseService
from services.dhmm import baum_welch
from services.features import FeatureExtractor
from services.genetic import GeneticTrainer
from services.grouping import build_groups
from services.signal_io import read_wav
from services.vq import lbg_train, pool_from, quantize
from utils.seeding import derive_seed, make_rng


@dataclass(frozen=True)
class EnrollmentFeatures:
    """
    Attributes:
        method (FeatureMethod): Extractor used.
        utterances (dict): (utterance_id, features) pairs per speaker, speakers sorted.
        noise_refs (dict): Noise reference features by noise name.
    """

    method: FeatureMethod
    utterances: Dict[str, List[Tuple[str, FeatureSequence]]]
    noise_refs: Dict[str, FeatureSequence]

    @property
    def n_utterances(self) -> int:
        return sum(len(items) for items in self.utterances.values())


class EnrollmentService(BaseService):
    """
    Service class for enrolling the speakers of a manifest.

    Attributes:
        config (RunConfig): Every training parameter and the global seed.
        extractor (FeatureExtractor): Feature extraction bound to the same config.
    """

    def __init__(self, config: RunConfig) -> None:
        super().__init__(self.__class__.__name__)
        self.config = config
        self.extractor = FeatureExtractor(config)

    def extract_features(self, manifest: CorpusManifest, method: FeatureMethod) -> EnrollmentFeatures:
        """
        Extract features of every enroll utterance and of every noise recording.

        Args:
            manifest (CorpusManifest): Corpus with resolved paths.
            method (FeatureMethod): Extractor.

        Returns:
            EnrollmentFeatures: The extracted features.

        Raises:
            ManifestInvalid: If there are no enroll entries or no noise files.
        """
        method = FeatureMethod(method)
        with self.operation("enrollment feature extraction", {"method": method.value}):
            manifest.validate_for_training()
            utterances = {
                speaker: [
                    (entry.utterance_id, self.extractor.extract(read_wav(entry.wav_path), method))
                    for entry in entries
                ]
                for speaker, entries in manifest.by_speaker(CorpusSplit.ENROLL).items()
            }
            noise_refs = {
                noise.noise_name: self.extractor.extract_noise_reference(read_wav(noise.wav_path), method)
                for noise in manifest.noise_files
            }
            return EnrollmentFeatures(method, utterances, noise_refs)

    def train_symbol_codebook(self, pool) -> Codebook:
        cfg = self.config
        if cfg.codebook_trainer == CodebookTrainer.LBG:
            return lbg_train(
                pool,
                cfg.codebook_size,
                cfg.lbg_epsilon,
                seed=derive_seed(cfg.seed, "lbg"),
                max_iters=cfg.lbg_max_iters,
            )
        trainer = GeneticTrainer(pool, cfg.ga_config(derive_seed(cfg.seed, "ga")), cfg.lbg_epsilon)
        return trainer.train(cfg.codebook_size)

    def train(self, features: EnrollmentFeatures) -> EnrolledSystem:
        """
        Train the grouped codebook, the symbol codebook and one DHMM per speaker.

        A group count above the number of enroll utterances is clamped with a warning.

        Args:
            features (EnrollmentFeatures): Output of extract_features.

        Returns:
            EnrolledSystem: The trained system.

        Raises:
            TooFewUtterances: If there are no enroll utterances.
            PoolTooSmall: If the frame pool is smaller than the codebook size.
        """
        cfg = self.config
        with self.operation("enrollment training", {"method": features.method.value, "trainer": cfg.codebook_trainer.value}):
            group_count = cfg.group_count
            if 0 < features.n_utterances < group_count:
                self.logger.warning(
                    "Group count clamped to the number of enroll utterances",
                    {"requested": group_count, "utterances": features.n_utterances},
                )
                group_count = features.n_utterances

            group_codebook = build_groups(
                features.utterances,
                features.noise_refs,
                group_count,
                cfg.seed,
                cfg.ga_config(derive_seed(cfg.seed, "leader"), cfg.grouping_fitness_mode),
            )

            sequences = [fs for speaker in sorted(features.utterances) for _, fs in features.utterances[speaker]]
            pool = pool_from(sequences, cfg.training_pool_limit, make_rng(cfg.seed, "pool"))
            symbol_codebook = self.train_symbol_codebook(pool)

            models = {}
            for speaker, items in features.utterances.items():
                symbols = [quantize(fs, symbol_codebook)[0] for _, fs in items]
                hmm = cfg.hmm_config(derive_seed(cfg.seed, "hmm", speaker))
                models[speaker] = baum_welch(
                    symbols,
                    hmm.n_states,
                    symbol_codebook.size,
                    hmm.max_iters,
                    hmm.tol,
                    hmm.seed,
                    hmm.topology,
                    hmm.emission_floor,
                    speaker_id=speaker,
                )

            return EnrolledSystem(
                method=features.method,
                group_codebook=group_codebook,
                symbol_codebook=symbol_codebook,
                models=models,
                config=cfg,
                noise_names=tuple(sorted(features.noise_refs)),
            )

    def enroll(self, manifest: CorpusManifest, method: FeatureMethod) -> EnrolledSystem:
        return self.train(self.extract_features(manifest, method))
