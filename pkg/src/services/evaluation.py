"""
This module contains the EvaluationService class, which scores enrolled systems on noisy
mixtures of the test utterances, and the averaging of rate tables.

Classes:
    - EvaluationService: Identification runs, multi-method evaluation and GA sweeps.

Functions:
    - average_rates: Per-noise and per-method averages of a report's cells.
"""

import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import ValidationError

from models.audio import AudioBuffer
from models.enrolled_system import EnrolledSystem
from models.feature_sequence import FeatureSequence
from models.tags import CorpusSplit, FeatureMethod
from schemas.manifest import CorpusManifest, ManifestEntry
from schemas.report import Curve, CurvePoint, EvalReport, MethodAverage, NoiseAverage, RateCell
from schemas.run_config import RunConfig
from services.base import BaseService
from services.enrollment import EnrollmentFeatures, EnrollmentService
from services.features import FeatureExtractor
from services.identification import identify_with_system
from services.signal_io import mix_at_snr, read_wav
from shared.exceptions import EmptyReport, SpeakerIdError, SweepInvalid
from utils.logger import Logger
from utils.seeding import derive_seed, make_rng


logger = Logger(__name__)

_FEATURE_PREFIXES = (
    "wiener_",
    "endpoint_",
    "pre_emphasis",
    "frame_ms",
    "overlap",
    "lpc_",
    "lpcc_",
    "rcc_",
    "mfcc_",
    "delta_",
)

SWEEP_PARAMS = {"crossover": "ga_crossover_points", "generations": "ga_generations"}

Probe = Tuple[str, float, ManifestEntry]


def average_rates(report: EvalReport) -> EvalReport:
    """
    Fill the report's averages from its cells.

    The per-noise average of a method is the mean of its cells over SNRs; the method
    average is the mean of its per-noise averages. No rounding is applied.

    Args:
        report (EvalReport): Report with cells.

    Returns:
        EvalReport: A copy with noise_averages and method_averages filled.

    Raises:
        EmptyReport: If the report has no cells.
    """
    if not report.cells:
        raise EmptyReport("cannot average a report without cells")
    noise_averages: List[NoiseAverage] = []
    for noise in report.noises():
        for method in report.methods():
            rates = [c.rate for c in report.cells if c.noise_name == noise and c.method == method]
            if rates:
                noise_averages.append(NoiseAverage(noise_name=noise, method=method, rate=float(np.mean(rates))))
    method_averages = [
        MethodAverage(method=method, rate=float(np.mean([a.rate for a in noise_averages if a.method == method])))
        for method in report.methods()
    ]
    return report.model_copy(update={"noise_averages": noise_averages, "method_averages": method_averages})


def _feature_key(config: RunConfig) -> Tuple[Tuple[str, Any], ...]:
    dump = config.model_dump(mode="json")
    return tuple((k, dump[k]) for k in sorted(dump) if k.startswith(_FEATURE_PREFIXES))


class EvaluationService(BaseService):
    """
    Service class for noisy-condition evaluations.

    Audio and features are cached across runs of the same service, so sweeps that only
    change codebook parameters retrain the codebook without re-extracting features.

    Attributes:
        config (RunConfig): Default configuration of the runs.
    """

    def __init__(self, config: RunConfig) -> None:
        super().__init__(self.__class__.__name__)
        self.config = config
        self.__lock = threading.Lock()
        self.__audio: Dict[str, AudioBuffer] = {}
        self.__enroll_features: Dict[Tuple, EnrollmentFeatures] = {}
        self.__probe_features: Dict[Tuple, Union[FeatureSequence, SpeakerIdError]] = {}

    def __read(self, path: str) -> AudioBuffer:
        with self.__lock:
            cached = self.__audio.get(path)
        if cached is None:
            cached = read_wav(path)
            with self.__lock:
                self.__audio[path] = cached
        return cached

    def __enrollment(self, manifest: CorpusManifest, method: FeatureMethod, config: RunConfig) -> EnrolledSystem:
        service = EnrollmentService(config)
        key = (method, _feature_key(config))
        features = self.__enroll_features.get(key)
        if features is None:
            features = service.extract_features(manifest, method)
            self.__enroll_features[key] = features
        return service.train(features)

    def __probe(
        self,
        probe: Probe,
        noises: Dict[str, str],
        method: FeatureMethod,
        config: RunConfig,
        extractor: FeatureExtractor,
    ) -> Union[FeatureSequence, SpeakerIdError]:
        noise_name, snr_db, entry = probe
        key = (
            method,
            _feature_key(config),
            config.noise_random_offset,
            config.seed if config.noise_random_offset else None,
            noise_name,
            snr_db,
            entry.speaker_id,
            entry.utterance_id,
        )
        with self.__lock:
            if key in self.__probe_features:
                return self.__probe_features[key]
        try:
            rng = None
            if config.noise_random_offset:
                rng = make_rng(config.seed, "noise-offset", noise_name, snr_db, entry.speaker_id, entry.utterance_id)
            mixed = mix_at_snr(self.__read(entry.wav_path), self.__read(noises[noise_name]), snr_db, rng)
            result: Union[FeatureSequence, SpeakerIdError] = extractor.extract(mixed, method)
        except SpeakerIdError as known:
            result = known
        with self.__lock:
            self.__probe_features[key] = result
        return result

    def __score(self, system: EnrolledSystem, probe: Probe, features) -> Tuple[bool, bool]:
        """(correct, failed) of one probe."""
        _, _, entry = probe
        if isinstance(features, SpeakerIdError):
            self.logger.debug(
                "Probe failed",
                {"speaker": entry.speaker_id, "utterance": entry.utterance_id, "error": features.name},
            )
            return False, True
        try:
            decision = identify_with_system(features, system)
        except SpeakerIdError as known:
            self.logger.debug(
                "Identification failed",
                {"speaker": entry.speaker_id, "utterance": entry.utterance_id, "error": known.name},
            )
            return False, True
        return decision.speaker_id == entry.speaker_id, False

    def run_identification(
        self,
        manifest: CorpusManifest,
        method: FeatureMethod,
        config: Optional[RunConfig] = None,
    ) -> EvalReport:
        """
        Enroll on the enroll split and identify every test utterance under every
        (noise, SNR) condition of the manifest.

        A probe whose processing fails counts as a wrong answer, or is left out of the
        cell's total when `exclude_failed` is set.

        Args:
            manifest (CorpusManifest): Corpus with resolved paths.
            method (FeatureMethod): Feature method.
            config (Optional[RunConfig]): Overrides the service configuration.

        Returns:
            EvalReport: One cell per (noise, SNR), averages filled.

        Raises:
            ManifestInvalid: If the manifest cannot support an evaluation.
        """
        method = FeatureMethod(method)
        cfg = config or self.config
        with self.operation("identification run", {"method": method.value}):
            manifest.validate_for_evaluation()
            system = self.__enrollment(manifest, method, cfg)
            extractor = FeatureExtractor(cfg)
            noises = {n.noise_name: n.wav_path for n in manifest.noise_files}
            tests = [e for entries in manifest.by_speaker(CorpusSplit.TEST).values() for e in entries]

            cells: List[RateCell] = []
            for noise_name in noises:
                for snr_db in manifest.snr_levels_db:
                    probes = [(noise_name, float(snr_db), entry) for entry in tests]

                    def evaluate_probe(probe: Probe) -> Tuple[bool, bool]:
                        return self.__score(system, probe, self.__probe(probe, noises, method, cfg, extractor))

                    with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
                        outcomes = list(pool.map(evaluate_probe, probes))

                    failed = sum(1 for _, f in outcomes if f)
                    correct = sum(1 for c, _ in outcomes if c)
                    total = len(outcomes) - failed if cfg.exclude_failed else len(outcomes)
                    if failed and cfg.exclude_failed:
                        self.logger.warning(
                            "Failed probes excluded",
                            {"noise": noise_name, "snr_db": snr_db, "method": method.value, "excluded": failed},
                        )
                    if total == 0:
                        self.logger.warning(
                            "No scored probes, rate set to 0",
                            {"noise": noise_name, "snr_db": snr_db, "method": method.value},
                        )
                    rate = 100.0 * correct / total if total else 0.0
                    cells.append(
                        RateCell(
                            noise_name=noise_name,
                            snr_db=float(snr_db),
                            method=method,
                            rate=rate,
                            correct=correct,
                            total=total,
                            failed=failed,
                        )
                    )
                    self.logger.info(
                        "Condition scored",
                        {"noise": noise_name, "snr_db": snr_db, "method": method.value, "rate": rate},
                    )
            return average_rates(EvalReport(cells=cells, run_meta=self.run_meta(manifest, cfg, [method])))

    def evaluate(self, manifest: CorpusManifest, config: Optional[RunConfig] = None) -> EvalReport:
        """
        Identification runs for every method of `eval_methods`, merged into one report.

        Args:
            manifest (CorpusManifest): Corpus with resolved paths.
            config (Optional[RunConfig]): Overrides the service configuration.

        Returns:
            EvalReport: Cells of every method with averages and run metadata.
        """
        cfg = config or self.config
        with self.operation("evaluation", {"methods": [m.value for m in cfg.eval_methods]}):
            cells: List[RateCell] = []
            for method in cfg.eval_methods:
                cells.extend(self.run_identification(manifest, method, cfg).cells)
            return average_rates(EvalReport(cells=cells, run_meta=self.run_meta(manifest, cfg, cfg.eval_methods)))

    def sweep(
        self,
        manifest: CorpusManifest,
        method: FeatureMethod,
        param: str,
        values: Sequence[int],
        config: Optional[RunConfig] = None,
    ) -> Curve:
        """
        One identification run per value of a GA parameter, everything else held fixed.

        Each point is the method's average rate over all noise conditions.

        Args:
            manifest (CorpusManifest): Corpus with resolved paths.
            method (FeatureMethod): Feature method.
            param (str): "crossover" or "generations".
            values (Sequence[int]): Parameter values, in output order.
            config (Optional[RunConfig]): Base configuration.

        Returns:
            Curve: (value, rate) points.

        Raises:
            SweepInvalid: If the parameter is unknown, the values are empty, or a value
                makes the configuration invalid.
        """
        method = FeatureMethod(method)
        cfg = config or self.config
        if param not in SWEEP_PARAMS:
            raise SweepInvalid(f"unknown sweep parameter {param!r}", {"allowed": sorted(SWEEP_PARAMS)})
        if not values:
            raise SweepInvalid("sweep needs at least one value", {"param": param})

        key = SWEEP_PARAMS[param]
        configs = []
        for value in values:
            try:
                configs.append((int(value), RunConfig.model_validate({**cfg.model_dump(), key: value})))
            except (ValidationError, ValueError, TypeError) as e:
                raise SweepInvalid(f"invalid {param} value {value!r}", {"param": param}) from e

        with self.operation("sweep", {"param": param, "method": method.value, "values": [v for v, _ in configs]}):
            points = []
            for value, point_config in configs:
                report = self.run_identification(manifest, method, point_config)
                points.append(CurvePoint(x=value, rate=report.method_average(method)))
            return Curve(param=param, method=method, points=points)

    def sweep_crossover(self, manifest, method, points: Sequence[int], config: Optional[RunConfig] = None) -> Curve:
        return self.sweep(manifest, method, "crossover", points, config)

    def sweep_generations(self, manifest, method, gens: Sequence[int], config: Optional[RunConfig] = None) -> Curve:
        return self.sweep(manifest, method, "generations", gens, config)

    @staticmethod
    def run_meta(manifest: CorpusManifest, config: RunConfig, methods: Sequence[FeatureMethod]) -> Dict[str, Any]:
        return {
            "config": config.model_dump(mode="json"),
            "methods": [FeatureMethod(m).value for m in methods],
            "noise_names": [n.noise_name for n in manifest.noise_files],
            "snr_levels_db": list(manifest.snr_levels_db),
            "speakers": manifest.speakers(),
            "seeds": {
                "global": config.seed,
                "pool": derive_seed(config.seed, "pool"),
                "ga": derive_seed(config.seed, "ga"),
                "lbg": derive_seed(config.seed, "lbg"),
                "leader": derive_seed(config.seed, "leader"),
            },
        }
