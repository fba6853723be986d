"""
This module contains RunConfig, the flat configuration of one command invocation.

Every field maps 1:1 to a key of the JSON config file and to a `--flag-name` of the
command line. The per-stage config models are derived from it on demand.

DTOs:
    - RunConfig: Validated, frozen run configuration.
"""

from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from models.tags import (
    CodebookTrainer,
    DeltaMode,
    FeatureMethod,
    FitnessMode,
    HmmTopology,
    SearchMode,
)
from schemas.configs import (
    EndpointConfig,
    FeatureConfig,
    FramingConfig,
    GAConfig,
    HmmConfig,
    LBGConfig,
    MfccConfig,
    WienerConfig,
)
from shared.constants import TABLE_METHODS


class RunConfig(BaseModel):
    """
    Flat run configuration; unknown keys are rejected.
    """

    seed: int = Field(1234, ge=0, description="Global seed fanned out to every stage")
    jobs: int = Field(1, ge=1, description="Worker threads used by evaluation")

    wiener_enabled: bool = Field(True, description="Apply Wiener denoising")
    wiener_frame_len: int = Field(256, ge=8, description="Wiener STFT frame length (samples)")
    wiener_noise_estimate_frames: int = Field(6, ge=1, description="Leading frames used for the noise PSD")
    wiener_smoothing_alpha: float = Field(0.98, ge=0.0, lt=1.0, description="Decision-directed smoothing")
    wiener_gain_floor: float = Field(0.1, gt=0.0, lt=1.0, description="Minimum Wiener gain")

    endpoint_enabled: bool = Field(True, description="Apply endpoint detection and silence removal")
    endpoint_energy_floor_db: float = Field(-20.0, description="Upper bound of the noise floor (dB)")
    endpoint_threshold_offset_db: float = Field(10.0, gt=0.0, description="Speech threshold above floor (dB)")
    endpoint_min_speech_frames: int = Field(5, ge=1, description="Shortest speech run (frames)")
    endpoint_min_silence_frames: int = Field(10, ge=1, description="Shortest silence gap (frames)")

    pre_emphasis_alpha: float = Field(0.97, ge=0.0, le=1.0, description="Pre-emphasis coefficient")
    frame_ms: float = Field(23.22, ge=10.0, le=30.0, description="Frame length (ms)")
    overlap_fraction: float = Field(0.5, ge=0.25, le=0.75, description="Frame overlap fraction")

    feature_method: FeatureMethod = Field(FeatureMethod.MFCC, description="Feature extractor")
    lpc_order: int = Field(12, ge=1, description="LPC order")
    lpcc_n_ceps: int = Field(12, ge=1, description="LPC cepstra kept")
    rcc_n_ceps: int = Field(12, ge=1, description="Real cepstra kept")
    rcc_n_fft: int = Field(512, ge=2, description="Real cepstrum FFT size")
    mfcc_n_fft: int = Field(512, ge=2, description="MFCC FFT size")
    mfcc_n_filters: int = Field(26, ge=1, description="Mel filters")
    mfcc_n_ceps: int = Field(12, ge=1, description="Mel cepstra kept")
    mfcc_fmin_hz: float = Field(0.0, ge=0.0, description="Lowest mel filter edge (Hz)")
    mfcc_fmax_hz: Optional[float] = Field(None, gt=0.0, description="Highest mel filter edge (Hz), null = Nyquist")
    mfcc_include_c0: bool = Field(False, description="Keep MFCC c0")
    delta_window: int = Field(2, ge=1, description="Delta regression half-window")
    delta_mode: DeltaMode = Field(DeltaMode.STANDALONE, description="Delta features alone or appended")

    codebook_trainer: CodebookTrainer = Field(CodebookTrainer.GA, description="Symbol codebook trainer")
    codebook_size: int = Field(16, ge=1, description="Symbol codebook size")
    training_pool_limit: int = Field(4000, ge=1, description="Maximum frames in the codebook training pool")
    lbg_epsilon: float = Field(0.01, gt=0.0, description="LBG split perturbation")
    lbg_max_iters: int = Field(100, ge=1, description="LBG Lloyd iterations per size")

    ga_population_size: int = Field(30, ge=2, description="GA population size")
    ga_generations: int = Field(5, ge=0, description="GA generations")
    ga_crossover_points: int = Field(5, ge=1, description="GA crossover cut points")
    ga_mutation_prob: float = Field(0.05, ge=0.0, le=1.0, description="GA per-gene mutation probability")
    ga_elitism_count: int = Field(2, ge=1, description="GA elite chromosomes")
    ga_fitness_mode: FitnessMode = Field(FitnessMode.NEG_DISTORTION, description="GA codebook fitness")

    group_count: int = Field(3, ge=1, description="Encoder groups")
    grouping_fitness_mode: FitnessMode = Field(FitnessMode.SIMILARITY, description="Group leader fitness")

    hmm_n_states: int = Field(5, ge=1, description="DHMM states")
    hmm_max_iters: int = Field(20, ge=0, description="Baum-Welch iterations")
    hmm_tol: float = Field(1e-4, ge=0.0, description="Baum-Welch stopping improvement")
    hmm_topology: HmmTopology = Field(HmmTopology.LEFT_TO_RIGHT, description="DHMM initial topology")
    hmm_emission_floor: float = Field(1e-8, gt=0.0, lt=1.0, description="DHMM emission floor")

    search_mode: SearchMode = Field(SearchMode.GROUPED, description="Identification search")
    noise_random_offset: bool = Field(False, description="Seeded random noise segment instead of the leading one")
    exclude_failed: bool = Field(False, description="Drop failed utterances instead of scoring them wrong")
    eval_methods: List[FeatureMethod] = Field(
        default_factory=lambda: [FeatureMethod(m) for m in TABLE_METHODS],
        description="Feature methods evaluated",
    )
    manifest_path: Optional[str] = Field(None, description="Corpus manifest JSON")
    output_dir: Optional[str] = Field(None, description="Output directory")

    model_config = ConfigDict(frozen=True, extra="forbid")

    @field_validator("eval_methods", mode="before")
    def split_methods(cls, v):
        """
        Accept a comma-separated string as well as a list.

        Args:
            v: The raw value.

        Returns:
            list: Method tags.
        """
        if isinstance(v, str):
            return [item.strip() for item in v.split(",") if item.strip()]
        return v

    @model_validator(mode="after")
    def check_consistency(self) -> "RunConfig":
        if not self.eval_methods:
            raise ValueError("eval_methods must not be empty")
        if self.ga_elitism_count > self.ga_population_size:
            raise ValueError("ga_elitism_count cannot exceed ga_population_size")
        if self.mfcc_fmax_hz is not None and self.mfcc_fmax_hz <= self.mfcc_fmin_hz:
            raise ValueError("mfcc_fmax_hz must exceed mfcc_fmin_hz")
        return self

    def wiener_config(self) -> WienerConfig:
        return WienerConfig(
            frame_len=self.wiener_frame_len,
            noise_estimate_frames=self.wiener_noise_estimate_frames,
            smoothing_alpha=self.wiener_smoothing_alpha,
            gain_floor=self.wiener_gain_floor,
        )

    def endpoint_config(self) -> EndpointConfig:
        return EndpointConfig(
            energy_floor_db=self.endpoint_energy_floor_db,
            threshold_offset_db=self.endpoint_threshold_offset_db,
            min_speech_frames=self.endpoint_min_speech_frames,
            min_silence_frames=self.endpoint_min_silence_frames,
        )

    def framing_config(self) -> FramingConfig:
        return FramingConfig(
            pre_emphasis_alpha=self.pre_emphasis_alpha,
            frame_ms=self.frame_ms,
            overlap_fraction=self.overlap_fraction,
        )

    def mfcc_config(self) -> MfccConfig:
        return MfccConfig(
            n_fft=self.mfcc_n_fft,
            n_filters=self.mfcc_n_filters,
            n_ceps=self.mfcc_n_ceps,
            fmin_hz=self.mfcc_fmin_hz,
            fmax_hz=self.mfcc_fmax_hz,
            include_c0=self.mfcc_include_c0,
        )

    def feature_config(self) -> FeatureConfig:
        return FeatureConfig(
            lpc_order=self.lpc_order,
            lpcc_n_ceps=self.lpcc_n_ceps,
            rcc_n_ceps=self.rcc_n_ceps,
            rcc_n_fft=self.rcc_n_fft,
            mfcc=self.mfcc_config(),
            delta_window=self.delta_window,
            delta_mode=self.delta_mode,
        )

    def ga_config(self, seed: int, fitness_mode: Optional[FitnessMode] = None) -> GAConfig:
        return GAConfig(
            population_size=self.ga_population_size,
            generations=self.ga_generations,
            crossover_points=self.ga_crossover_points,
            mutation_prob=self.ga_mutation_prob,
            elitism_count=self.ga_elitism_count,
            seed=seed,
            fitness_mode=fitness_mode or self.ga_fitness_mode,
        )

    def lbg_config(self, seed: int) -> LBGConfig:
        return LBGConfig(epsilon=self.lbg_epsilon, max_iters=self.lbg_max_iters, seed=seed)

    def hmm_config(self, seed: int) -> HmmConfig:
        return HmmConfig(
            n_states=self.hmm_n_states,
            max_iters=self.hmm_max_iters,
            tol=self.hmm_tol,
            topology=self.hmm_topology,
            emission_floor=self.hmm_emission_floor,
            seed=seed,
        )
