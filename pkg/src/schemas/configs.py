"""
This module contains the per-stage configuration models consumed by the pipeline operations.

DTOs:
    - WienerConfig: Free parameters of the STFT Wiener filter.
    - EndpointConfig: Energy endpoint detector thresholds.
    - FramingConfig: Pre-emphasis and frame blocking.
    - MfccConfig: Mel filterbank and cepstrum sizes.
    - FeatureConfig: Extractor menu settings (orders, sizes, deltas).
    - GAConfig: Genetic-algorithm codebook trainer.
    - LBGConfig: Splitting LBG trainer.
    - HmmConfig: Discrete HMM training.
"""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from models.tags import DeltaMode, FitnessMode, HmmTopology


class WienerConfig(BaseModel):
    """
    Wiener filter parameters.

    Attributes:
        - frame_len: STFT frame length in samples.
        - noise_estimate_frames: Leading frames assumed to hold noise only.
        - smoothing_alpha: Decision-directed smoothing of the a-priori SNR.
        - gain_floor: Lower clamp of the spectral gain.
    """

    frame_len: int = Field(256, ge=8, description="STFT frame length in samples")
    noise_estimate_frames: int = Field(6, ge=1, description="Leading frames assumed noise-only")
    smoothing_alpha: float = Field(0.98, ge=0.0, lt=1.0, description="Decision-directed smoothing factor")
    gain_floor: float = Field(0.1, gt=0.0, lt=1.0, description="Minimum spectral gain")

    model_config = ConfigDict(frozen=True, extra="forbid")


class EndpointConfig(BaseModel):
    """
    Energy endpoint detector parameters.

    Attributes:
        - energy_floor_db: Upper bound on the estimated noise floor.
        - threshold_offset_db: Speech threshold above the noise floor.
        - min_speech_frames: Shortest run kept as speech.
        - min_silence_frames: Shortest gap kept as silence.
    """

    energy_floor_db: float = Field(-20.0, description="Upper bound of the estimated noise floor (dB)")
    threshold_offset_db: float = Field(10.0, gt=0.0, description="Threshold above the noise floor (dB)")
    min_speech_frames: int = Field(5, ge=1, description="Shortest speech run in frames")
    min_silence_frames: int = Field(10, ge=1, description="Shortest silence gap in frames")

    model_config = ConfigDict(frozen=True, extra="forbid")


class FramingConfig(BaseModel):
    pre_emphasis_alpha: float = Field(0.97, description="Pre-emphasis coefficient in [0, 1]")
    frame_ms: float = Field(23.22, description="Frame length in milliseconds, 10 to 30")
    overlap_fraction: float = Field(0.5, description="Frame overlap fraction, 0.25 to 0.75")

    model_config = ConfigDict(frozen=True, extra="forbid")


class MfccConfig(BaseModel):
    """
    Mel-cepstrum parameters.

    Range checks that depend on the signal (n_fft against frame length, fmax against
    Nyquist) happen when the filterbank is built.
    """

    n_fft: int = Field(512, ge=2, description="FFT size")
    n_filters: int = Field(26, ge=1, description="Number of triangular mel filters")
    n_ceps: int = Field(12, ge=1, description="Number of cepstral coefficients kept")
    fmin_hz: float = Field(0.0, ge=0.0, description="Lowest filter edge (Hz)")
    fmax_hz: Optional[float] = Field(None, description="Highest filter edge (Hz); Nyquist when null")
    include_c0: bool = Field(False, description="Keep the 0th cepstral coefficient")

    model_config = ConfigDict(frozen=True, extra="forbid")


class FeatureConfig(BaseModel):
    lpc_order: int = Field(12, ge=1)
    lpcc_n_ceps: int = Field(12, ge=1)
    rcc_n_ceps: int = Field(12, ge=1)
    rcc_n_fft: int = Field(512, ge=2)
    mfcc: MfccConfig = Field(default_factory=MfccConfig)
    delta_window: int = Field(2, ge=1)
    delta_mode: DeltaMode = DeltaMode.STANDALONE

    model_config = ConfigDict(frozen=True, extra="forbid")


class GAConfig(BaseModel):
    """
    Genetic-algorithm trainer parameters.

    Attributes:
        - population_size: Chromosomes per generation.
        - generations: Generations evolved after the initial population.
        - crossover_points: Cut points of the k-point crossover.
        - mutation_prob: Per-gene resampling probability.
        - elitism_count: Best chromosomes copied unchanged into the next generation.
        - seed: Seed of the trainer's random stream.
        - fitness_mode: Objective maximized by the trainer.
    """

    population_size: int = Field(30, ge=2, description="Chromosomes per generation")
    generations: int = Field(5, ge=0, description="Number of generations")
    crossover_points: int = Field(5, ge=1, description="Number of crossover cut points")
    mutation_prob: float = Field(0.05, ge=0.0, le=1.0, description="Per-gene mutation probability")
    elitism_count: int = Field(2, ge=1, description="Chromosomes carried over unchanged")
    seed: int = Field(0, ge=0, description="Random seed")
    fitness_mode: FitnessMode = Field(FitnessMode.NEG_DISTORTION, description="Fitness reading")

    model_config = ConfigDict(frozen=True, extra="forbid")

    @model_validator(mode="after")
    def check_elitism(self) -> "GAConfig":
        if self.elitism_count > self.population_size:
            raise ValueError("elitism_count cannot exceed population_size")
        return self


class LBGConfig(BaseModel):
    epsilon: float = Field(0.01, gt=0.0, description="Relative split perturbation")
    max_iters: int = Field(100, ge=1, description="Lloyd iterations per codebook size")
    tol: float = Field(1e-6, ge=0.0, description="Relative distortion improvement that stops Lloyd refinement")
    seed: int = Field(0, ge=0, description="Recorded for provenance; LBG is deterministic")

    model_config = ConfigDict(frozen=True, extra="forbid")


class HmmConfig(BaseModel):
    n_states: int = Field(5, ge=1, description="Hidden states per speaker model")
    max_iters: int = Field(20, ge=0, description="Baum-Welch iterations")
    tol: float = Field(1e-4, ge=0.0, description="Log-likelihood improvement that stops training")
    topology: HmmTopology = Field(HmmTopology.LEFT_TO_RIGHT, description="Initial transition structure")
    emission_floor: float = Field(1e-8, gt=0.0, lt=1.0, description="Minimum emission probability")
    seed: int = Field(0, ge=0, description="Seed of the initial perturbation")

    model_config = ConfigDict(frozen=True, extra="forbid")
