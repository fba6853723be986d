"""
This module contains the evaluation report DTOs.

DTOs:
    - RateCell: Identification rate of one (noise, snr, method) condition.
    - NoiseAverage: Mean rate of one (noise, method) over its SNRs.
    - MethodAverage: Grand mean rate of one method over noises.
    - EvalReport: Cells, derived averages and run metadata.
    - CurvePoint / Curve: Sweep results.
"""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from models.tags import FeatureMethod


class RateCell(BaseModel):
    noise_name: str = Field(..., description="Noise condition")
    snr_db: float = Field(..., description="Mixing SNR (dB)")
    method: FeatureMethod = Field(..., description="Feature method")
    rate: float = Field(..., ge=0.0, le=100.0, description="Identification rate (%)")
    correct: int = Field(0, ge=0, description="Correctly identified probes")
    total: int = Field(0, ge=0, description="Scored probes")
    failed: int = Field(0, ge=0, description="Probes whose processing failed")

    model_config = ConfigDict(frozen=True)


class NoiseAverage(BaseModel):
    noise_name: str
    method: FeatureMethod
    rate: float

    model_config = ConfigDict(frozen=True)


class MethodAverage(BaseModel):
    method: FeatureMethod
    rate: float

    model_config = ConfigDict(frozen=True)


class EvalReport(BaseModel):
    """
    Data Transfer Object for an evaluation run.

    Attributes:
        - cells: One rate per (noise, snr, method) condition.
        - noise_averages: Per-noise means over SNRs, filled by average_rates.
        - method_averages: Per-method means of the per-noise averages, filled by average_rates.
        - run_meta: Full configuration and seeds of the run.
    """

    cells: List[RateCell] = Field(default_factory=list)
    noise_averages: List[NoiseAverage] = Field(default_factory=list)
    method_averages: List[MethodAverage] = Field(default_factory=list)
    run_meta: Dict[str, Any] = Field(default_factory=dict)

    model_config = ConfigDict(frozen=True)

    @property
    def has_averages(self) -> bool:
        return bool(self.noise_averages) and bool(self.method_averages)

    def methods(self) -> List[FeatureMethod]:
        seen: List[FeatureMethod] = []
        for cell in self.cells:
            if cell.method not in seen:
                seen.append(cell.method)
        return seen

    def noises(self) -> List[str]:
        seen: List[str] = []
        for cell in self.cells:
            if cell.noise_name not in seen:
                seen.append(cell.noise_name)
        return seen

    def snrs(self) -> List[float]:
        """Distinct SNRs, highest first (table row order)."""
        return sorted({cell.snr_db for cell in self.cells}, reverse=True)

    def cell(self, noise_name: str, snr_db: float, method: FeatureMethod) -> Optional[RateCell]:
        for cell in self.cells:
            if cell.noise_name == noise_name and cell.snr_db == snr_db and cell.method == method:
                return cell
        return None

    def noise_average(self, noise_name: str, method: FeatureMethod) -> Optional[float]:
        for average in self.noise_averages:
            if average.noise_name == noise_name and average.method == method:
                return average.rate
        return None

    def method_average(self, method: FeatureMethod) -> Optional[float]:
        for average in self.method_averages:
            if average.method == method:
                return average.rate
        return None


class CurvePoint(BaseModel):
    x: int = Field(..., description="Swept parameter value")
    rate: float = Field(..., ge=0.0, le=100.0, description="Mean identification rate (%)")

    model_config = ConfigDict(frozen=True)


class Curve(BaseModel):
    param: str = Field(..., description="crossover or generations")
    method: FeatureMethod
    points: List[CurvePoint] = Field(default_factory=list)

    model_config = ConfigDict(frozen=True)
