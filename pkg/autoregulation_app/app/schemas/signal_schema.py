from pydantic import BaseModel, ConfigDict, field_validator, field_serializer, model_validator
from typing import Any, Optional
import numpy as np
import enum
import math

class CapnicState(str, enum.Enum):
    """
    Blood CO2 state a recording was taken in.

    Attributes:
        NORMOCAPNIA: Normal CO2 level (first phase of the protocol)
        HYPERCAPNIA: Elevated CO2 level after inhalation (second phase)
    """
    NORMOCAPNIA = "normocapnia"
    HYPERCAPNIA = "hypercapnia"

class SampledSignal(BaseModel):
    """
    Uniformly sampled real-valued time series.

    Samples are stored as a read-only float64 array. Units depend on the role of
    the signal: mmHg for ABP, cm/s for CBFV, dimensionless for normalized series.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    samples: np.ndarray
    fs: float # Sampling frequency in Hz
    label: str = ""

    @field_validator('samples', mode='before')
    def coerce_samples(cls, v: Any):
        arr = np.array(v, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError('Samples must be a non-empty one-dimensional sequence')
        if not np.all(np.isfinite(arr)):
            raise ValueError('Samples must be finite (no NaN/Inf)')
        arr.setflags(write=False)
        return arr

    @field_validator('fs')
    def validate_fs(cls, v):
        if not math.isfinite(v) or v <= 0:
            raise ValueError('Sampling frequency must be positive and finite')
        return v

    @field_serializer('samples')
    def serialize_samples(self, v: np.ndarray):
        return v.tolist()

    def __len__(self) -> int:
        return int(self.samples.size)

    @property
    def times(self) -> np.ndarray:
        """Sample timestamps in seconds, starting at 0."""
        return np.arange(self.samples.size) / self.fs

    @property
    def duration(self) -> float:
        return self.samples.size / self.fs

    def derive(self, samples, label: Optional[str] = None) -> "SampledSignal":
        """New signal on the same sampling grid."""
        return SampledSignal(samples=samples, fs=self.fs, label=self.label if label is None else label)

class SubjectRecord(BaseModel):
    """One recording of a subject: ABP (mmHg) and CBFV (cm/s) on a common grid."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    id: str
    state: CapnicState
    abp: SampledSignal
    cbfv: SampledSignal

    @model_validator(mode='after')
    def validate_alignment(self):
        if len(self.abp) != len(self.cbfv):
            raise ValueError('ABP and CBFV must have the same length')
        if self.abp.fs != self.cbfv.fs:
            raise ValueError('ABP and CBFV must share the sampling frequency')
        return self

class NormalizationParams(BaseModel):
    """
    Pressure normalization constants.
        Args:
        - p_base (float): Baseline pressure in mmHg
        - crcp (float): Critical closing pressure in mmHg
    """
    model_config = ConfigDict(frozen=True)

    p_base: float
    crcp: float = 0.0

    @model_validator(mode='after')
    def validate_denominator(self):
        if not (math.isfinite(self.p_base) and math.isfinite(self.crcp)):
            raise ValueError('Normalization constants must be finite')
        if self.p_base <= self.crcp:
            raise ValueError('Baseline pressure must exceed the critical closing pressure')
        return self
