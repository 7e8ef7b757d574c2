from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing import List, Optional
from schemas.signal_schema import CapnicState

class SynthSpec(BaseModel):
    """
    Synthetic subject description.
        Args:
        - fs (float): Sampling frequency in Hz
        - duration (float): Recording length in seconds
        - step_time (float): Time of the pressure drop in seconds
        - step_drop (float): Drop as a fraction of the baseline pressure
        - baseline_pressure (float): Resting ABP in mmHg
        - noise_sigma (float): Gaussian noise level, relative to the baseline of each signal
        - seed (int): Noise seed
        - true_ari (int): Planted autoregulation index
        - state (CapnicState): Label for the record
    """
    model_config = ConfigDict(frozen=True)

    fs: float = Field(default=10.0, gt=0)
    duration: float = Field(default=60.0, gt=0)
    step_time: float = 5.0
    step_drop: float = 0.2
    baseline_pressure: float = Field(default=100.0, gt=0)
    noise_sigma: float = Field(default=0.0, ge=0)
    seed: int = Field(default=0, ge=0)
    true_ari: int = Field(default=9, ge=0, le=9)
    state: CapnicState = CapnicState.NORMOCAPNIA

    @model_validator(mode='after')
    def validate_step(self):
        if not 0 < self.step_time < self.duration:
            raise ValueError('Step time must lie strictly inside the recording')
        if not 0 <= self.step_drop < 1:
            raise ValueError('Step drop must be in [0, 1)')
        return self

class CohortManifestEntry(BaseModel):
    """One planted record of a synthetic cohort"""
    model_config = ConfigDict(frozen=True)

    subject_id: str
    state: CapnicState
    planted_ari: int = Field(ge=0, le=9)
    seed: int = Field(ge=0)
    file: Optional[str] = None # CSV file name relative to the manifest

class CohortManifest(BaseModel):
    model_config = ConfigDict(frozen=True)

    seed: int
    noise_sigma: float = 0.0
    entries: List[CohortManifestEntry] = []
