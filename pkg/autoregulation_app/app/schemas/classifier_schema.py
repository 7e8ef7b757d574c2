from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing import Tuple
import enum

class FitMetric(str, enum.Enum):
    """How a velocity is compared to the template curves."""
    MSE = "mse"
    CORRELATION = "correlation"

class AriEstimate(BaseModel):
    """Result of template matching"""
    model_config = ConfigDict(frozen=True)

    ari: int = Field(ge=0, le=9)
    score: float # MSE value or Pearson correlation of the selected template
    per_template_scores: Tuple[float, ...]
    metric: FitMetric

    @field_validator('per_template_scores')
    def validate_scores(cls, v):
        if len(v) != 10:
            raise ValueError('Exactly 10 template scores are required')
        return v

    @model_validator(mode='after')
    def validate_selection(self):
        scores = self.per_template_scores
        best = min(scores) if self.metric == FitMetric.MSE else max(scores)
        # First optimal index wins: ties go to the lower ARI
        if self.ari != scores.index(best):
            raise ValueError('ARI must index the optimal template score')
        if self.score != best:
            raise ValueError('Score must equal the optimal template score')
        return self

class StateChangeReport(BaseModel):
    """
    Normocapnia vs hypercapnia comparison for one subject.
        Args:
        - delta (int): ari_hyper - ari_normo
        - exceeds_limit (bool): |delta| > 2
        - anomalous_increase (bool): delta > 0
    """
    model_config = ConfigDict(frozen=True)

    subject_id: str
    ari_normo: int = Field(ge=0, le=9)
    ari_hyper: int = Field(ge=0, le=9)
    delta: int
    exceeds_limit: bool
    anomalous_increase: bool

    @model_validator(mode='after')
    def validate_flags(self):
        if self.delta != self.ari_hyper - self.ari_normo:
            raise ValueError('delta must equal ari_hyper - ari_normo')
        if self.exceeds_limit != (abs(self.delta) > 2):
            raise ValueError('exceeds_limit must be |delta| > 2')
        if self.anomalous_increase != (self.delta > 0):
            raise ValueError('anomalous_increase must be delta > 0')
        return self
