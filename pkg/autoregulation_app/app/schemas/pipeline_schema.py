from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing import Annotated, List, Literal, Union
from schemas.classifier_schema import StateChangeReport
from schemas.fir_schema import FirCoefficients
from schemas.graybox_schema import GrayBoxModel

class MeasuredVelocityEstimator(BaseModel):
    """Use the recorded CBFV, normalized by its baseline mean."""
    model_config = ConfigDict(frozen=True)
    kind: Literal["measured_velocity"] = "measured_velocity"

class FirEstimator(BaseModel):
    """Estimate the velocity change from pressure with fixed 7-tap coefficients."""
    model_config = ConfigDict(frozen=True)
    kind: Literal["fir"] = "fir"
    h: FirCoefficients

class GrayBoxEstimator(BaseModel):
    """Estimate the velocity change with a trained gray-box model."""
    model_config = ConfigDict(frozen=True)
    kind: Literal["graybox"] = "graybox"
    model: GrayBoxModel

EstimatorChoice = Annotated[
    Union[MeasuredVelocityEstimator, FirEstimator, GrayBoxEstimator],
    Field(discriminator="kind")
]

class CohortSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    subjects: int
    exceeds_limit: int
    anomalous_increase: int

class CohortReport(BaseModel):
    """Normocapnia/hypercapnia comparison over a cohort, one row per subject"""
    model_config = ConfigDict(frozen=True)

    rows: List[StateChangeReport] = []
    summary: CohortSummary

    @model_validator(mode='after')
    def validate_summary(self):
        if self.summary != tally(self.rows):
            raise ValueError('Summary counts must match the rows')
        return self

    @classmethod
    def from_rows(cls, rows: List[StateChangeReport]) -> "CohortReport":
        return cls(rows=list(rows), summary=tally(rows))

def tally(rows: List[StateChangeReport]) -> CohortSummary:
    return CohortSummary(
        subjects=len(rows),
        exceeds_limit=sum(1 for row in rows if row.exceeds_limit),
        anomalous_increase=sum(1 for row in rows if row.anomalous_increase)
    )
