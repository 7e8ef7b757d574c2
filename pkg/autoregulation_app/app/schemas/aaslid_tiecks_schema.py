from pydantic import BaseModel, ConfigDict, field_validator, model_validator
from typing import Iterable, Tuple
import math

class ATParameters(BaseModel):
    """
    Parameters of the second-order autoregulation model.
        Args:
        - K (float): Gain, 0 <= K <= 1
        - D (float): Damping factor, D > 0
        - T (float): Time constant in seconds, T > 0
    """
    model_config = ConfigDict(frozen=True)

    K: float
    D: float
    T: float

    @model_validator(mode='after')
    def validate_ranges(self):
        if not all(math.isfinite(v) for v in (self.K, self.D, self.T)):
            raise ValueError('Model parameters must be finite')
        if self.T <= 0:
            raise ValueError('Time constant T must be positive')
        if self.D <= 0:
            raise ValueError('Damping factor D must be positive')
        if self.K < 0 or self.K > 1:
            raise ValueError('Gain K must be between 0 and 1')
        return self

class ATState(BaseModel):
    """State variables x1, x2 of the second-order system."""
    model_config = ConfigDict(frozen=True)

    x1: float = 0.0
    x2: float = 0.0

    @model_validator(mode='after')
    def validate_finite(self):
        if not (math.isfinite(self.x1) and math.isfinite(self.x2)):
            raise ValueError('Model state diverged (non-finite value)')
        return self

class AriTemplateRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    ari: int
    params: ATParameters

# (K, D, T) per ARI 0..9
_STANDARD_ROWS: Tuple[Tuple[float, float, float], ...] = (
    (0.00, 1.70, 2.00),
    (0.20, 1.60, 2.00),
    (0.40, 1.50, 2.00),
    (0.60, 1.15, 2.00),
    (0.80, 0.90, 2.00),
    (0.90, 0.75, 1.90),
    (0.94, 0.65, 1.60),
    (0.96, 0.55, 1.20),
    (0.97, 0.52, 0.87),
    (0.98, 0.50, 0.65),
)

class AriTemplateTable(BaseModel):
    """
    The ten parameter rows that define the ARI scale, in ARI order 0..9.

    Use `AriTemplateTable.standard()` for the canonical scale. Anything else
    has to go through `AriTemplateTable.custom(rows)`.
    """
    model_config = ConfigDict(frozen=True)

    rows: Tuple[AriTemplateRow, ...]

    @field_validator('rows')
    def validate_rows(cls, v):
        if len(v) != 10:
            raise ValueError('An ARI table needs exactly 10 rows')
        if [row.ari for row in v] != list(range(10)):
            raise ValueError('ARI table rows must be ordered 0..9')
        return v

    @classmethod
    def standard(cls) -> "AriTemplateTable":
        return cls(rows=tuple(
            AriTemplateRow(ari=ari, params=ATParameters(K=k, D=d, T=t))
            for ari, (k, d, t) in enumerate(_STANDARD_ROWS)
        ))

    @classmethod
    def custom(cls, params: Iterable[ATParameters]) -> "AriTemplateTable":
        """Advanced constructor: ten user-supplied parameter sets, in ARI order."""
        return cls(rows=tuple(AriTemplateRow(ari=ari, params=p) for ari, p in enumerate(params)))

    def params(self, ari: int) -> ATParameters:
        return self.rows[ari].params
