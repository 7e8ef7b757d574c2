from pydantic import BaseModel, ConfigDict, field_validator
from typing import Tuple
import numpy as np
import math

FIR_TAPS = 7

class FirCoefficients(BaseModel):
    """Impulse response h[0..6]; h[k] multiplies the pressure sample k steps in the past."""
    model_config = ConfigDict(frozen=True)

    h: Tuple[float, ...]

    @field_validator('h')
    def validate_taps(cls, v):
        if len(v) != FIR_TAPS:
            raise ValueError(f'Exactly {FIR_TAPS} coefficients are required')
        if not all(math.isfinite(x) for x in v):
            raise ValueError('Coefficients must be finite')
        return v

    def as_array(self) -> np.ndarray:
        return np.asarray(self.h, dtype=np.float64)
