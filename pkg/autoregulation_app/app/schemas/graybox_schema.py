from pydantic import BaseModel, ConfigDict, Field, field_validator, field_serializer, model_validator
from typing import Any, Literal, Optional, Tuple
import numpy as np
import math

GRAYBOX_VERSION = "graybox-v1"

class GrayBoxConfig(BaseModel):
    """
    Gray-box hyperparameters.
        Args:
        - hidden_width (int): Units in the single tanh hidden layer
        - learning_rate (float): Full-batch gradient descent step (0 freezes the model)
        - epochs (int): Number of gradient steps
        - seed (int): Initialization seed
        - init_scale (float, optional): Half-width of the uniform init; defaults to 1/sqrt(fan_in) per layer
        - window (int): Pressure window length, always 7
    """
    model_config = ConfigDict(frozen=True)

    hidden_width: int = Field(default=8, gt=0)
    learning_rate: float = Field(default=0.01, ge=0)
    epochs: int = Field(default=2000, ge=0)
    seed: int = Field(default=0, ge=0)
    init_scale: Optional[float] = Field(default=None, gt=0)
    window: Literal[7] = 7

class NormStats(BaseModel):
    """Standardization statistics of the pressure input of the empirical network."""
    model_config = ConfigDict(frozen=True)

    mean: float = 0.0
    std: float = Field(default=1.0, gt=0)

def _as_readonly(v: Any) -> np.ndarray:
    arr = np.array(v, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError('Model parameters must be finite')
    arr.setflags(write=False)
    return arr

class GrayBoxModel(BaseModel):
    """
    Empirical subnetwork parameters plus input statistics.

    The phenomenological stage (the 7-tap inner product) has no stored
    parameters, so it cannot appear here and cannot be changed by training.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    version: Literal["graybox-v1"] = GRAYBOX_VERSION
    config: GrayBoxConfig
    norm_stats: NormStats = NormStats()
    W1: np.ndarray # hidden_width x 7
    b1: np.ndarray # hidden_width
    W2: np.ndarray # 7 x hidden_width
    b2: np.ndarray # 7

    @field_validator('W1', 'b1', 'W2', 'b2', mode='before')
    def coerce_parameters(cls, v):
        return _as_readonly(v)

    @field_serializer('W1', 'b1', 'W2', 'b2')
    def serialize_parameters(self, v: np.ndarray):
        return v.tolist()

    @model_validator(mode='after')
    def validate_shapes(self):
        h, w = self.config.hidden_width, self.config.window
        expected = {'W1': (h, w), 'b1': (h,), 'W2': (w, h), 'b2': (w,)}
        for name, shape in expected.items():
            if getattr(self, name).shape != shape:
                raise ValueError(f'{name} must have shape {shape}')
        return self

    def parameters(self) -> dict:
        return {'W1': self.W1, 'b1': self.b1, 'W2': self.W2, 'b2': self.b2}

    def with_parameters(self, **params) -> "GrayBoxModel":
        return self.model_copy(update={k: _as_readonly(v) for k, v in params.items()})

class TrainingTrace(BaseModel):
    """Per-epoch mean squared velocity error and the loss of the returned model."""
    model_config = ConfigDict(frozen=True)

    losses: Tuple[float, ...]
    final_loss: float

    @model_validator(mode='after')
    def validate_finite(self):
        if not all(math.isfinite(x) for x in self.losses) or not math.isfinite(self.final_loss):
            raise ValueError('Losses must be finite')
        return self

class GrayBoxCoefficients(BaseModel):
    """Per-window coefficient vectors (one row per window) and their element-wise mean."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    per_window: np.ndarray # n_windows x 7
    summary: Tuple[float, ...]

    @field_serializer('per_window')
    def serialize_windows(self, v: np.ndarray):
        return v.tolist()
