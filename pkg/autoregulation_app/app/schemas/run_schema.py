from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing import Optional, Tuple
from pathlib import Path
import enum

class OutputFormat(str, enum.Enum):
    JSON = "json"
    CSV = "csv"
    TABLE = "table"

class RunConfig(BaseModel):
    """
    Validated global parameters of one command run.
    Built from the command-line flags with settings as fallback, before any computation starts.
    """
    model_config = ConfigDict(frozen=True)

    seed: int = Field(ge=0)
    out: Optional[Path] = None # None writes to stdout
    output_format: OutputFormat = OutputFormat.JSON
    fs: Optional[float] = Field(default=None, gt=0) # Overrides the sampling frequency inferred from CSV
    crcp: float = 0.0
    baseline_window: Tuple[float, float] = (0.0, 5.0)

    @model_validator(mode='after')
    def validate_window(self):
        start, end = self.baseline_window
        if start < 0 or end <= start:
            raise ValueError('Baseline window must satisfy 0 <= start < end')
        return self
