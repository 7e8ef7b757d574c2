from pydantic_settings import BaseSettings, SettingsConfigDict
from functools import lru_cache
from typing import Tuple

class Settings(BaseSettings):
    """
    Settings for the Autoregulation Index Toolkit.

    Please do not modify this file directly.
    Instead, create a .env file in the directory you run the toolkit from
    and specify the settings you would like to change there.
    Every setting can also be given as an environment variable with the
    AUTOREG_ prefix, for example:
    - AUTOREG_SEED=42
    - AUTOREG_CRCP=12.5
    - AUTOREG_LOG_TO_FILE=False

    Command-line flags always win over these values.

    SUMMARY:
    - Override settings (if needed) using a .env file or AUTOREG_* variables
    - AUTOREG_SEED is the seed fallback for every command that takes --seed
    """

    # Application settings
    app_name: str = "Autoregulation Index Toolkit"
    app_version: str = "0.1.0"

    # Logs settings
    logs_dir: str = "logs"
    log_to_file: bool = True # Set to False to only log to the console
    log_level: str = "INFO"

    # Reproducibility
    seed: int = 0

    # Signal settings
    crcp: float = 0.0 # Critical closing pressure in mmHg
    baseline_start: float = 0.0 # Baseline window start in seconds
    baseline_end: float = 5.0 # Baseline window end in seconds (exclusive)
    csv_significant_digits: int = 9

    # Gray-box settings
    hidden_width: int = 8
    learning_rate: float = 0.01
    epochs: int = 2000

    # FIR identification settings
    fir_ridge: float = 0.0

    # Load settings from .env file
    model_config = SettingsConfigDict(env_file=".env", env_prefix="AUTOREG_")

    @property
    def baseline_window(self) -> Tuple[float, float]:
        return (self.baseline_start, self.baseline_end)

@lru_cache() # Cache settings to avoid reading .env file multiple times
def get_settings():
    """
    Use this function to get the settings object.
    Tests clear the cache (get_settings.cache_clear()) after changing AUTOREG_* variables.
    """
    return Settings()
