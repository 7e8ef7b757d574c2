import os
import sys
from pathlib import Path

# File logging off before any app module creates its handlers
os.environ.setdefault("AUTOREG_LOG_TO_FILE", "false")
sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "app"))

import numpy as np
import pytest
from click.testing import CliRunner
from config import get_settings
from analysis.aaslid_tiecks import generate_templates
from analysis.datagen import synth_pressure
from analysis.signal import normalize_pressure
from schemas.datagen_schema import SynthSpec
from schemas.signal_schema import NormalizationParams, SampledSignal

@pytest.fixture(autouse=True)
def fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()

@pytest.fixture
def step_dP() -> SampledSignal:
    """Default synthetic step (100 -> 80 mmHg at 5 s, 60 s at 10 Hz) as dP."""
    return normalize_pressure(synth_pressure(SynthSpec()), NormalizationParams(p_base=100.0))

@pytest.fixture
def step_templates(step_dP):
    return generate_templates(step_dP)

@pytest.fixture
def rng():
    return np.random.default_rng(1234)

@pytest.fixture
def runner():
    return CliRunner()
