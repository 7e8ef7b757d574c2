"""
Signal containers I/O and normalization.

Subject recordings travel as CSV files with the header `time,abp,cbfv`
(UTF-8, one row per sample, decimal point, no thousands separators). The
sampling frequency is inferred from the time column unless an override is
given. Pressure is normalized against a baseline window:

    dP(t) = (P(t) - P_base) / (P_base - CrCP)

Usage:
    from analysis.signal import load_subject_csv, baseline_mean, normalize_pressure

    with open("subject.csv", "rb") as f:
        record = load_subject_csv(f, "S01", CapnicState.NORMOCAPNIA)
    params = auto_normalization(record.abp, (0.0, 5.0))
    dP = normalize_pressure(record.abp, params)
"""
from typing import BinaryIO, Optional, TextIO, Tuple
from pydantic import ValidationError
import io
import math
import numpy as np
import pandas as pd
from config import get_settings
from errors import CsvFormatError, SignalError
from logger import logger
from schemas.signal_schema import CapnicState, NormalizationParams, SampledSignal, SubjectRecord

CSV_HEADER = "time,abp,cbfv"
CSV_COLUMNS = ["time", "abp", "cbfv"]
GRID_TOLERANCE = 1e-6 # Allowed relative jitter of the time step

def load_subject_csv(source: BinaryIO, subject_id: str, state: CapnicState, fs_override: Optional[float] = None) -> SubjectRecord:
    """
    Read one subject recording from a CSV byte stream.

    Args:
    - source (BinaryIO): Stream positioned at the header line
    - subject_id (str): Identifier stored on the record
    - state (CapnicState): Normocapnia or hypercapnia
    - fs_override (float, optional): Sampling frequency to use instead of the inferred one

    Returns:
    - SubjectRecord: ABP and CBFV on a common grid

    Raises:
    - CsvFormatError: Bad encoding or header, malformed rows, NaN fields, non-uniform time grid
    """
    try:
        text = source.read().decode("utf-8")
    except UnicodeDecodeError:
        raise CsvFormatError("CSV is not valid UTF-8")

    header = text.split("\n", 1)[0].rstrip("\r")
    if header != CSV_HEADER:
        raise CsvFormatError(f"Expected header '{CSV_HEADER}', got '{header}'")

    try:
        frame = pd.read_csv(io.StringIO(text), dtype=np.float64, float_precision="round_trip")
    except (pd.errors.ParserError, ValueError) as e:
        logger.error(f"Could not parse CSV for subject {subject_id}: {str(e)}")
        raise CsvFormatError(f"Malformed CSV: {str(e)}")

    if frame.empty:
        raise CsvFormatError("CSV contains no samples")
    if frame.isna().any().any():
        raise CsvFormatError("CSV contains empty or NaN fields")
    values = frame[CSV_COLUMNS].to_numpy()
    if not np.all(np.isfinite(values)):
        raise CsvFormatError("CSV contains non-finite values")

    fs = _sampling_frequency(values[:, 0], fs_override)
    return SubjectRecord(
        id=subject_id,
        state=state,
        abp=SampledSignal(samples=values[:, 1], fs=fs, label="abp"),
        cbfv=SampledSignal(samples=values[:, 2], fs=fs, label="cbfv")
    )

def _grid_tolerance(time: np.ndarray, step: float) -> float:
    """Allowed step jitter: relative tolerance, or the rounding of the CSV writer if larger."""
    t_max = float(np.max(np.abs(time)))
    digits = get_settings().csv_significant_digits
    rounding = 2.0 * 10.0 ** (math.floor(math.log10(t_max)) - digits + 1) if t_max > 0 else 0.0
    return max(GRID_TOLERANCE * step, rounding)

def _sampling_frequency(time: np.ndarray, fs_override: Optional[float]) -> float:
    if time.size < 2:
        if fs_override is None:
            raise CsvFormatError("At least two rows are needed to infer the sampling frequency")
        return fs_override

    steps = np.diff(time)
    step = float(np.median(steps))
    if step <= 0 or np.any(steps <= 0) or np.max(np.abs(steps - step)) > _grid_tolerance(time, step):
        raise CsvFormatError("non-uniform time grid")
    return fs_override if fs_override is not None else 1.0 / step

def save_subject_csv(record: SubjectRecord, sink: TextIO, significant_digits: Optional[int] = None) -> None:
    """Write a record in the time,abp,cbfv format (9 significant digits unless configured)."""
    digits = get_settings().csv_significant_digits if significant_digits is None else significant_digits
    frame = pd.DataFrame({
        "time": record.abp.times,
        "abp": record.abp.samples,
        "cbfv": record.cbfv.samples
    }, columns=CSV_COLUMNS)
    frame.to_csv(sink, index=False, float_format=f"%.{digits}g", lineterminator="\n")

def baseline_mean(signal: SampledSignal, window: Tuple[float, float]) -> float:
    """Mean of the samples whose timestamps fall in [start, end)."""
    start, end = window
    if end <= start:
        raise SignalError(f"Baseline window end ({end}) must be after its start ({start})")
    t = signal.times
    mask = (t >= start) & (t < end)
    if not mask.any():
        raise SignalError(f"empty baseline window [{start}, {end}) s")
    return float(np.mean(signal.samples[mask]))

def auto_normalization(abp: SampledSignal, window: Tuple[float, float], crcp: float = 0.0) -> NormalizationParams:
    """Normalization constants with the baseline taken from the window."""
    p_base = baseline_mean(abp, window)
    try:
        return NormalizationParams(p_base=p_base, crcp=crcp)
    except ValidationError:
        raise SignalError(f"Baseline pressure {p_base:.3f} mmHg does not exceed CrCP {crcp:.3f} mmHg")

def normalize_pressure(abp: SampledSignal, params: NormalizationParams) -> SampledSignal:
    """dP = (P - p_base) / (p_base - crcp); same length and fs as the input."""
    return abp.derive((abp.samples - params.p_base) / (params.p_base - params.crcp), label="dP")

def normalize_velocity(cbfv: SampledSignal, baseline: float) -> SampledSignal:
    """Velocity divided by its baseline so that the rest level is 1."""
    if not baseline > 0:
        raise SignalError(f"Velocity baseline must be positive, got {baseline}")
    return cbfv.derive(cbfv.samples / baseline, label="v")
