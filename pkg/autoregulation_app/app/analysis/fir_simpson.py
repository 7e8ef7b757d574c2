"""
Seven-tap FIR relation between pressure and velocity:

    V(i) = h(0) p(i) + h(1) p(i-1) + ... + h(6) p(i-6)

Outputs exist only where a full window exists, so a signal of n samples yields
n - 6 predictions aligned with input samples 6..n-1. Identification is
(ridge-)regularized least squares solved through a QR factorization of the
windowed design matrix.
"""
from typing import Iterable, Tuple
import json
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from errors import FileFormatError, ParameterError, SignalError, SingularSystemError
from logger import logger
from schemas.fir_schema import FIR_TAPS, FirCoefficients
from schemas.signal_schema import SampledSignal

def lagged_windows(p: np.ndarray) -> np.ndarray:
    """Design matrix: row j holds p[j+6], p[j+5], ..., p[j] (column k = lag k)."""
    return sliding_window_view(p, FIR_TAPS)[:, ::-1]

def fir_predict(h: FirCoefficients, p: SampledSignal) -> SampledSignal:
    """Apply the filter; output length is len(p) - 6."""
    if len(p) < FIR_TAPS:
        raise SignalError(f"FIR prediction needs at least {FIR_TAPS} samples, got {len(p)}")
    return p.derive(lagged_windows(p.samples) @ h.as_array(), label="fir")

def _training_rows(p: SampledSignal, v: SampledSignal) -> Tuple[np.ndarray, np.ndarray]:
    if len(p) != len(v):
        raise SignalError(f"Pressure and velocity lengths differ ({len(p)} vs {len(v)})")
    if len(p) < 2 * FIR_TAPS:
        raise SignalError(f"FIR identification needs at least {2 * FIR_TAPS} samples, got {len(p)}")
    return lagged_windows(p.samples), v.samples[FIR_TAPS - 1:]

def _solve(X: np.ndarray, y: np.ndarray, ridge: float) -> FirCoefficients:
    if ridge < 0:
        raise ParameterError(f"Ridge must be non-negative, got {ridge}")
    if ridge == 0 and np.linalg.matrix_rank(X) < FIR_TAPS:
        raise SingularSystemError("singular system; supply ridge > 0")

    # Ridge as extra rows keeps the problem in least-squares form for QR
    if ridge > 0:
        X = np.vstack([X, np.sqrt(ridge) * np.eye(FIR_TAPS)])
        y = np.concatenate([y, np.zeros(FIR_TAPS)])
    Q, R = np.linalg.qr(X)
    h = np.linalg.solve(R, Q.T @ y)
    return FirCoefficients(h=tuple(float(x) for x in h))

def fir_fit(p: SampledSignal, v: SampledSignal, ridge: float = 0.0) -> FirCoefficients:
    """
    Least-squares taps for one pressure/velocity pair.

    Args:
    - p (SampledSignal): Filter input
    - v (SampledSignal): Filter output, same length as p (>= 14 samples)
    - ridge (float): Penalty on the squared taps

    Returns:
    - FirCoefficients: Minimizer of the windowed squared error plus ridge * |h|^2

    Raises:
    - SingularSystemError: Rank-deficient windows with ridge = 0
    """
    X, y = _training_rows(p, v)
    h = _solve(X, y, ridge)
    logger.info(f"Fitted FIR taps on {X.shape[0]} windows (ridge={ridge})")
    return h

def fir_fit_pooled(pairs: Iterable[Tuple[SampledSignal, SampledSignal]], ridge: float = 0.0) -> FirCoefficients:
    """Common taps for many subjects, fitted on their concatenated windows."""
    rows = [_training_rows(p, v) for p, v in pairs]
    if not rows:
        raise SignalError("Pooled FIR identification needs at least one pair")
    X = np.vstack([r[0] for r in rows])
    y = np.concatenate([r[1] for r in rows])
    h = _solve(X, y, ridge)
    logger.info(f"Fitted common FIR taps on {len(rows)} recordings, {X.shape[0]} windows (ridge={ridge})")
    return h

def fir_objective(h: FirCoefficients, p: SampledSignal, v: SampledSignal, ridge: float = 0.0) -> float:
    """Value of the identification objective for given taps."""
    X, y = _training_rows(p, v)
    coeffs = h.as_array()
    residual = y - X @ coeffs
    return float(residual @ residual + ridge * coeffs @ coeffs)

def coefficients_to_json(h: FirCoefficients) -> str:
    return json.dumps(list(h.h))

def coefficients_from_json(text: str) -> FirCoefficients:
    """Parse the bare array or the {"h": [...]} object form."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise FileFormatError(f"FIR coefficients are not valid JSON: {e}")
    if isinstance(data, dict):
        data = data.get("h")
    if not isinstance(data, list):
        raise FileFormatError("FIR coefficients must be a JSON array or an object with an \"h\" array")
    return FirCoefficients(h=tuple(data))

def coefficients_to_csv_row(h: FirCoefficients) -> str:
    return ",".join(repr(x) for x in h.h)

def coefficients_from_csv_row(line: str) -> FirCoefficients:
    return FirCoefficients(h=tuple(float(x) for x in line.strip().split(",")))
