"""
Serial gray-box velocity estimator.

The empirical part is a one-hidden-layer tanh network that maps a standardized
7-sample pressure window to 7 coefficients. The phenomenological part is the
7-tap relation itself: the coefficients are applied to the (unstandardized)
normalized-pressure window,

    coeffs = W2 tanh(W1 x + b1) + b2          x = (window - mean) / std
    v_hat  = sum_k coeffs[k] * p(i - k)

Training is indirect: the squared error is measured at v_hat and propagated
back through the inner product into W1, b1, W2, b2. The inner product has no
parameters, so nothing in it can be changed by the optimizer.

Signals follow the estimator convention of the pipeline: input dP (rest 0),
target the normalized velocity change v / v_base - 1 (rest 0).
"""
from typing import Dict, Iterable, Optional, Sequence, Tuple
import json
import math
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from errors import FileFormatError, SignalError, TrainingDivergenceError
from logger import logger
from schemas.graybox_schema import GrayBoxCoefficients, GrayBoxConfig, GrayBoxModel, NormStats, TrainingTrace
from schemas.signal_schema import SampledSignal

WINDOW = 7
FD_STEP = 1e-6

##############################
### INITIALIZATION & STATS ###
##############################

def fit_norm_stats(abp: SampledSignal) -> NormStats:
    """Mean/std of the pressure input; a constant signal keeps unit std."""
    if np.ptp(abp.samples) == 0:
        return NormStats(mean=float(abp.samples[0]), std=1.0)
    return NormStats(mean=float(np.mean(abp.samples)), std=float(np.std(abp.samples)))

def gb_init(config: GrayBoxConfig, abp: Optional[SampledSignal] = None) -> GrayBoxModel:
    """
    Seeded uniform initialization on [-scale, +scale].

    The scale is config.init_scale when given, else 1/sqrt(fan_in) per layer
    (1/sqrt(7) for W1/b1, 1/sqrt(hidden_width) for W2/b2). When a training
    pressure signal is supplied its standardization statistics are stored on
    the model, so that training itself never has to touch them.
    """
    rng = np.random.default_rng(config.seed)
    h = config.hidden_width
    s1 = config.init_scale or 1.0 / math.sqrt(WINDOW)
    s2 = config.init_scale or 1.0 / math.sqrt(h)
    return GrayBoxModel(
        config=config,
        norm_stats=fit_norm_stats(abp) if abp is not None else NormStats(),
        W1=rng.uniform(-s1, s1, (h, WINDOW)),
        b1=rng.uniform(-s1, s1, h),
        W2=rng.uniform(-s2, s2, (WINDOW, h)),
        b2=rng.uniform(-s2, s2, WINDOW)
    )

#####################
### FORWARD PASS ###
#####################

def _windows(p: SampledSignal) -> np.ndarray:
    if len(p) < WINDOW:
        raise SignalError(f"Gray-box model needs at least {WINDOW} samples, got {len(p)}")
    return sliding_window_view(p.samples, WINDOW)

def _forward(params: Dict[str, np.ndarray], stats: NormStats, windows: np.ndarray):
    """Batch forward pass; windows are chronological (oldest sample first)."""
    x = (windows - stats.mean) / stats.std
    hidden = np.tanh(x @ params['W1'].T + params['b1'])
    coeffs = hidden @ params['W2'].T + params['b2']
    lagged = windows[:, ::-1] # column k holds p(i - k)
    v_hat = np.sum(coeffs * lagged, axis=1)
    return x, hidden, coeffs, lagged, v_hat

def gb_forward(model: GrayBoxModel, p_window: Sequence[float]) -> Tuple[np.ndarray, float]:
    """Coefficients and velocity estimate for one chronological 7-sample window."""
    window = np.asarray(p_window, dtype=np.float64).reshape(1, WINDOW)
    if not np.all(np.isfinite(window)):
        raise SignalError("Pressure window must be finite")
    _, _, coeffs, _, v_hat = _forward(model.parameters(), model.norm_stats, window)
    return coeffs[0], float(v_hat[0])

def gb_predict(model: GrayBoxModel, dP: SampledSignal) -> SampledSignal:
    """Velocity-change estimate for every full window; length len(dP) - 6."""
    _, _, _, _, v_hat = _forward(model.parameters(), model.norm_stats, _windows(dP))
    return dP.derive(v_hat, label="graybox")

def gb_coefficients(model: GrayBoxModel, abp: SampledSignal) -> GrayBoxCoefficients:
    """Coefficient vector per window plus the subject summary (mean over windows)."""
    _, _, coeffs, _, _ = _forward(model.parameters(), model.norm_stats, _windows(abp))
    return GrayBoxCoefficients(per_window=coeffs, summary=tuple(float(c) for c in coeffs.mean(axis=0)))

################
### TRAINING ###
################

def _training_data(abp: SampledSignal, cbfv: SampledSignal) -> Tuple[np.ndarray, np.ndarray]:
    if len(abp) != len(cbfv):
        raise SignalError(f"Pressure and velocity lengths differ ({len(abp)} vs {len(cbfv)})")
    if len(abp) < 2 * WINDOW:
        raise SignalError(f"Gray-box training needs at least {2 * WINDOW} samples, got {len(abp)}")
    return _windows(abp), cbfv.samples[WINDOW - 1:]

def _loss(params: Dict[str, np.ndarray], stats: NormStats, windows: np.ndarray, targets: np.ndarray) -> float:
    *_, v_hat = _forward(params, stats, windows)
    return float(np.mean((v_hat - targets) ** 2))

def _loss_and_gradients(params: Dict[str, np.ndarray], stats: NormStats, windows: np.ndarray, targets: np.ndarray):
    x, hidden, coeffs, lagged, v_hat = _forward(params, stats, windows)
    err = v_hat - targets
    loss = float(np.mean(err ** 2))

    # Back through the fixed inner product into the coefficient outputs
    d_vhat = 2.0 * err / err.size
    d_coeffs = d_vhat[:, None] * lagged
    d_hidden = d_coeffs @ params['W2']
    d_pre = d_hidden * (1.0 - hidden ** 2)
    grads = {
        'W1': d_pre.T @ x,
        'b1': d_pre.sum(axis=0),
        'W2': d_coeffs.T @ hidden,
        'b2': d_coeffs.sum(axis=0)
    }
    return loss, grads

def gb_gradients(model: GrayBoxModel, abp: SampledSignal, cbfv: SampledSignal) -> Tuple[float, Dict[str, np.ndarray]]:
    """Loss and analytic gradients with respect to the empirical parameters."""
    windows, targets = _training_data(abp, cbfv)
    return _loss_and_gradients(model.parameters(), model.norm_stats, windows, targets)

def _descend(model: GrayBoxModel, windows: np.ndarray, targets: np.ndarray, config: GrayBoxConfig) -> Tuple[GrayBoxModel, TrainingTrace]:
    params = {name: value.copy() for name, value in model.parameters().items()}
    stats = model.norm_stats
    losses = []
    for epoch in range(config.epochs):
        loss, grads = _loss_and_gradients(params, stats, windows, targets)
        if not math.isfinite(loss):
            logger.error(f"Gray-box training diverged at epoch {epoch}")
            raise TrainingDivergenceError(f"Training diverged: non-finite loss at epoch {epoch}", epoch)
        losses.append(loss)
        for name in params:
            params[name] -= config.learning_rate * grads[name]
        if epoch % 500 == 0:
            logger.debug(f"epoch {epoch}: loss {loss:.6e}")

    final_loss = _loss(params, stats, windows, targets)
    if not math.isfinite(final_loss):
        raise TrainingDivergenceError(f"Training diverged: non-finite loss at epoch {config.epochs}", config.epochs)
    logger.info(f"Gray-box training finished: {config.epochs} epochs, loss {losses[0] if losses else final_loss:.6e} -> {final_loss:.6e}")
    return model.with_parameters(**params), TrainingTrace(losses=tuple(losses), final_loss=final_loss)

def gb_train(model: GrayBoxModel, abp: SampledSignal, cbfv: SampledSignal, config: GrayBoxConfig) -> Tuple[GrayBoxModel, TrainingTrace]:
    """
    Full-batch gradient descent on the mean squared velocity error.

    Args:
    - model (GrayBoxModel): Starting point (see gb_init)
    - abp (SampledSignal): Normalized pressure dP
    - cbfv (SampledSignal): Normalized velocity change, same length as abp (>= 14 samples)
    - config (GrayBoxConfig): learning_rate and epochs are read from here

    Returns:
    - (GrayBoxModel, TrainingTrace): Trained copy (only W1, b1, W2, b2 differ) and the loss curve

    Raises:
    - TrainingDivergenceError: Loss became non-finite; the error names the epoch
    """
    windows, targets = _training_data(abp, cbfv)
    return _descend(model, windows, targets, config)

def gb_train_pooled(model: GrayBoxModel, pairs: Iterable[Tuple[SampledSignal, SampledSignal]], config: GrayBoxConfig) -> Tuple[GrayBoxModel, TrainingTrace]:
    """One model for many subjects; windows never straddle two recordings."""
    data = [_training_data(abp, cbfv) for abp, cbfv in pairs]
    if not data:
        raise SignalError("Pooled training needs at least one recording")
    windows = np.vstack([d[0] for d in data])
    targets = np.concatenate([d[1] for d in data])
    return _descend(model, windows, targets, config)

##########################
### GRADIENT CHECKING ###
##########################

def gb_gradient_check(model: GrayBoxModel, abp: SampledSignal, cbfv: SampledSignal, step: float = FD_STEP) -> float:
    """
    Maximum relative error between analytic and central-difference gradients
    over every empirical parameter. Relative error uses the denominator
    max(|analytic|, |numeric|, 1e-12).
    """
    windows, targets = _training_data(abp, cbfv)
    _, analytic = _loss_and_gradients(model.parameters(), model.norm_stats, windows, targets)

    # Differences are evaluated in extended precision so rounding stays below the step
    wide = {name: value.astype(np.longdouble) for name, value in model.parameters().items()}
    w_windows = windows.astype(np.longdouble)
    w_targets = targets.astype(np.longdouble)
    stats = model.norm_stats

    def wide_loss() -> np.longdouble:
        *_, v_hat = _forward(wide, stats, w_windows)
        return np.mean((v_hat - w_targets) ** 2)

    max_rel = 0.0
    for name, values in wide.items():
        for idx in np.ndindex(values.shape):
            original = values[idx]
            values[idx] = original + step
            plus = wide_loss()
            values[idx] = original - step
            minus = wide_loss()
            values[idx] = original
            numeric = float((plus - minus) / (2 * step))
            a = float(analytic[name][idx])
            rel = abs(a - numeric) / max(abs(a), abs(numeric), 1e-12)
            max_rel = max(max_rel, rel)
    return max_rel

#####################
### SERIALIZATION ###
#####################

def model_to_json(model: GrayBoxModel) -> str:
    return model.model_dump_json(indent=2)

def model_from_json(text: str) -> GrayBoxModel:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise FileFormatError(f"Gray-box model is not valid JSON: {e}")
    return GrayBoxModel.model_validate(data)
