"""
Template matching of a normalized velocity against the ten ARI curves.

MSE mode picks the template with the smallest mean squared error, correlation
mode the one with the largest Pearson correlation. Ties go to the lower ARI.
"""
from typing import Optional, Sequence, Tuple
import numpy as np
from errors import ClassificationError
from schemas.classifier_schema import AriEstimate, FitMetric, StateChangeReport
from schemas.signal_schema import SampledSignal

STATE_CHANGE_LIMIT = 2 # ARI units allowed between normocapnia and hypercapnia

def _validate_inputs(v_measured: SampledSignal, templates: Sequence[SampledSignal]) -> None:
    if len(templates) != 10:
        raise ClassificationError(f"Expected 10 templates, got {len(templates)}")
    if len(v_measured) < 2:
        raise ClassificationError("Velocity needs at least 2 samples")
    for k, template in enumerate(templates):
        if len(template) != len(v_measured):
            raise ClassificationError(f"Template {k} has {len(template)} samples, velocity has {len(v_measured)}")
        if template.fs != v_measured.fs:
            raise ClassificationError(f"Template {k} sampling frequency differs from the velocity")

def comparison_mask(signal: SampledSignal, trim: Optional[Tuple[float, float]]) -> np.ndarray:
    """Samples whose time lies in [start, end); every sample when trim is None."""
    t = signal.times
    if trim is None:
        return np.ones(t.size, dtype=bool)
    start, end = trim
    mask = (t >= start) & (t < end)
    if mask.sum() < 2:
        raise ClassificationError(f"Comparison window [{start}, {end}) s holds fewer than 2 samples")
    return mask

def _mse(v: np.ndarray, template: np.ndarray) -> float:
    return float(np.mean((v - template) ** 2))

def _pearson(v: np.ndarray, template: np.ndarray) -> float:
    # Constant input is detected exactly; its mean may still carry rounding noise
    if np.ptp(v) == 0 or np.ptp(template) == 0:
        raise ClassificationError("undefined correlation: zero-variance signal")
    dv = v - v.mean()
    dt = template - template.mean()
    return float(np.sum(dv * dt) / np.sqrt(np.sum(dv * dv) * np.sum(dt * dt)))

def classify(
    v_measured: SampledSignal,
    templates: Sequence[SampledSignal],
    metric: FitMetric = FitMetric.MSE,
    trim: Optional[Tuple[float, float]] = None
) -> AriEstimate:
    """
    Assign an ARI to a normalized velocity.

    Args:
    - v_measured (SampledSignal): Velocity on the template scale (rest level 1)
    - templates (Sequence[SampledSignal]): The ten curves, ARI 0..9, same length and fs
    - metric (FitMetric): mse or correlation
    - trim (tuple, optional): Comparison window [start, end) in seconds; full signal by default

    Returns:
    - AriEstimate: Selected ARI, its score and all ten scores

    Raises:
    - ClassificationError: Shape mismatch, or zero variance in correlation mode
    """
    _validate_inputs(v_measured, templates)
    mask = comparison_mask(v_measured, trim)
    v = v_measured.samples[mask]
    score_fn = _mse if metric == FitMetric.MSE else _pearson
    scores = tuple(score_fn(v, template.samples[mask]) for template in templates)

    # argmin/argmax return the first optimum, which is the lower ARI on ties
    ari = int(np.argmin(scores)) if metric == FitMetric.MSE else int(np.argmax(scores))
    return AriEstimate(ari=ari, score=scores[ari], per_template_scores=scores, metric=metric)

def compare_states(normo: AriEstimate, hyper: AriEstimate, subject_id: str) -> StateChangeReport:
    """Flag state changes larger than the limit and increases under hypercapnia."""
    delta = hyper.ari - normo.ari
    return StateChangeReport(
        subject_id=subject_id,
        ari_normo=normo.ari,
        ari_hyper=hyper.ari,
        delta=delta,
        exceeds_limit=abs(delta) > STATE_CHANGE_LIMIT,
        anomalous_increase=delta > 0
    )
