"""
End-to-end hybrid flow: ABP -> velocity estimator -> A-T templates -> ARI.

Three estimators feed the classifier:

* measured_velocity: recorded CBFV divided by its baseline mean (rest level 1)
* fir: fixed 7-tap coefficients applied to dP
* graybox: per-window coefficients from a trained gray-box model applied to dP

The two 7-tap estimators predict the velocity change v / v_base - 1 and only
exist from sample 6 on; their output is shifted back to the template scale and
the templates are trimmed to the same samples.
"""
from typing import List, Optional, Sequence, Tuple
import re
from config import get_settings
from errors import ClassificationError, CohortError
from logger import logger
from analysis.aaslid_tiecks import generate_templates
from analysis.ari_classifier import classify, compare_states, comparison_mask
from analysis.fir_simpson import fir_fit, fir_predict
from analysis.graybox import gb_init, gb_predict, gb_train
from analysis.signal import auto_normalization, baseline_mean, normalize_pressure, normalize_velocity
from schemas.classifier_schema import AriEstimate, FitMetric, StateChangeReport
from schemas.fir_schema import FIR_TAPS, FirCoefficients
from schemas.graybox_schema import GrayBoxConfig, GrayBoxModel, TrainingTrace
from schemas.pipeline_schema import CohortReport, EstimatorChoice, FirEstimator, GrayBoxEstimator, MeasuredVelocityEstimator
from schemas.signal_schema import CapnicState, NormalizationParams, SampledSignal, SubjectRecord

Window = Tuple[float, float]

def natural_key(subject_id: str):
    """Sort key that orders S2 before S10."""
    return [int(part) if part.isdigit() else part for part in re.split(r'(\d+)', subject_id)]

def _window(window: Optional[Window]) -> Window:
    return window if window is not None else get_settings().baseline_window

#########################
### SIGNAL PREPARATION ###
#########################

def pressure_change(record: SubjectRecord, norm: Optional[NormalizationParams] = None, window: Optional[Window] = None, crcp: Optional[float] = None) -> SampledSignal:
    """dP of a record; the baseline comes from the window unless norm is given."""
    if norm is None:
        norm = auto_normalization(record.abp, _window(window), get_settings().crcp if crcp is None else crcp)
    return normalize_pressure(record.abp, norm)

def measured_velocity(record: SubjectRecord, window: Optional[Window] = None) -> SampledSignal:
    """CBFV divided by its baseline mean."""
    return normalize_velocity(record.cbfv, baseline_mean(record.cbfv, _window(window)))

def velocity_change(record: SubjectRecord, window: Optional[Window] = None) -> SampledSignal:
    """Training target of the 7-tap estimators: v / v_base - 1."""
    v = measured_velocity(record, window)
    return v.derive(v.samples - 1.0, label="dV")

def fit_fir_estimator(record: SubjectRecord, ridge: Optional[float] = None, norm: Optional[NormalizationParams] = None,
                      window: Optional[Window] = None, crcp: Optional[float] = None) -> FirCoefficients:
    """Taps that map the record's dP to its velocity change."""
    dP = pressure_change(record, norm, window, crcp)
    return fir_fit(dP, velocity_change(record, window), get_settings().fir_ridge if ridge is None else ridge)

def train_graybox_estimator(record: SubjectRecord, config: GrayBoxConfig, norm: Optional[NormalizationParams] = None,
                            window: Optional[Window] = None, crcp: Optional[float] = None) -> Tuple[GrayBoxModel, TrainingTrace]:
    """Initialize on the record's dP and train against its velocity change."""
    dP = pressure_change(record, norm, window, crcp)
    model = gb_init(config, dP)
    return gb_train(model, dP, velocity_change(record, window), config)

def estimate_velocity(record: SubjectRecord, dP: SampledSignal, estimator: EstimatorChoice, window: Optional[Window] = None) -> SampledSignal:
    """Velocity on the template scale; 7-tap estimators return len(dP) - 6 samples."""
    if isinstance(estimator, MeasuredVelocityEstimator):
        return measured_velocity(record, window)
    if isinstance(estimator, FirEstimator):
        change = fir_predict(estimator.h, dP)
    elif isinstance(estimator, GrayBoxEstimator):
        change = gb_predict(estimator.model, dP)
    else:
        raise TypeError(f"Unknown estimator {estimator!r}")
    return change.derive(change.samples + 1.0, label=estimator.kind)

##################
### ESTIMATION ###
##################

def estimate_ari(
    record: SubjectRecord,
    estimator: EstimatorChoice,
    metric: FitMetric = FitMetric.MSE,
    norm: Optional[NormalizationParams] = None,
    window: Optional[Window] = None,
    crcp: Optional[float] = None,
    trim: Optional[Window] = None
) -> AriEstimate:
    """
    ARI of one recording.

    Args:
    - record (SubjectRecord): ABP and CBFV of the subject
    - estimator (EstimatorChoice): Source of the velocity that is matched against the templates
    - metric (FitMetric): mse or correlation
    - norm (NormalizationParams, optional): Fixed constants; None takes the baseline from the window
    - window (tuple, optional): Baseline window in seconds; settings by default
    - crcp (float, optional): Critical closing pressure for automatic normalization
    - trim (tuple, optional): Comparison window [start, end) in recording seconds, for every estimator

    Returns:
    - AriEstimate: Selected ARI and the ten template scores
    """
    dP = pressure_change(record, norm, window, crcp)
    v_hat = estimate_velocity(record, dP, estimator, window)
    templates = generate_templates(dP)
    if len(v_hat) != len(dP):
        # Trim is given on the recording clock; the 7-tap output starts at sample 6
        offset = FIR_TAPS - 1
        mask = comparison_mask(dP, trim)[offset:]
        if mask.sum() < 2:
            raise ClassificationError(f"Comparison window {trim} s holds fewer than 2 samples of the {estimator.kind} estimate")
        v_hat = v_hat.derive(v_hat.samples[mask])
        templates = [t.derive(t.samples[offset:][mask]) for t in templates]
        trim = None
    estimate = classify(v_hat, templates, metric, trim)
    logger.debug(f"Subject {record.id} ({record.state.value}): ARI {estimate.ari} via {estimator.kind}")
    return estimate

def _check_pair(normo: SubjectRecord, hyper: SubjectRecord) -> None:
    if normo.id != hyper.id:
        raise CohortError(f"unmatched pair: subject ids {normo.id} and {hyper.id} differ")
    if normo.state != CapnicState.NORMOCAPNIA or hyper.state != CapnicState.HYPERCAPNIA:
        raise CohortError(f"unmatched pair: subject {normo.id} needs one normocapnia and one hypercapnia record, in that order")

def evaluate_cohort(
    pairs: Sequence[Tuple[SubjectRecord, SubjectRecord]],
    estimator: EstimatorChoice,
    metric: FitMetric = FitMetric.MSE,
    window: Optional[Window] = None,
    crcp: Optional[float] = None
) -> CohortReport:
    """
    Normocapnia vs hypercapnia ARI for every subject, rows ordered by subject id.

    Raises:
    - CohortError: A pair mixes subjects or states, or a subject appears twice
    """
    seen = set()
    for normo, hyper in pairs:
        _check_pair(normo, hyper)
        if normo.id in seen:
            raise CohortError(f"Subject {normo.id} appears more than once")
        seen.add(normo.id)

    rows: List[StateChangeReport] = []
    for normo, hyper in sorted(pairs, key=lambda pair: natural_key(pair[0].id)):
        rows.append(compare_states(
            estimate_ari(normo, estimator, metric, window=window, crcp=crcp),
            estimate_ari(hyper, estimator, metric, window=window, crcp=crcp),
            normo.id
        ))
    report = CohortReport.from_rows(rows)
    logger.info(f"Evaluated {report.summary.subjects} subjects: {report.summary.exceeds_limit} exceed the limit, "
                f"{report.summary.anomalous_increase} anomalous increases")
    return report

#################
### RENDERING ###
#################

_HEADER = f"{'Subject':>8} {'Normo':>6} {'Hyper':>6}"
_BLANK = " " * len(_HEADER)

def _cell(row: StateChangeReport) -> str:
    return f"{row.subject_id:>8} {row.ari_normo:>6} {row.ari_hyper:>6}"

def render_cohort_table(report: CohortReport) -> str:
    """Fixed-width two-column layout: first half of the subjects left, second half right."""
    rows = report.rows
    half = (len(rows) + 1) // 2
    left, right = rows[:half], rows[half:]
    lines = [f"{_HEADER} | {_HEADER}"]
    for i, row in enumerate(left):
        lines.append(f"{_cell(row)} | {_cell(right[i]) if i < len(right) else _BLANK}".rstrip())

    summary = report.summary
    anomalous = ", ".join(row.subject_id for row in rows if row.anomalous_increase) or "-"
    exceeding = ", ".join(row.subject_id for row in rows if row.exceeds_limit) or "-"
    lines.append("")
    lines.append(f"Subjects: {summary.subjects}")
    lines.append(f"Exceeds limit: {summary.exceeds_limit} ({exceeding})")
    lines.append(f"Anomalous increase: {summary.anomalous_increase} ({anomalous})")
    return "\n".join(lines) + "\n"
