"""
ARI of one subject recording.
"""
from pathlib import Path
from typing import Optional
import click
from logger import logger
from utilities import read_subject_file, with_run_config, write_output
from analysis.fir_simpson import coefficients_from_json
from analysis.graybox import model_from_json
from analysis.pipeline import estimate_ari, fit_fir_estimator
from schemas.classifier_schema import AriEstimate, FitMetric
from schemas.pipeline_schema import FirEstimator, GrayBoxEstimator, MeasuredVelocityEstimator
from schemas.run_schema import OutputFormat, RunConfig
from schemas.signal_schema import CapnicState

ESTIMATORS = ["measured", "fir", "graybox"]

def render_estimate(estimate: AriEstimate, output_format: OutputFormat) -> str:
    if output_format == OutputFormat.JSON:
        return estimate.model_dump_json(indent=2) + "\n"
    if output_format == OutputFormat.CSV:
        header = ["ari", "score", "metric"] + [f"score_ARI{k}" for k in range(10)]
        values = [str(estimate.ari), repr(estimate.score), estimate.metric.value] + [repr(s) for s in estimate.per_template_scores]
        return ",".join(header) + "\n" + ",".join(values) + "\n"
    return f"ARI {estimate.ari} ({estimate.metric.value} {estimate.score:.6g})\n"

@click.command("classify")
@click.argument("subject", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--metric", type=click.Choice([m.value for m in FitMetric]), default=FitMetric.MSE.value, show_default=True)
@click.option("--estimator", type=click.Choice(ESTIMATORS), default="measured", show_default=True)
@click.option("--coefficients", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None,
              help="FIR coefficients JSON (fit-fir output); without it the taps are fitted on the subject itself.")
@click.option("--model", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None,
              help="Gray-box model JSON (train output); required by --estimator graybox.")
@click.option("--id", "subject_id", type=str, default=None, help="Subject id; defaults to the file name.")
@click.option("--state", type=click.Choice([s.value for s in CapnicState]), default=CapnicState.NORMOCAPNIA.value, show_default=True)
@with_run_config(default_format=OutputFormat.JSON)
def command(subject: Path, metric: str, estimator: str, coefficients: Optional[Path], model: Optional[Path],
            subject_id: Optional[str], state: str, run: RunConfig):
    """Classify a subject CSV (time,abp,cbfv) against the ten templates."""
    record = read_subject_file(subject, CapnicState(state), subject_id, run.fs)

    if estimator == "measured":
        choice = MeasuredVelocityEstimator()
    elif estimator == "fir":
        if coefficients is not None:
            h = coefficients_from_json(coefficients.read_text(encoding="utf-8"))
        else:
            h = fit_fir_estimator(record, window=run.baseline_window, crcp=run.crcp)
        choice = FirEstimator(h=h)
    else:
        if model is None:
            raise click.UsageError("--estimator graybox needs --model")
        choice = GrayBoxEstimator(model=model_from_json(model.read_text(encoding="utf-8")))

    estimate = estimate_ari(record, choice, FitMetric(metric), window=run.baseline_window, crcp=run.crcp)
    logger.info(f"Subject {record.id}: ARI {estimate.ari}")
    write_output(render_estimate(estimate, run.output_format), run.out)
