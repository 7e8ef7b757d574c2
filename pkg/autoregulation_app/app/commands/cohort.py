"""
Normocapnia vs hypercapnia report over a cohort (two-column table, JSON or CSV).
"""
from pathlib import Path
from typing import Optional
import click
from errors import CohortError
from utilities import read_subject_file, with_run_config, write_output
from analysis.datagen import manifest_from_json, plan_cohort, synth_cohort_from_plan
from analysis.fir_simpson import coefficients_from_json
from analysis.graybox import model_from_json
from analysis.pipeline import evaluate_cohort, render_cohort_table
from mock_data import reference_manifest
from schemas.classifier_schema import FitMetric
from schemas.datagen_schema import CohortManifest
from schemas.pipeline_schema import FirEstimator, GrayBoxEstimator, MeasuredVelocityEstimator
from schemas.run_schema import OutputFormat, RunConfig
from schemas.signal_schema import CapnicState

def load_manifest_pairs(path: Path, fs_override: Optional[float] = None):
    """Record pairs of a manifest; entries without a file are synthesized from their plan."""
    manifest = manifest_from_json(path.read_text(encoding="utf-8"))
    if all(entry.file is None for entry in manifest.entries):
        return synth_cohort_from_plan(manifest)

    by_subject = {}
    for entry in manifest.entries:
        if entry.file is None:
            raise CohortError(f"Manifest entry {entry.subject_id} ({entry.state.value}) has no file")
        record = read_subject_file(path.parent / entry.file, entry.state, entry.subject_id, fs_override)
        by_subject.setdefault(entry.subject_id, {})[entry.state] = record
    pairs = []
    for subject_id, states in by_subject.items():
        if len(states) != 2:
            raise CohortError(f"unmatched pair: subject {subject_id} lacks one of the two states")
        pairs.append((states[CapnicState.NORMOCAPNIA], states[CapnicState.HYPERCAPNIA]))
    return pairs

@click.command("cohort")
@click.option("--manifest", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None, help="Cohort manifest.json (synth output).")
@click.option("--reference", is_flag=True, default=False, help="Use the 16-subject fixture cohort.")
@click.option("--subjects", "n_subjects", type=int, default=None, help="Synthesize a cohort of N subjects.")
@click.option("--anomaly-index", type=int, default=None, help="With --subjects: 0-based anomalous subject.")
@click.option("--noise-sigma", type=float, default=0.0, show_default=True, help="With --reference/--subjects: noise level.")
@click.option("--metric", type=click.Choice([m.value for m in FitMetric]), default=FitMetric.MSE.value, show_default=True)
@click.option("--estimator", type=click.Choice(["measured", "fir", "graybox"]), default="measured", show_default=True)
@click.option("--coefficients", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None, help="Common FIR coefficients JSON.")
@click.option("--model", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None, help="Gray-box model JSON.")
@with_run_config(default_format=OutputFormat.TABLE)
def command(manifest: Optional[Path], reference: bool, n_subjects: Optional[int], anomaly_index: Optional[int], noise_sigma: float,
            metric: str, estimator: str, coefficients: Optional[Path], model: Optional[Path], run: RunConfig):
    """Evaluate every subject in both states and report the ARI changes."""
    sources = [manifest is not None, reference, n_subjects is not None]
    if sum(sources) != 1:
        raise click.UsageError("Give exactly one of --manifest, --reference, --subjects")

    if manifest is not None:
        pairs = load_manifest_pairs(manifest, run.fs)
    else:
        plan: CohortManifest = reference_manifest(run.seed, noise_sigma) if reference else plan_cohort(
            n_subjects, anomaly_index=anomaly_index, seed=run.seed, noise_sigma=noise_sigma)
        pairs = synth_cohort_from_plan(plan)

    if estimator == "measured":
        choice = MeasuredVelocityEstimator()
    elif estimator == "fir":
        if coefficients is None:
            raise click.UsageError("--estimator fir needs --coefficients")
        choice = FirEstimator(h=coefficients_from_json(coefficients.read_text(encoding="utf-8")))
    else:
        if model is None:
            raise click.UsageError("--estimator graybox needs --model")
        choice = GrayBoxEstimator(model=model_from_json(model.read_text(encoding="utf-8")))

    report = evaluate_cohort(pairs, choice, FitMetric(metric), window=run.baseline_window, crcp=run.crcp)
    if run.output_format == OutputFormat.TABLE:
        write_output(render_cohort_table(report), run.out)
    elif run.output_format == OutputFormat.JSON:
        write_output(report.model_dump_json(indent=2) + "\n", run.out)
    else:
        lines = ["subject_id,ari_normo,ari_hyper,delta,exceeds_limit,anomalous_increase"]
        lines += [f"{r.subject_id},{r.ari_normo},{r.ari_hyper},{r.delta},{str(r.exceeds_limit).lower()},{str(r.anomalous_increase).lower()}"
                  for r in report.rows]
        write_output("\n".join(lines) + "\n", run.out)
