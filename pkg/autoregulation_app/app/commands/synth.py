"""
Synthetic subjects (one CSV) and cohorts (a directory of CSVs plus manifest.json).
"""
from typing import Optional
import io
import click
from utilities import with_run_config, write_output
from analysis.datagen import plan_cohort, synth_cohort_from_plan, synth_subject, write_cohort
from analysis.signal import save_subject_csv
from mock_data import reference_manifest
from schemas.datagen_schema import SynthSpec
from schemas.run_schema import OutputFormat, RunConfig
from schemas.signal_schema import CapnicState

def parse_drops(ctx, param, value: str):
    try:
        return {int(x) for x in value.split(",") if x.strip()}
    except ValueError:
        raise click.BadParameter(f"'{value}' is not a comma separated list of integers")

@click.command("synth")
@click.option("--ari", type=click.IntRange(0, 9), default=9, show_default=True, help="Planted ARI of a single subject.")
@click.option("--state", type=click.Choice([s.value for s in CapnicState]), default=CapnicState.NORMOCAPNIA.value, show_default=True)
@click.option("--id", "subject_id", type=str, default="S01", show_default=True)
@click.option("--noise-sigma", type=float, default=0.0, show_default=True, help="Noise relative to each signal's baseline.")
@click.option("--duration", type=float, default=60.0, show_default=True)
@click.option("--step-time", type=float, default=5.0, show_default=True)
@click.option("--step-drop", type=float, default=0.2, show_default=True)
@click.option("--baseline-pressure", type=float, default=100.0, show_default=True)
@click.option("--cohort", "n_subjects", type=int, default=None, help="Generate a cohort of N subject pairs into the --out directory.")
@click.option("--reference", is_flag=True, default=False, help="Generate the 16-subject fixture cohort into the --out directory.")
@click.option("--anomaly-index", type=int, default=None, help="0-based subject whose ARI increases under hypercapnia.")
@click.option("--drops", type=str, default="0,1,2", show_default=True, callback=parse_drops, help="Allowed normo - hyper ARI drops.")
@with_run_config(default_format=OutputFormat.CSV)
def command(ari: int, state: str, subject_id: str, noise_sigma: float, duration: float, step_time: float, step_drop: float,
            baseline_pressure: float, n_subjects: Optional[int], reference: bool, anomaly_index: Optional[int], drops: set, run: RunConfig):
    """Write a synthetic subject CSV, or a cohort directory with --cohort/--reference."""
    spec = SynthSpec(
        fs=run.fs or SynthSpec().fs,
        duration=duration,
        step_time=step_time,
        step_drop=step_drop,
        baseline_pressure=baseline_pressure,
        noise_sigma=noise_sigma,
        seed=run.seed,
        true_ari=ari,
        state=CapnicState(state)
    )

    if n_subjects is None and not reference:
        buffer = io.StringIO()
        save_subject_csv(synth_subject(spec, subject_id), buffer)
        write_output(buffer.getvalue(), run.out)
        return

    if run.out is None:
        raise click.UsageError("--cohort and --reference need an --out directory")
    if reference:
        manifest = reference_manifest(seed=run.seed, noise_sigma=noise_sigma)
    else:
        manifest = plan_cohort(n_subjects, drops, anomaly_index, run.seed, noise_sigma)
    pairs = synth_cohort_from_plan(manifest, spec)
    write_cohort(manifest, pairs, run.out)
    click.echo(str(run.out / "manifest.json"))
