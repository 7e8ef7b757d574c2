"""
7-tap FIR identification from subject recordings.
One file gives the subject's own taps; several give common taps over all of them.
"""
from pathlib import Path
from typing import Optional, Tuple
import click
from config import get_settings
from utilities import read_subject_file, with_run_config, write_output
from analysis.fir_simpson import coefficients_to_csv_row, fir_fit_pooled
from analysis.pipeline import fit_fir_estimator, pressure_change, velocity_change
from schemas.run_schema import OutputFormat, RunConfig
from schemas.signal_schema import CapnicState

@click.command("fit-fir")
@click.argument("subjects", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--ridge", type=float, default=None, help="Penalty on the squared taps (fallback: AUTOREG_FIR_RIDGE).")
@with_run_config(default_format=OutputFormat.JSON)
def command(subjects: Tuple[Path, ...], ridge: Optional[float], run: RunConfig):
    """Fit h(0..6) mapping dP to the velocity change v/v_base - 1."""
    ridge = get_settings().fir_ridge if ridge is None else ridge
    records = [read_subject_file(path, CapnicState.NORMOCAPNIA, fs_override=run.fs) for path in subjects]

    if len(records) == 1:
        h = fit_fir_estimator(records[0], ridge, window=run.baseline_window, crcp=run.crcp)
    else:
        h = fir_fit_pooled([
            (pressure_change(record, window=run.baseline_window, crcp=run.crcp), velocity_change(record, run.baseline_window))
            for record in records
        ], ridge)

    if run.output_format == OutputFormat.JSON:
        write_output(h.model_dump_json(indent=2) + "\n", run.out)
    else:
        write_output(",".join(f"h{k}" for k in range(len(h.h))) + "\n" + coefficients_to_csv_row(h) + "\n", run.out)
