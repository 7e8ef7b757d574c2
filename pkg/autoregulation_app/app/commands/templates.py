"""
Ten A-T template curves for a pressure signal, as plot-ready columns.
The pressure comes from a subject CSV or, without one, from a synthetic step.
"""
from pathlib import Path
from typing import List, Optional
import io
import json
import click
import pandas as pd
from config import get_settings
from logger import logger
from utilities import read_subject_file, with_run_config, write_output
from analysis.aaslid_tiecks import generate_templates
from analysis.datagen import synth_pressure
from analysis.pipeline import pressure_change
from analysis.signal import normalize_pressure
from schemas.datagen_schema import SynthSpec
from schemas.run_schema import OutputFormat, RunConfig
from schemas.signal_schema import CapnicState, NormalizationParams, SampledSignal

def templates_frame(templates: List[SampledSignal]) -> pd.DataFrame:
    """time column plus ARI0..ARI9."""
    columns = {"time": templates[0].times}
    for k, template in enumerate(templates):
        columns[f"ARI{k}"] = template.samples
    return pd.DataFrame(columns)

def render_templates(templates: List[SampledSignal], output_format: OutputFormat) -> str:
    frame = templates_frame(templates)
    if output_format == OutputFormat.JSON:
        return json.dumps({name: frame[name].tolist() for name in frame.columns}, indent=2) + "\n"
    buffer = io.StringIO()
    digits = get_settings().csv_significant_digits
    frame.to_csv(buffer, index=False, float_format=f"%.{digits}g", lineterminator="\n")
    return buffer.getvalue()

@click.command("templates")
@click.argument("subject", required=False, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--duration", type=float, default=60.0, show_default=True, help="Synthetic step: length in seconds.")
@click.option("--step-time", type=float, default=5.0, show_default=True, help="Synthetic step: time of the drop in seconds.")
@click.option("--step-drop", type=float, default=0.2, show_default=True, help="Synthetic step: drop as a fraction of the baseline.")
@click.option("--baseline-pressure", type=float, default=100.0, show_default=True, help="Synthetic step: resting ABP in mmHg.")
@with_run_config(default_format=OutputFormat.CSV)
def command(subject: Optional[Path], duration: float, step_time: float, step_drop: float, baseline_pressure: float, run: RunConfig):
    """Write the ten template responses (columns time, ARI0..ARI9)."""
    if subject is not None:
        record = read_subject_file(subject, CapnicState.NORMOCAPNIA, fs_override=run.fs)
        dP = pressure_change(record, window=run.baseline_window, crcp=run.crcp)
    else:
        spec = SynthSpec(
            fs=run.fs or SynthSpec().fs,
            duration=duration,
            step_time=step_time,
            step_drop=step_drop,
            baseline_pressure=baseline_pressure,
            seed=run.seed
        )
        dP = normalize_pressure(synth_pressure(spec), NormalizationParams(p_base=spec.baseline_pressure, crcp=run.crcp))

    templates = generate_templates(dP)
    logger.info(f"Generated 10 templates over {len(dP)} samples")
    write_output(render_templates(templates, run.output_format), run.out)
