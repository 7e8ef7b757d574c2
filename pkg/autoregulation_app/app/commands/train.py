"""
Gray-box model training on one subject, or pooled over several.
"""
from pathlib import Path
from typing import Optional, Tuple
import click
import numpy as np
import pandas as pd
from config import get_settings
from utilities import read_subject_file, with_run_config, write_output
from analysis.graybox import gb_init, gb_train, gb_train_pooled, model_to_json
from analysis.pipeline import pressure_change, velocity_change
from schemas.graybox_schema import GrayBoxConfig, TrainingTrace
from schemas.run_schema import OutputFormat, RunConfig
from schemas.signal_schema import CapnicState

def write_trace(trace: TrainingTrace, path: Path) -> None:
    """Loss curve as CSV (epoch,loss), one row per epoch."""
    frame = pd.DataFrame({"epoch": np.arange(len(trace.losses)), "loss": np.asarray(trace.losses, dtype=np.float64)})
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")

@click.command("train")
@click.argument("subjects", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--hidden-width", type=int, default=None, help="Hidden units (fallback: AUTOREG_HIDDEN_WIDTH).")
@click.option("--learning-rate", type=float, default=None, help="Gradient step (fallback: AUTOREG_LEARNING_RATE).")
@click.option("--epochs", type=int, default=None, help="Full-batch epochs (fallback: AUTOREG_EPOCHS).")
@click.option("--init-scale", type=float, default=None, help="Half-width of the uniform initialization.")
@click.option("--trace", type=click.Path(dir_okay=False, path_type=Path), default=None, help="Write the loss curve here as CSV.")
@with_run_config(default_format=OutputFormat.JSON)
def command(subjects: Tuple[Path, ...], hidden_width: Optional[int], learning_rate: Optional[float], epochs: Optional[int],
            init_scale: Optional[float], trace: Optional[Path], run: RunConfig):
    """Train a gray-box model (JSON, version graybox-v1) mapping dP to the velocity change."""
    settings = get_settings()
    config = GrayBoxConfig(
        hidden_width=settings.hidden_width if hidden_width is None else hidden_width,
        learning_rate=settings.learning_rate if learning_rate is None else learning_rate,
        epochs=settings.epochs if epochs is None else epochs,
        seed=run.seed,
        init_scale=init_scale
    )
    records = [read_subject_file(path, CapnicState.NORMOCAPNIA, fs_override=run.fs) for path in subjects]
    pairs = [
        (pressure_change(record, window=run.baseline_window, crcp=run.crcp), velocity_change(record, run.baseline_window))
        for record in records
    ]

    if len(pairs) == 1:
        dP, target = pairs[0]
        model, losses = gb_train(gb_init(config, dP), dP, target, config)
    else:
        # Standardization statistics over all recordings together
        pooled = pairs[0][0].derive(np.concatenate([dP.samples for dP, _ in pairs]))
        model, losses = gb_train_pooled(gb_init(config, pooled), pairs, config)

    if trace is not None:
        write_trace(losses, trace)
    write_output(model_to_json(model) + "\n", run.out)
