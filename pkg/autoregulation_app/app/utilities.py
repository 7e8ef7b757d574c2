from pathlib import Path
from typing import Optional, Tuple
import functools
import click
from config import get_settings
from errors import CsvFormatError
from logger import logger
from analysis.signal import load_subject_csv
from schemas.run_schema import OutputFormat, RunConfig
from schemas.signal_schema import CapnicState, SubjectRecord

def read_subject_file(path: Path, state: CapnicState, subject_id: Optional[str] = None, fs_override: Optional[float] = None) -> SubjectRecord:
    """Load a subject CSV; the id defaults to the file name without extension."""
    path = Path(path)
    try:
        with open(path, "rb") as f:
            return load_subject_csv(f, subject_id or path.stem, state, fs_override)
    except CsvFormatError as e:
        logger.error(f"Rejected subject file {path}: {e.detail}")
        raise CsvFormatError(f"{path.name}: {e.detail}")

def write_output(text: str, out: Optional[Path]) -> None:
    """Write to the --out file, or to stdout when no file was given."""
    if out is None:
        click.echo(text, nl=False)
        return
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    logger.info(f"Wrote {out}")

def parse_window(ctx, param, value: Optional[str]) -> Optional[Tuple[float, float]]:
    """--baseline-window accepts END (window [0, END)) or START:END, in seconds."""
    if value is None:
        return None
    try:
        parts = [float(x) for x in value.split(":")]
    except ValueError:
        raise click.BadParameter(f"'{value}' is not SECONDS or START:END")
    if len(parts) == 1:
        return (0.0, parts[0])
    if len(parts) == 2:
        return (parts[0], parts[1])
    raise click.BadParameter(f"'{value}' is not SECONDS or START:END")

def run_options(f):
    """Global flags shared by every command."""
    options = [
        click.option("--seed", type=int, default=None, help="Random seed (fallback: AUTOREG_SEED)."),
        click.option("--out", type=click.Path(path_type=Path), default=None, help="Output path; stdout when omitted."),
        click.option("--format", "output_format", type=click.Choice([fmt.value for fmt in OutputFormat]), default=None, help="Output format."),
        click.option("--fs", type=float, default=None, help="Sampling frequency in Hz, overrides the CSV time column."),
        click.option("--crcp", type=float, default=None, help="Critical closing pressure in mmHg."),
        click.option("--baseline-window", type=str, default=None, callback=parse_window, help="Baseline window: SECONDS or START:END.")
    ]
    for option in reversed(options):
        f = option(f)
    return f

def build_run_config(seed, out, output_format, fs, crcp, baseline_window, default_format: OutputFormat = OutputFormat.JSON) -> RunConfig:
    """Merge flags over settings; raises pydantic.ValidationError before anything is computed."""
    settings = get_settings()
    return RunConfig(
        seed=settings.seed if seed is None else seed,
        out=out,
        output_format=default_format if output_format is None else output_format,
        fs=fs,
        crcp=settings.crcp if crcp is None else crcp,
        baseline_window=settings.baseline_window if baseline_window is None else baseline_window
    )

def with_run_config(default_format: OutputFormat = OutputFormat.JSON):
    """Replace the global flags by a validated `run` keyword argument."""
    def decorator(f):
        @run_options
        @functools.wraps(f)
        def wrapper(*args, seed, out, output_format, fs, crcp, baseline_window, **kwargs):
            run = build_run_config(seed, out, output_format, fs, crcp, baseline_window, default_format)
            click.get_current_context().meta["run_config"] = run
            return f(*args, run=run, **kwargs)
        return wrapper
    return decorator
