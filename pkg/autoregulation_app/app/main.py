import click
from datetime import datetime
from pydantic import ValidationError
from logger import logger, audit_logger
from errors import AutoregError
from config import get_settings

### COMMANDS
from commands.templates import command as templates_command
from commands.classify import command as classify_command
from commands.fit_fir import command as fit_fir_command
from commands.train import command as train_command
from commands.synth import command as synth_command
from commands.cohort import command as cohort_command


class LoggingGroup(click.Group):
    """
    Command group that logs every command run.

    Logs the command name, its duration and any error. Toolkit and validation
    errors become a message on stderr and exit status 1.
    """
    def invoke(self, ctx: click.Context):
        start_time = datetime.now()
        name = ctx.protected_args[0] if ctx.protected_args else None
        if name is not None:
            logger.info(f"Command: {name}")

        try:
            result = super().invoke(ctx)
            duration = (datetime.now() - start_time).total_seconds()
            if name is not None:
                logger.info(f"Finished: {name} - Duration: {duration:.3f}s")
                audit_logger.log_run_event("command_completed", name, _run_details(ctx, duration))
            return result
        except AutoregError as e:
            self._fail(ctx, name, e.detail, start_time)
        except ValidationError as e:
            self._fail(ctx, name, f"invalid parameters: {e}", start_time)

    def _fail(self, ctx: click.Context, name, message: str, start_time: datetime):
        duration = (datetime.now() - start_time).total_seconds()
        logger.error(f"Error running {name}: {message}")
        audit_logger.log_run_event("command_failed", name, {**_run_details(ctx, duration), "error": message})
        click.echo(f"Error: {message}", err=True)
        ctx.exit(1)

def _run_details(ctx: click.Context, duration: float) -> dict:
    run = ctx.meta.get("run_config")
    details = {"duration_s": round(duration, 3)}
    if run is not None:
        details["run_config"] = run.model_dump(mode="json")
    return details

@click.group(cls=LoggingGroup)
@click.version_option(version=get_settings().app_version, prog_name=get_settings().app_name)
def cli():
    """Estimate the cerebral autoregulation index (ARI, 0-9) from ABP and CBFV recordings."""

# Register commands
cli.add_command(templates_command)
cli.add_command(classify_command)
cli.add_command(fit_fir_command)
cli.add_command(train_command)
cli.add_command(synth_command)
cli.add_command(cohort_command)

if __name__ == '__main__':
    cli()
