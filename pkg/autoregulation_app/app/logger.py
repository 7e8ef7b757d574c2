import logging
import sys
import json
from config import get_settings
from datetime import datetime, timezone
from pathlib import Path

# Configure logging
def setup_logger(name: str = "autoreg"):
    settings = get_settings()
    logger = logging.getLogger(name)
    logger.setLevel(settings.log_level)

    # Module reloads in the test suite must not stack handlers
    if logger.handlers:
        return logger

    # Create formatters
    file_formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )
    console_formatter = logging.Formatter(
        '%(levelname)s: %(message)s'
    )

    # Console goes to stderr, stdout carries command output
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(console_formatter)
    console_handler.setLevel(settings.log_level)
    logger.addHandler(console_handler)

    if settings.log_to_file:
        Path(settings.logs_dir).mkdir(exist_ok=True)
        file_handler = logging.FileHandler(
            f"{settings.logs_dir}/autoreg_{datetime.now().strftime('%Y%m%d')}.log"
        )
        file_handler.setFormatter(file_formatter)
        file_handler.setLevel(settings.log_level)
        logger.addHandler(file_handler)

    return logger

class RunAuditLogger:
    """
    Appends one JSON line per command run to logs_dir/run_audit.log.

    The record holds the command name and its validated parameters, so a result
    file can always be traced back to the exact invocation that produced it.
    """
    def __init__(self):
        self.logger = logging.getLogger('run_audit')
        self.logger.setLevel(logging.INFO)
        self.logger.propagate = False
        settings = get_settings()
        if settings.log_to_file and not self.logger.handlers:
            Path(settings.logs_dir).mkdir(exist_ok=True)
            handler = logging.FileHandler(f"{settings.logs_dir}/run_audit.log")
            handler.setFormatter(logging.Formatter('%(asctime)s - %(message)s'))
            self.logger.addHandler(handler)

    def log_run_event(self, event_type: str, command: str, details: dict):
        log_entry = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "event_type": event_type,
            "command": command,
            "details": details
        }
        self.logger.info(json.dumps(log_entry, default=str, sort_keys=True))

# Create global logger instance
logger = setup_logger()
audit_logger = RunAuditLogger()
