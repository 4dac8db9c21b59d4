import logging
import logging.handlers
from datetime import datetime
from pathlib import Path

from .tokens import apptoken

ROOT_LOGGER = "lpgnet"
_RUN_TOKEN = apptoken()


class AutoFlushFileHandler(logging.handlers.RotatingFileHandler):
    def __init__(self, filename):
        super().__init__(filename, maxBytes=100 * 1024 * 1024, backupCount=10, encoding="utf-8")

    def emit(self, record):
        super().emit(record)
        self.flush()


class RunTokenFilter(logging.Filter):
    """Stamps every record with the token of the current process run."""

    def __init__(self, token: str):
        super().__init__()
        self.token = token

    def filter(self, record: logging.LogRecord) -> bool:
        record.token = self.token
        return True


def run_token() -> str:
    return _RUN_TOKEN


def make_logger(owner: str) -> logging.Logger:
    return logging.getLogger(f"{ROOT_LOGGER}.{owner}")


def setup_logging(run_name="lpgnet", logs_dir="./logs", level=logging.INFO) -> logging.Logger:
    """
    Setup logging for a command-line run.

    Args:
        run_name (str): base name of the log file
        logs_dir (str | Path): directory receiving the rotating log file
        level (int): console level; the file always records INFO and above

    Returns:
        logging.Logger: the configured package root logger
    """
    logs_dir = Path(logs_dir)
    logs_dir.mkdir(parents=True, exist_ok=True)

    # Backup existing log file if it exists
    log_file = logs_dir / f"{run_name}.log"
    if log_file.exists():
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        backup_file = logs_dir / f"{run_name}_{timestamp}.log"
        try:
            log_file.rename(backup_file)
        except OSError as e:
            print(f"Warning: Could not backup existing log file: {e}")

    logger = logging.getLogger(ROOT_LOGGER)
    logger.setLevel(logging.DEBUG)
    logger.propagate = False

    for handler in logger.handlers[:]:
        logger.removeHandler(handler)
        handler.close()

    detailed_formatter = logging.Formatter(
        "%(asctime)s - %(token)s - %(name)s - %(levelname)s - %(filename)s:%(lineno)d - %(funcName)s - %(message)s"
    )
    simple_formatter = logging.Formatter("%(asctime)s - %(levelname)s - %(message)s")
    token_filter = RunTokenFilter(run_token())

    file_handler = AutoFlushFileHandler(log_file)
    file_handler.setLevel(logging.INFO)
    file_handler.setFormatter(detailed_formatter)
    file_handler.addFilter(token_filter)

    console_handler = logging.StreamHandler()
    console_handler.setLevel(level)
    console_handler.setFormatter(simple_formatter)
    console_handler.addFilter(token_filter)

    logger.addHandler(file_handler)
    logger.addHandler(console_handler)

    logger.info(f"Logging system initialized with file rotation ({log_file})")
    return logger
