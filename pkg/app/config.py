import os
import sys
import logging
from typing import Optional

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# GET THE CONFIG VALUES FROM ENVIRONMENT VARIABLES
ALTERNA_THREADS = os.getenv("ALTERNA_THREADS", "1")
ALTERNA_SEED = os.getenv("ALTERNA_SEED", "42")
ALTERNA_RESULTS_DIR = os.getenv("ALTERNA_RESULTS_DIR", "results")
ALTERNA_LOG_LEVEL = os.getenv("ALTERNA_LOG_LEVEL", "INFO")
ALTERNA_FD_STEP = os.getenv("ALTERNA_FD_STEP", "1e-3")

logger = logging.getLogger(__name__)


def get_threads(override: Optional[int] = None) -> int:
    if override is not None:
        return max(1, int(override))
    try:
        return max(1, int(ALTERNA_THREADS))
    except ValueError:
        logger.warning(f"Ignoring invalid ALTERNA_THREADS={ALTERNA_THREADS!r}, using 1")
        return 1


def get_seed(override: Optional[int] = None) -> int:
    if override is not None:
        return int(override)
    try:
        return int(ALTERNA_SEED)
    except ValueError:
        logger.warning(f"Ignoring invalid ALTERNA_SEED={ALTERNA_SEED!r}, using 42")
        return 42


def get_fd_step() -> float:
    try:
        step = float(ALTERNA_FD_STEP)
    except ValueError:
        step = 1e-3
    return step if step > 0 else 1e-3


def get_results_dir(override: Optional[str] = None) -> str:
    return override or ALTERNA_RESULTS_DIR


def configure_logging(level: Optional[str] = None) -> None:
    logging.basicConfig(
        level=getattr(logging, (level or ALTERNA_LOG_LEVEL).upper(), logging.INFO),
        format='%(asctime)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
        force=True,
    )
