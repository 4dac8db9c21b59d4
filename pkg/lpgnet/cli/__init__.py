# Command-line front end: generate | train | infer | attack | experiment | stats

from .main import *

__all__ = ["main", "build_parser", "RUN_RECORD"]
