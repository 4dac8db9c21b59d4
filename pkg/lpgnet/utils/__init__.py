# Utils module for lpgnet
# logging, configuration, seeding and the exception root

from .config import *
from .errors import *
from .logger_config import *
from .seeding import *
from .tokens import *

__all__ = ["LpgnetError", "ConfigError", "ShapeError",
           "make_logger", "setup_logging", "run_token", "AutoFlushFileHandler",
           "derive_rng", "derive_seed_sequence",
           "apptoken", "base62_encode", "config_hash",
           "load_config", "parse_epsilon", "format_epsilon", "resolve_output_dir", "OUTPUT_ROOT_ENV"]
