"""synthlang: deterministic two-dialect expression corpora and evaluation."""

__version__ = "0.1.0"

from .config import BASE_CONFIG, GenConfig, load_config, serialize, validate  # noqa: E402,F401
from .lang import render_value  # noqa: E402,F401
