"""Physical-layer network coding over the two-way relay channel."""
from .kernels import BACKEND
from .relay import SchemeId, relay_map
from .harness import ExperimentSpec, ResultRow, preset, run_point, run_sweep

__all__ = ["BACKEND", "SchemeId", "relay_map", "ExperimentSpec", "ResultRow", "preset", "run_point", "run_sweep"]
__version__ = "0.1.0"
