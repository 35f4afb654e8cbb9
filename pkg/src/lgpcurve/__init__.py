"""Certified G1 piecewise rational approximation of algebraic plane and space curves."""
from .config import JobConfig
from .export import export, read_json
from .pipeline import PipelineError, PiecewiseOutput, run, run_plane_pipeline, run_space_pipeline
from .poly import MPoly, parse_poly, resultant

__all__ = ["JobConfig", "MPoly", "PiecewiseOutput", "PipelineError", "export", "parse_poly",
           "read_json", "resultant", "run", "run_plane_pipeline", "run_space_pipeline"]
__version__ = "0.1.0"
