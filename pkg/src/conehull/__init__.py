"""Cone-convex hull estimation from planar samples by stochastic cone erasure."""

from .eraser import EraseMode, ErasedRegion, EraserConfig, run, run_ball_eraser
from .geometry import FiniteCone, Frame, Point, Sector, UnitVector, derived_params
from .shapes import sample_uniform, shape_by_name, table_one_set

__all__ = [
    "EraseMode", "ErasedRegion", "EraserConfig", "FiniteCone", "Frame", "Point", "Sector",
    "UnitVector", "derived_params", "run", "run_ball_eraser", "sample_uniform",
    "shape_by_name", "table_one_set",
]
