"""Shape optimization of set functionals over length-constrained networks."""

from ._kernels import BACKEND
from .errors import MaxshapeError
from .geometry import Ball, CurveNetwork, DomainSpec, ball_surgery, enlarge_to_length, total_length
from .grid import OpenRegion, components, rasterize

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Ball",
    "CurveNetwork",
    "DomainSpec",
    "MaxshapeError",
    "OpenRegion",
    "ball_surgery",
    "components",
    "enlarge_to_length",
    "rasterize",
    "total_length",
]
