"""Scalar quasinormal modes of subextremal Kerr black holes by complex scaling."""

from .geometry import BlackHoleParams, HProfile, build_h
from .oracle import leaver_qnm
from .scaling import ScalingContour
from .solver import GridSpec, Window, beta_sweep

__all__ = ["BlackHoleParams", "HProfile", "build_h", "ScalingContour", "GridSpec", "Window",
           "beta_sweep", "leaver_qnm"]
__version__ = "0.1.0"
