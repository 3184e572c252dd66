"""Numerical biharmonicity checks for Riemannian submersions from 3-manifolds onto surfaces."""

from .bcv import BCVParams, ModelName, classify_bcv
from .biharmonic import BiharmonicReport, SamplePlan, Tolerances, classify_map
from .catalog import get_entry

__all__ = ["BCVParams", "ModelName", "classify_bcv", "BiharmonicReport", "SamplePlan",
           "Tolerances", "classify_map", "get_entry"]
__version__ = "0.1.0"
