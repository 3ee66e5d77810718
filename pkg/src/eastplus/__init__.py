"""Energy-aware sparse random projections for rechargeable sensor networks.

Plans per-node sampling probabilities from harvested-energy profiles,
projects signals through seeded three-point sparse random matrices,
reconstructs them with a median-of-means sketching decoder, and simulates
the distributed projection protocol with per-node energy accounting.
"""

__version__ = "0.1.0"

from .backends import BACKEND
from .core import (
    EnergyLedger,
    EnergyProfile,
    ModelConstants,
    SamplingPlan,
    Signal,
    devectorize,
    node_of,
    relative_error,
    vectorize,
)

__all__ = [
    "BACKEND",
    "EnergyLedger",
    "EnergyProfile",
    "ModelConstants",
    "SamplingPlan",
    "Signal",
    "devectorize",
    "node_of",
    "relative_error",
    "vectorize",
    "__version__",
]
