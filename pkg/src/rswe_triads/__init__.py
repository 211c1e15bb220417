"""Triadic timestepping error analysis and a pseudospectral solver for the f-plane RSWEs."""

from .spectral_core import GridSpec, PhysicalParams, WaveIndex
from .stability import Scheme

__version__ = "0.1.0"

__all__ = ["GridSpec", "PhysicalParams", "WaveIndex", "Scheme", "__version__"]
