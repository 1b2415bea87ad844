"""Numerical toolkit for quadrics, real anti-symplectic involutions and symmetric periodic orbits."""

from . import cotangent, energy, errors, holcurve, mobius, orbits, quadric
from .errors import RealSFTError

__version__ = "0.1.0"

__all__ = ["cotangent", "energy", "errors", "holcurve", "mobius", "orbits", "quadric", "RealSFTError"]
