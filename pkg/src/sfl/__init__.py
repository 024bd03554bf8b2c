"""Affine systems, self-similar measures and their exponential spectra."""

from . import catalog, cuntz, hadamard, ratlat, spectrum, system, transform
from .errors import SflError
from .ratlat import Lattice, RatMatrix
from .system import AffineSystem

__version__ = "0.1.0"

__all__ = [
    "AffineSystem",
    "Lattice",
    "RatMatrix",
    "SflError",
    "catalog",
    "cuntz",
    "hadamard",
    "ratlat",
    "spectrum",
    "system",
    "transform",
]
