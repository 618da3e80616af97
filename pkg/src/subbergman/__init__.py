"""Numerical toolkit for weighted Bergman spaces, sub-Bergman kernels and their defect operators."""

from ._backend import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
