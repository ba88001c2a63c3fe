"""Desk-scale laboratory for prime points on diagonal surfaces.

Subpackages cover the elementary arithmetic substrate (numtheory),
complete and prime-indexed exponential sums (expsums), oscillatory
integrals and the surface transform (oscint), rational approximation and
arc decompositions (arcs), the representation measure with its
approximation formula (surface), convolution and maximal operators
(maxops), and torus averages with equidistribution diagnostics (ergodic).
"""

from .errors import InputError, NumericError, SizeLimitError, UndefinedMeasureError

__all__ = [
    "InputError",
    "NumericError",
    "SizeLimitError",
    "UndefinedMeasureError",
]

__version__ = "0.1.0"
