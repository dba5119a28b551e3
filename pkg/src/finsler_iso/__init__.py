"""Isoperimetric problem for the Berwald metric on the unit disk.

Metric evaluation, Busemann-Hausdorff areas, the variational conditions
along origin-centred circles, conjugate-point checks and a discretized
area-maximizing optimizer.
"""

from .curves import Curve, circle, make_polar_curve
from .errors import FinslerIsoError
from .measures import area_double_integral, area_line_integral, bh_density_closed, curve_length
from .metric import finsler_norm, phi
from .variational import lambda0

__version__ = "0.1.0"

__all__ = [
    "Curve",
    "FinslerIsoError",
    "area_double_integral",
    "area_line_integral",
    "bh_density_closed",
    "circle",
    "curve_length",
    "finsler_norm",
    "lambda0",
    "make_polar_curve",
    "phi",
]
