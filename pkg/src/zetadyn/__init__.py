"""Riemann zeta zeros as fixed points of nu-maps and Newton maps.

Modules: ``special`` (zeta, eta, gamma functions), ``family`` (the
analytic functions studied), ``zeros`` (critical-line zeros), ``dynamics``
(maps, multipliers, indices, orbits), ``audit``, ``rotation`` (rotation
numbers and continued fractions), ``basin`` (basin rasters) and ``cli``.
"""
from .audit import RHVerdict, rh_audit
from .basin import BasinRaster, Palette, RenderSpec, boundary_estimate, emit_image, render
from .dynamics import (FixedPointReport, MapKind, OrbitResult, apply_map, fixed_point_report,
                       index_quadrature, orbit)
from .errors import ZetadynError
from .family import AnalyticFunction, eval_family
from .rotation import ContinuedFractionExpansion, continued_fraction, gamma_to_theta, rotation_row
from .special import EvalResult, eval_zeta, functional_equation_residual
from .zeros import ZeroRecord, find_zeros, load_zeros, store_zeros

__version__ = "0.1.0"

__all__ = [
    "AnalyticFunction", "BasinRaster", "ContinuedFractionExpansion", "EvalResult",
    "FixedPointReport", "MapKind", "OrbitResult", "Palette", "RHVerdict", "RenderSpec",
    "ZeroRecord", "ZetadynError", "apply_map", "boundary_estimate", "continued_fraction",
    "emit_image", "eval_family", "eval_zeta", "find_zeros", "fixed_point_report",
    "functional_equation_residual", "gamma_to_theta", "index_quadrature", "load_zeros",
    "orbit", "render", "rh_audit", "store_zeros", "rotation_row",
]
