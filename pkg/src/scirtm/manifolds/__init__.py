"""
Invariant curves of hyperbolic points, homoclinic lobes and splitting.
"""

from .globalize import Polyline, globalize, orbit_polylines
from .homoclinic import (
    HomoclinicPoint,
    LobeMethod,
    LobeResult,
    SplittingFit,
    lobe_area,
    loop_quadrature,
    orbit_action,
    primary_homoclinic,
    scaled_lobe_sequence,
    splitting_estimate,
    splitting_fit,
)
from .obstruction import crossings, obstruction_check, resonance_obstruction
from .precision import PrecisionContext
from .series import Branch, ManifoldSeries, reflect_series, stable_series, unstable_series
from .spo import (
    SymmetricPeriodicOrbit,
    SymmetryLine,
    find_spo,
    point_on_line,
    refine_spo,
    spo_candidates,
)

__all__ = [
    "Branch",
    "HomoclinicPoint",
    "LobeMethod",
    "LobeResult",
    "ManifoldSeries",
    "Polyline",
    "PrecisionContext",
    "SplittingFit",
    "SymmetricPeriodicOrbit",
    "SymmetryLine",
    "crossings",
    "find_spo",
    "globalize",
    "lobe_area",
    "loop_quadrature",
    "obstruction_check",
    "orbit_action",
    "orbit_polylines",
    "point_on_line",
    "primary_homoclinic",
    "reflect_series",
    "refine_spo",
    "resonance_obstruction",
    "scaled_lobe_sequence",
    "splitting_estimate",
    "splitting_fit",
    "spo_candidates",
    "stable_series",
    "unstable_series",
]
