"""
Transversal crossings between invariant curves.

A crossing of the unstable curve of one hyperbolic orbit with the stable
curve of another rules out invariant circles with rotation numbers between
theirs.
"""

import logging
from typing import List, Tuple, Union

import numpy as np

from ..core_map import LinearType, RtmParams
from ..errors import NotFoundError
from ..local_analysis import ResonanceId
from .globalize import Polyline, globalize, orbit_polylines
from .precision import PrecisionContext
from .series import DEFAULT_ORDER, stable_series, unstable_series
from .spo import SymmetryLine, find_spo

logger = logging.getLogger(__name__)

MIN_CROSSING_ANGLE = 1e-8

Curve = Union[Polyline, np.ndarray]


def _vertices(curve: Curve) -> np.ndarray:
    pts = curve.points if isinstance(curve, Polyline) else np.asarray(curve, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"a curve must be an (n, 2) array, got shape {pts.shape}")
    return pts[np.all(np.isfinite(pts), axis=1)]


def _nearest_direction(pts: np.ndarray, x: float, y: float) -> np.ndarray:
    a = pts[:-1]
    d = np.diff(pts, axis=0)
    length2 = np.einsum("ij,ij->i", d, d)
    with np.errstate(invalid="ignore", divide="ignore"):
        u = np.clip(((x - a[:, 0]) * d[:, 0] + (y - a[:, 1]) * d[:, 1]) / length2, 0.0, 1.0)
    u = np.nan_to_num(u)
    dist = np.hypot(a[:, 0] + u * d[:, 0] - x, a[:, 1] + u * d[:, 1] - y)
    return d[int(np.argmin(dist))]


def crossings(curve_a: Curve, curve_b: Curve) -> List[Tuple[float, float, float]]:
    """
    Isolated intersection points of two polylines with their crossing angles.

    Returns:
        list of (psi, w, angle): angle in [0, pi/2] between the two segments.
    """
    import shapely
    from shapely.geometry import LineString

    a = _vertices(curve_a)
    b = _vertices(curve_b)
    if len(a) < 2 or len(b) < 2:
        return []
    inter = LineString(a).intersection(LineString(b))
    out = []
    for part in shapely.get_parts(inter):
        # 重合的线段不算横截
        if part.geom_type != "Point":
            continue
        da = _nearest_direction(a, part.x, part.y)
        db = _nearest_direction(b, part.x, part.y)
        cross = abs(da[0] * db[1] - da[1] * db[0])
        dot = abs(da[0] * db[0] + da[1] * db[1])
        out.append((part.x, part.y, float(np.arctan2(cross, dot))))
    return out


def obstruction_check(curve_a: Curve, curve_b: Curve, min_angle: float = MIN_CROSSING_ANGLE) -> bool:
    """True iff the curves cross somewhere at an angle above ``min_angle``."""
    found = [c for c in crossings(curve_a, curve_b) if c[2] > min_angle]
    if found:
        psi, w, angle = found[0]
        logger.info(f"transversal crossing at ({psi:.6f}, {w:.6f}), angle {angle:.2e}")
    return bool(found)


def resonance_obstruction(
    params: RtmParams,
    r: ResonanceId,
    ctx: PrecisionContext = PrecisionContext(),
    unstable_domains: int = 12,
    stable_domains: int = 6,
    order: int = DEFAULT_ORDER,
) -> bool:
    """
    Whether the unstable curve of p_h crosses a stable curve of the
    hyperbolic (m, n)-SPO transversally.

    Raises:
        NotFoundError: if neither symmetry line carries a hyperbolic (m, n)-SPO.
    """
    spo = None
    for line in SymmetryLine:
        try:
            spo = find_spo(r, line, params, kind=LinearType.HYPERBOLIC)
            break
        except NotFoundError:
            continue
    if spo is None:
        raise NotFoundError(f"no hyperbolic {r} SPO at mu={params.mu}")
    outer = globalize(unstable_series(None, order, ctx, params), unstable_domains, params)
    stable = stable_series(spo, order, ctx, params)
    for sign in (1, -1):
        branch = globalize(stable, stable_domains, params, sign=sign)
        for image in orbit_polylines(branch, spo, params):
            if obstruction_check(outer, image):
                return True
    return False
