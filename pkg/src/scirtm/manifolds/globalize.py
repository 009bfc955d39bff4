"""
Globalized invariant curves as polylines in double precision.
"""

import dataclasses
import logging
import math
from typing import List, Optional, Union

import numpy as np
import pandas as pd

from ..core_map import TWO_PI, PhasePoint, RtmParams
from .series import Branch, ManifoldSeries
from .spo import SymmetricPeriodicOrbit

logger = logging.getLogger(__name__)

MAX_GAP = 1e-3
MAX_POINTS = 200_000
N_INITIAL = 200
MAX_REFINEMENTS = 60
WINDOW_W = 2.0


@dataclasses.dataclass(frozen=True)
class Polyline:
    """
    Vertices of a curve in order along it, with lifted phases.

    ``truncated`` is set when the curve left [-pi, pi) x [-2, 2] (or the
    point cap was hit) and was cut there.
    """

    points: np.ndarray
    truncated: bool = False
    branch: Optional[Branch] = None
    base_point: Optional[PhasePoint] = None

    def __len__(self) -> int:
        return len(self.points)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"psi": self.points[:, 0], "w": self.points[:, 1]})


def _eta(psi: np.ndarray, mu: float) -> np.ndarray:
    return TWO_PI * (np.cos(psi) - 1.0) - mu * np.sin(psi)


def advance(points: np.ndarray, steps: int, mu: float) -> np.ndarray:
    """Applies f (steps > 0) or its inverse (steps < 0) to an (k, 2) array of lifted points."""
    psi = points[:, 0].copy()
    w = points[:, 1].copy()
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(abs(steps)):
            if steps > 0:
                psi = psi + w
                w = w + _eta(psi, mu)
            else:
                w = w - _eta(psi, mu)
                psi = psi - w
    return np.column_stack([psi, w])


def _outside(points: np.ndarray) -> np.ndarray:
    psi, w = points[:, 0], points[:, 1]
    finite = np.isfinite(psi) & np.isfinite(w)
    return ~finite | (np.abs(w) > WINDOW_W) | (psi < -math.pi) | (psi >= math.pi)


def globalize(
    series: ManifoldSeries,
    n_fund_domains: int,
    params: Optional[RtmParams] = None,
    sign: int = 1,
    max_gap: float = MAX_GAP,
    max_points: int = MAX_POINTS,
) -> Polyline:
    """
    Image of a fundamental segment of the branch under n_fund_domains
    applications of f^(+-period), resampled until adjacent vertices are less
    than ``max_gap`` apart.

    A negative multiplier flips the branch on every step, so the stepping map
    is then taken twice per domain.

    Args:
        series (ManifoldSeries): The solved branch.
        n_fund_domains (int): Number of domains after the first; 0 returns the
            fundamental segment itself.
        params (RtmParams): Map parameters; defaults to the series' mu.
        sign (int): +1 or -1, which half of the branch.
    Returns:
        Polyline: The vertices in order along the curve.
    """
    if n_fund_domains < 0:
        raise ValueError(f"n_fund_domains must be >= 0, got {n_fund_domains}")
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    mu = params.mu if params is not None else series.mu
    expansion = float(series.expansion)
    steps = series.period
    if series.multiplier < 0:
        expansion *= expansion
        steps *= 2
    if series.branch is Branch.STABLE:
        steps = -steps

    t = sign * np.geomspace(1.0 / expansion, 1.0, N_INITIAL)
    segments: List[np.ndarray] = []
    total = 0
    truncated = False
    for j in range(n_fund_domains + 1):
        pts = advance(series.evaluate_float(t), j * steps, mu)
        for _ in range(MAX_REFINEMENTS):
            gaps = np.hypot(*np.diff(pts, axis=0).T)
            wide = np.flatnonzero(gaps > max_gap)
            if wide.size == 0 or total + len(t) + wide.size > max_points:
                break
            # 几何中点插值
            mid = sign * np.sqrt(t[wide] * t[wide + 1])
            new = advance(series.evaluate_float(mid), j * steps, mu)
            t = np.insert(t, wide + 1, mid)
            pts = np.insert(pts, wide + 1, new, axis=0)
        outside = np.flatnonzero(_outside(pts))
        if outside.size:
            pts = pts[: outside[0]]
            truncated = True
        segments.append(pts if j == 0 else pts[1:])
        total += len(segments[-1])
        if truncated:
            logger.warning(f"{series.branch.value} curve left the window in domain {j}; truncated")
            break
        if total >= max_points:
            truncated = True
            logger.warning(f"{series.branch.value} curve hit the {max_points}-point cap in domain {j}")
            break
    points = np.concatenate(segments) if segments else np.empty((0, 2))
    logger.debug(f"globalized {series.branch.value} curve: {len(points)} vertices")
    return Polyline(points=points, truncated=truncated, branch=series.branch, base_point=series.base_point)


def orbit_polylines(
    polyline: Polyline,
    spo: Union[SymmetricPeriodicOrbit, int],
    params: RtmParams,
) -> List[Polyline]:
    """
    The polyline followed by its images under f, f^2, ..., f^(n-1): the same
    branch at every point of an n-periodic orbit.
    """
    n = spo.period if isinstance(spo, SymmetricPeriodicOrbit) else int(spo)
    out = [polyline]
    pts = polyline.points
    for _ in range(1, n):
        pts = advance(pts, 1, params.mu)
        base = out[-1].base_point
        if base is not None:
            moved = advance(np.array([base], dtype=float), 1, params.mu)[0]
            base = PhasePoint(float(moved[0]), float(moved[1]))
        out.append(dataclasses.replace(polyline, points=pts, base_point=base))
    return out
