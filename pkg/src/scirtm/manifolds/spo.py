"""
Symmetric periodic orbits (SPOs) located on the symmetry lines of the map.

With f = r1 o r0, a point q of Fix(r0) whose k-th iterate lands on Fix(r1)
lies on an orbit of period 2k - 1, and one whose k-th iterate lands back on
Fix(r0) on an orbit of period 2k. The same holds with the roles of the two
lines exchanged, so an (m, n)-SPO is found by a 1-D root search along a line.
"""

import dataclasses
import enum
import logging
import math
from typing import List, Optional, Tuple

import numpy as np
from scipy import optimize

from ..core_map import (
    TWO_PI,
    LinearType,
    PhasePoint,
    RtmParams,
    classify_trace,
    eta,
    jacobian,
    wrap_phase,
)
from ..errors import DomainError, NotFoundError, ToleranceError
from ..local_analysis import ResonanceId
from . import mpmap
from .precision import PrecisionContext

logger = logging.getLogger(__name__)

PERIODICITY_TOL = 1e-9
N_SCAN = 20001
# scipy 要求 rtol >= 4 eps
BRENTQ_RTOL = 4 * np.finfo(float).eps
# 离 p_s 太近的根是 p_s 本身
P_S_EXCLUSION = 1e-6


class SymmetryLine(str, enum.Enum):
    FIX_R0 = "fix_r0"
    FIX_R1 = "fix_r1"


@dataclasses.dataclass(frozen=True)
class SymmetricPeriodicOrbit:
    """
    One point of an (m, n) symmetric periodic orbit on a symmetry line.

    ``psi_mp`` and ``w_mp`` hold the point at working precision once the
    orbit has been through :func:`refine_spo`.
    """

    resonance: ResonanceId
    line: SymmetryLine
    psi: float
    w: float
    trace: float
    mu: float
    psi_mp: Optional[object] = None
    w_mp: Optional[object] = None
    mantissa_bits: Optional[int] = None

    @property
    def point(self) -> PhasePoint:
        return PhasePoint(self.psi, self.w)

    @property
    def period(self) -> int:
        return self.resonance.n

    @property
    def linear_type(self) -> LinearType:
        return classify_trace(self.trace)

    @property
    def refined(self) -> bool:
        return self.psi_mp is not None

    def orbit(self, params: RtmParams) -> np.ndarray:
        """The n lifted points q, f(q), ..., f^(n-1)(q) as an (n, 2) array."""
        pts = np.empty((self.period, 2))
        psi, w = self.psi, self.w
        for k in range(self.period):
            pts[k] = psi, w
            psi = psi + w
            w = w + eta(psi, params)
        return pts


def _plan(n: int, line: SymmetryLine) -> Tuple[int, SymmetryLine]:
    """Number of iterates and the line they must reach for period n."""
    if line is SymmetryLine.FIX_R0:
        return ((n + 1) // 2, SymmetryLine.FIX_R1) if n % 2 else (n // 2, SymmetryLine.FIX_R0)
    return ((n - 1) // 2, SymmetryLine.FIX_R0) if n % 2 else (n // 2, SymmetryLine.FIX_R1)


def _eta_array(psi: np.ndarray, mu: float) -> np.ndarray:
    return TWO_PI * (np.cos(psi) - 1.0) - mu * np.sin(psi)


def point_on_line(psi, line: SymmetryLine, params: RtmParams):
    """(psi, w) on the given symmetry line; psi may be an array."""
    psi = np.asarray(psi, dtype=float)
    if line is SymmetryLine.FIX_R0:
        return psi, np.zeros_like(psi)
    return psi, 0.5 * _eta_array(psi, params.mu)


def _condition(psi: np.ndarray, n: int, line: SymmetryLine, params: RtmParams) -> np.ndarray:
    k, target = _plan(n, line)
    p, w = point_on_line(psi, line, params)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(k):
            p = p + w
            w = w + _eta_array(p, params.mu)
        if target is SymmetryLine.FIX_R0:
            return w
        return w - 0.5 * _eta_array(p, params.mu)


def _scan_window(n: int) -> Tuple[float, float]:
    return (-math.pi, math.pi) if n == 1 else (-1.0, 1.0)


def _monodromy_trace(psi: float, w: float, n: int, params: RtmParams) -> float:
    m = np.eye(2)
    for _ in range(n):
        m = jacobian(PhasePoint(psi, w), params) @ m
        psi = psi + w
        w = w + eta(psi, params)
    return float(np.trace(m))


def _returns(psi: float, w: float, d: int, params: RtmParams, tol: float) -> bool:
    p0, w0 = psi, w
    for _ in range(d):
        psi = psi + w
        w = w + eta(psi, params)
    dpsi = psi - p0
    return abs(dpsi - TWO_PI * round(dpsi / TWO_PI)) < tol and abs(w - w0) < tol


def _winding(psi: float, w: float, n: int, params: RtmParams) -> int:
    """Clockwise turns around p_s over n steps, rounded."""
    total = 0.0
    phi = math.atan2(-w, wrap_phase(psi))
    for _ in range(n):
        psi = psi + w
        w = w + eta(psi, params)
        nxt = math.atan2(-w, wrap_phase(psi))
        total += wrap_phase(nxt - phi)
        phi = nxt
    return round(total / TWO_PI)


def spo_candidates(
    r: ResonanceId,
    line: SymmetryLine,
    params: RtmParams,
    n_scan: int = N_SCAN,
) -> List[SymmetricPeriodicOrbit]:
    """
    Every verified (m, n)-periodic point on a symmetry line inside the scan
    window, ordered by distance from p_s.
    """
    line = SymmetryLine(line)
    n = r.n
    lo, hi = _scan_window(n)
    grid = np.linspace(lo, hi, n_scan, endpoint=False)
    values = _condition(grid, n, line, params)

    def g(x):
        return float(_condition(np.array([x]), n, line, params)[0])

    roots = []
    finite = np.isfinite(values)
    for a in range(n_scan - 1):
        if not (finite[a] and finite[a + 1]):
            continue
        if values[a] == 0.0:
            roots.append(grid[a])
        elif values[a] * values[a + 1] < 0.0:
            roots.append(optimize.brentq(g, grid[a], grid[a + 1], xtol=1e-15, rtol=BRENTQ_RTOL))

    found: List[SymmetricPeriodicOrbit] = []
    for root in roots:
        psi, w = (float(v) for v in point_on_line(root, line, params))
        if math.hypot(psi, w) < P_S_EXCLUSION:
            continue
        trace = _monodromy_trace(psi, w, n, params)
        tol = PERIODICITY_TOL * (1.0 + abs(trace))
        if not _returns(psi, w, n, params, tol):
            continue
        if any(_returns(psi, w, d, params, tol) for d in range(1, n) if n % d == 0):
            continue
        if (_winding(psi, w, n, params) - r.m) % n != 0:
            continue
        if any(abs(psi - c.psi) < 1e-9 and abs(w - c.w) < 1e-9 for c in found):
            continue
        found.append(
            SymmetricPeriodicOrbit(resonance=r, line=line, psi=psi, w=w, trace=trace, mu=params.mu)
        )
    found.sort(key=lambda c: math.hypot(c.psi, c.w))
    logger.debug(f"{len(found)} candidates for {r} on {line.value} at mu={params.mu}")
    return found


def find_spo(
    r: ResonanceId,
    line: SymmetryLine,
    params: RtmParams,
    kind: Optional[LinearType] = None,
    n_scan: int = N_SCAN,
) -> SymmetricPeriodicOrbit:
    """
    Locates the point of an (m, n) symmetric periodic orbit on a symmetry line.

    Args:
        r (ResonanceId): The resonance; (0, 1) returns p_h.
        line (SymmetryLine): Fix(r0) or Fix(r1).
        params (RtmParams): Map parameters.
        kind (Optional[LinearType]): Restrict to elliptic or hyperbolic orbits.
    Returns:
        SymmetricPeriodicOrbit: The qualifying point nearest to p_s.
    Raises:
        NotFoundError: if no such point lies in the scan window.
    """
    for candidate in spo_candidates(r, line, params, n_scan=n_scan):
        if kind is None or candidate.linear_type is LinearType(kind):
            return candidate
    what = f"{LinearType(kind).value} " if kind is not None else ""
    raise NotFoundError(f"no {what}{r} SPO on {SymmetryLine(line).value} at mu={params.mu}")


def _mp_condition(ctx, psi, n: int, line: SymmetryLine, mu):
    k, target = _plan(n, line)
    w = ctx.zero if line is SymmetryLine.FIX_R0 else mpmap.eta(ctx, psi, mu) / 2
    psi, w = mpmap.iterate(ctx, psi, w, mu, k)
    if target is SymmetryLine.FIX_R0:
        return w
    return w - mpmap.eta(ctx, psi, mu) / 2


def refine_spo(
    spo: SymmetricPeriodicOrbit, ctx: PrecisionContext = PrecisionContext()
) -> SymmetricPeriodicOrbit:
    """
    Polishes an SPO point to working precision along its symmetry line.

    Raises:
        ToleranceError: if the polished condition is not below the residual target.
    """
    mp = ctx.ctx
    mu = mp.mpf(spo.mu)
    n = spo.period

    def g(x):
        return _mp_condition(mp, x, n, spo.line, mu)

    try:
        psi = mp.findroot(g, mp.mpf(spo.psi), tol=mp.eps**2, maxsteps=200, verify=False)
    except (ValueError, ZeroDivisionError) as e:
        raise DomainError(f"refinement of {spo.resonance} failed: {e}")
    residual = abs(g(psi))
    if residual > ctx.residual_target:
        raise ToleranceError(
            f"{spo.resonance} SPO refined only to {mp.nstr(residual, 5)}", float(residual)
        )
    w = mp.zero if spo.line is SymmetryLine.FIX_R0 else mpmap.eta(mp, psi, mu) / 2
    m, _ = mpmap.monodromy(mp, psi, w, mu, n)
    return dataclasses.replace(
        spo,
        psi=float(psi),
        w=float(w),
        trace=float(m[0][0] + m[1][1]),
        psi_mp=psi,
        w_mp=w,
        mantissa_bits=ctx.mantissa_bits,
    )
