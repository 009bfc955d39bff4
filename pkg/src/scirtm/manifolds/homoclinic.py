"""
Primary homoclinic points of p_h and the area of the lobe between them.

The unstable curve of p_h leaves along (1, lambda - 1), turns clockwise around
p_s, and meets Fix(r0) at A before it meets Fix(r1) at B. The lobe bounded by
the unstable arc from A to B and the stable arc from B back to A has area
|W_A - W_B|, the difference of the actions of the two homoclinic orbits.
"""

import dataclasses
import enum
import logging
import math
from typing import List, Optional, Sequence

import numpy as np

from ..core_map import RtmParams, params_from_mu
from ..errors import DomainError, InsufficientDataError, NotFoundError, PrecisionError
from ..parallel import run_jobs
from ..stats import PowerFit, fit_powers, jackknife
from . import mpmap
from .precision import PrecisionContext
from .series import DEFAULT_ORDER, Branch, ManifoldSeries, unstable_series
from .spo import SymmetryLine

logger = logging.getLogger(__name__)

# 渐近公式的首项系数
A0 = 1.42098502709189813726617259727e5
SPLITTING_EXPONENT = 2.0 * math.pi**2

SAMPLES_PER_DOMAIN = 64
MAX_DOMAINS = 400
QUADRATURE_DPS = 30
WINDOW_W = 2.0
FIT_POWERS = (0, 2, 4, 6)


class LobeMethod(str, enum.Enum):
    ACTION_SUM = "action_sum"
    LOOP_QUADRATURE = "loop_quadrature"


@dataclasses.dataclass(frozen=True)
class HomoclinicPoint:
    line: SymmetryLine
    s: object
    psi: object
    w: object

    @property
    def point(self):
        return float(self.psi), float(self.w)


@dataclasses.dataclass(frozen=True)
class LobeResult:
    """
    Attributes:
        mu, h: Map parameter and characteristic exponent of p_h.
        area: Lobe area at working precision.
        method: How ``area`` was obtained.
        digits: Significant digits that survive the action cancellation.
        quadrature: The loop-integral area, when it was computed.
    """

    mu: float
    h: float
    area: object
    method: LobeMethod
    digits: int
    quadrature: Optional[object] = None
    mantissa_bits: int = 256

    @property
    def agreement(self) -> Optional[float]:
        """Relative difference between the action sum and the loop integral."""
        if self.quadrature is None:
            return None
        return float(abs(self.area - self.quadrature) / self.area)


@dataclasses.dataclass(frozen=True)
class SplittingFit:
    h: np.ndarray
    areas: np.ndarray
    scaled: np.ndarray
    fit: PowerFit
    jackknife_a0: float

    @property
    def a0(self) -> float:
        return float(self.fit.coefficients[0])

    @property
    def a1(self) -> float:
        return float(self.fit.coefficients[1])

    @property
    def residuals(self) -> np.ndarray:
        return self.fit.residuals


def splitting_estimate(h: float) -> float:
    """Leading asymptotic lobe area a0 * exp(-2 pi^2 / h)."""
    if h <= 0:
        raise DomainError(f"h must be positive, got {h}")
    return A0 * math.exp(-SPLITTING_EXPONENT / h)


def _line_value(mp, psi, w, mu, line: SymmetryLine):
    if line is SymmetryLine.FIX_R0:
        return w
    return w - mpmap.eta(mp, psi, mu) / 2


def _check_p_h_branch(series: ManifoldSeries):
    if series.branch is not Branch.UNSTABLE or series.period != 1:
        raise DomainError("homoclinic points need the unstable series of p_h")


def primary_homoclinic(
    series: ManifoldSeries,
    line: SymmetryLine,
    samples_per_domain: int = SAMPLES_PER_DOMAIN,
    max_domains: int = MAX_DOMAINS,
) -> HomoclinicPoint:
    """
    The first crossing of the unstable curve of p_h with a symmetry line.

    The curve is scanned geometrically from s = 1/lambda and the bracketed
    crossing is bisected to working precision.

    Raises:
        NotFoundError: if the curve leaves [-pi, pi) x [-2, 2] or no crossing
            appears within ``max_domains`` fundamental domains.
    """
    _check_p_h_branch(series)
    line = SymmetryLine(line)
    mp = series.ctx
    mu = mp.mpf(series.mu)

    def g(s):
        psi, w = series.point(s)
        return _line_value(mp, psi, w, mu, line), psi, w

    factor = series.multiplier ** (mp.one / samples_per_domain)
    a = 1 / series.multiplier
    ga, _, _ = g(a)
    for _ in range(samples_per_domain * max_domains):
        b = a * factor
        gb, psi, w = g(b)
        if abs(w) > WINDOW_W or not (-mp.pi <= psi < mp.pi):
            raise NotFoundError(f"unstable curve left the window before reaching {line.value}")
        if gb == 0 or ga * gb < 0:
            break
        a, ga = b, gb
    else:
        raise NotFoundError(f"no crossing with {line.value} within {max_domains} domains")

    for _ in range(series.precision.mantissa_bits + 8):
        if gb == 0:
            a = b
            break
        mid = (a + b) / 2
        gm, _, _ = g(mid)
        if ga * gm <= 0:
            b, gb = mid, gm
        else:
            a, ga = mid, gm
    s = (a + b) / 2
    psi, w = series.point(s)
    # 投影到对称线上
    w = mp.zero if line is SymmetryLine.FIX_R0 else mpmap.eta(mp, psi, mu) / 2
    logger.debug(f"primary homoclinic on {line.value}: s={mp.nstr(s, 15)} psi={mp.nstr(psi, 15)}")
    return HomoclinicPoint(line=line, s=s, psi=psi, w=w)


def _potential(mp, psi, mu, psi_h):
    def raw(x):
        return 2 * mp.pi * mp.sin(x) - 2 * mp.pi * x + mu * mp.cos(x)

    return raw(psi) - raw(psi_h)


def orbit_action(series: ManifoldSeries, point: HomoclinicPoint) -> object:
    """
    Sum of L(psi_n, psi_n+1) over the whole homoclinic orbit through ``point``.

    Backward iterates come from the series; forward iterates are their images
    under the reversor whose fixed set holds the point.
    """
    mp = series.ctx
    mu = mp.mpf(series.mu)
    psi_h = series.coeffs[0][0]
    lam = series.multiplier
    threshold = mp.mpf(10) ** (-(mp.dps + 10))

    def reflect(psi, w):
        if point.line is SymmetryLine.FIX_R0:
            return mpmap.r0(mp, psi, w)
        return mpmap.r1(mp, psi, w, mu)

    def action(psi, psi1):
        return (psi1 - psi) ** 2 / 2 + _potential(mp, psi1, mu, psi_h)

    total = mp.zero
    back = (point.psi, point.w)
    fwd = (point.psi, point.w)
    n = 0
    while True:
        prev = series.point(point.s / lam ** (n + 1))
        nxt = reflect(*prev)
        backward_term = action(prev[0], back[0])
        forward_term = action(fwd[0], nxt[0])
        total += backward_term + forward_term
        back, fwd = prev, nxt
        n += 1
        if abs(backward_term) < threshold and abs(forward_term) < threshold:
            break
        if n > 100_000:
            raise PrecisionError("homoclinic action sum does not converge", 2 * series.precision.mantissa_bits)
    logger.debug(f"action sum on {point.line.value} converged after {n} terms")
    return total


def _split_points(series: ManifoldSeries, lo, hi) -> List:
    """[lo, ..., hi] with the powers of lambda in between, where the step count changes."""
    mp = series.ctx
    points = [lo]
    edge = mp.one
    while edge < hi:
        if edge > lo:
            points.append(edge)
        edge *= series.multiplier
    points.append(hi)
    return points


def loop_quadrature(series: ManifoldSeries, a: HomoclinicPoint, b: HomoclinicPoint) -> object:
    """
    |integral of w dpsi| around the lobe: the unstable arc from A to B, then
    the stable arc from B to A, the latter being the r0-image of the
    unstable arc between s_B/lambda and s_A.
    """
    mp = series.ctx
    with mp.workdps(min(mp.dps, QUADRATURE_DPS)):
        def unstable(s):
            (psi, w), (dpsi, _) = series.point_and_tangent(s)
            return w * dpsi

        def stable(s):
            (psi, w), (dpsi, dw) = series.point_and_tangent(s)
            return -w * (dpsi + dw)

        s_a, s_b = a.s, b.s
        low = s_b / series.multiplier
        if not (low < s_a < s_b):
            logger.warning("primary homoclinic points are not interleaved as expected")
        outer = mp.quad(unstable, _split_points(series, s_a, s_b))
        inner = mp.quad(stable, _split_points(series, low, s_a))
        area = abs(outer + inner)
    return +area


def _recommended_bits(estimate: float) -> int:
    digits = -math.log10(estimate) + 25
    bits = math.ceil(digits / math.log10(2))
    return 64 * math.ceil(bits / 64)


def lobe_area(
    mu: float,
    ctx: PrecisionContext = PrecisionContext(),
    order: int = DEFAULT_ORDER,
    cross_check: bool = True,
) -> LobeResult:
    """
    Area of the lobe between the primary homoclinic points of p_h.

    Args:
        mu (float): Map parameter in (0, 4).
        ctx (PrecisionContext): Working precision.
        order (int): Initial series order.
        cross_check (bool): Also compute the loop integral of w dpsi.
    Returns:
        LobeResult: The action-sum area, with the quadrature value if requested.
    Raises:
        PrecisionError: if the expected area lies below the round-off floor.
    """
    if not 0.0 < mu < 4.0:
        raise DomainError(f"lobe areas need 0 < mu < 4, got {mu}")
    params: RtmParams = params_from_mu(mu)
    estimate = splitting_estimate(params.h)
    if math.log10(estimate) < -(ctx.dps - 15):
        bits = _recommended_bits(estimate)
        raise PrecisionError(
            f"lobe area ~{estimate:.1e} at mu={mu} needs about {bits} bits, have {ctx.mantissa_bits}",
            bits,
        )

    series = unstable_series(None, order, ctx, params)
    a = primary_homoclinic(series, SymmetryLine.FIX_R0)
    b = primary_homoclinic(series, SymmetryLine.FIX_R1)
    mp = ctx.ctx
    w_a = orbit_action(series, a)
    w_b = orbit_action(series, b)
    area = abs(w_a - w_b)
    if area == 0:
        raise PrecisionError(f"lobe area vanished at mu={mu}", 2 * ctx.mantissa_bits)
    scale = max(abs(w_a), abs(w_b))
    digits = max(0, int(mp.dps - max(0, float(mp.log10(scale / area)))) - 5)
    quadrature = loop_quadrature(series, a, b) if cross_check else None
    result = LobeResult(
        mu=mu,
        h=params.h,
        area=area,
        method=LobeMethod.ACTION_SUM,
        digits=digits,
        quadrature=quadrature,
        mantissa_bits=ctx.mantissa_bits,
    )
    logger.info(
        f"lobe area at mu={mu}: {mp.nstr(area, 16)} ({digits} digits)"
        + (f", quadrature agrees to {result.agreement:.1e}" if quadrature is not None else "")
    )
    return result


def _lobe_job(mu: float, bits: int, order: int) -> float:
    return float(lobe_area(mu, PrecisionContext(bits), order, cross_check=False).area)


def splitting_fit(
    h_grid: Sequence[float],
    ctx: PrecisionContext = PrecisionContext(512),
    order: int = DEFAULT_ORDER,
    **job_options,
) -> SplittingFit:
    """
    Fits |L|(h) * exp(2 pi^2 / h) by a polynomial in h^2.

    Args:
        h_grid: Exponents h; each maps to mu = 2 (cosh h - 1).
        ctx (PrecisionContext): Working precision of every lobe.
        **job_options: Passed on to :func:`scirtm.parallel.run_jobs`.
    Returns:
        SplittingFit: a0 and a1 with the residuals and the a0 obtained without
        the largest h.
    Raises:
        InsufficientDataError: with fewer than four grid points.
    """
    h = np.sort(np.asarray(h_grid, dtype=float))[::-1]
    if len(h) < len(FIT_POWERS):
        raise InsufficientDataError(f"need at least {len(FIT_POWERS)} values of h, got {len(h)}")
    if np.any(h <= 0):
        raise DomainError("every h must be positive")
    mus = 2.0 * (np.cosh(h) - 1.0)
    areas = np.asarray(
        run_jobs(
            _lobe_job,
            args_list=[(float(mu), ctx.mantissa_bits, order) for mu in mus],
            **job_options,
        ),
        dtype=float,
    )
    # h 由 mu 重新计算，与 lobe_area 一致
    h_used = np.arccosh(1.0 + mus / 2.0)
    scaled = areas * np.exp(SPLITTING_EXPONENT / h_used)
    fit = fit_powers(h_used, scaled, FIT_POWERS)
    # h 按降序排列，0 号即最大的 h
    dropped = jackknife(h_used, scaled, FIT_POWERS, drop=[0])
    logger.info(f"splitting fit: a0={fit.coefficients[0]:.12e} a1={fit.coefficients[1]:.3e}")
    return SplittingFit(
        h=h_used,
        areas=areas,
        scaled=scaled,
        fit=fit,
        jackknife_a0=float(dropped.coefficients[0]),
    )


def scaled_lobe_sequence(h_values: Sequence[float], areas: Sequence[float], c: float) -> np.ndarray:
    """|L| * exp(c / h) along a grid; it decays to 0 as h -> 0 for c < 2 pi^2."""
    h = np.asarray(h_values, dtype=float)
    return np.asarray(areas, dtype=float) * np.exp(c / h)
