"""
Power-series parameterization of the invariant curves of hyperbolic points.

A branch is z(t) = z0 + sum_k c_k t^k with F(z(t)) = z(lambda t), where F is
f^period (or its inverse for a stable branch). The coefficients are solved one
order at a time: the order-k term of F(z(t)) computed with c_k = 0 gives R_k,
and c_k solves (lambda^k I - M) c_k = R_k with M = DF(z0). Composition with
cos and sin uses the recurrences of C = cos u and S = sin u along u(t).
"""

import dataclasses
import enum
import functools
import logging
from typing import List, Optional, Tuple, Union

import numpy as np

from ..core_map import PhasePoint, RtmParams, map_forward
from ..errors import DomainError, NonHyperbolicError, ToleranceError
from . import mpmap
from .precision import PrecisionContext
from .spo import SymmetricPeriodicOrbit, refine_spo

logger = logging.getLogger(__name__)

DEFAULT_ORDER = 100
MAX_ORDER = 400
# 尾项相对于残差目标的余量
TAIL_MARGIN = 100
RESIDUAL_SAMPLES = 8

Base = Union[None, PhasePoint, SymmetricPeriodicOrbit]


class Branch(str, enum.Enum):
    UNSTABLE = "unstable"
    STABLE = "stable"


@dataclasses.dataclass(frozen=True)
class ManifoldSeries:
    """
    A solved branch of an invariant curve.

    Attributes:
        base_point: The hyperbolic point the curve emanates from.
        multiplier: lambda of F(z(t)) = z(lambda t); |lambda| > 1 for an
            unstable branch and < 1 for a stable one.
        coeffs: (psi_k, w_k) for k = 0..N; entry 0 is the base point.
        branch: Unstable or stable.
        period: 1 for p_h, n for a point of an (m, n)-orbit.
        mu: The map parameter.
        residual: Conjugacy residual on the fundamental domain.
    """

    base_point: PhasePoint
    multiplier: object
    coeffs: Tuple[Tuple[object, object], ...]
    branch: Branch
    period: int
    mu: float
    precision: PrecisionContext
    residual: object = None

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def ctx(self):
        return self.precision.ctx

    @property
    def expansion(self):
        """The factor |t| grows by under one application of the stepping map."""
        return abs(self.multiplier) if self.branch is Branch.UNSTABLE else 1 / abs(self.multiplier)

    def evaluate(self, t):
        """z(t) at working precision by Horner's rule."""
        mp = self.ctx
        t = mp.mpf(t)
        psi = mp.zero
        w = mp.zero
        for cp, cw in reversed(self.coeffs):
            psi = psi * t + cp
            w = w * t + cw
        return psi, w

    def derivative(self, t):
        mp = self.ctx
        t = mp.mpf(t)
        dpsi = mp.zero
        dw = mp.zero
        for k in range(self.order, 0, -1):
            cp, cw = self.coeffs[k]
            dpsi = dpsi * t + k * cp
            dw = dw * t + k * cw
        return dpsi, dw

    def _steps(self, s) -> Tuple[object, int]:
        """Reduces s to |t| <= 1 and returns t with the number of steps."""
        mp = self.ctx
        t = mp.mpf(s)
        k = 0
        while abs(t) > 1:
            if self.branch is Branch.UNSTABLE:
                t = t / self.multiplier
            else:
                t = t * self.multiplier
            k += 1
        return t, k

    def _step(self, psi, w, mu):
        mp = self.ctx
        for _ in range(self.period):
            if self.branch is Branch.UNSTABLE:
                psi, w = mpmap.forward(mp, psi, w, mu)
            else:
                psi, w = mpmap.inverse(mp, psi, w, mu)
        return psi, w

    def point(self, s):
        """
        The global parameterization: F^k(z(s / lambda^k)) with the smallest k
        that brings the argument into the fundamental disc.
        """
        mp = self.ctx
        mu = mp.mpf(self.mu)
        t, k = self._steps(s)
        psi, w = self.evaluate(t)
        for _ in range(k):
            psi, w = self._step(psi, w, mu)
        return psi, w

    def point_and_tangent(self, s):
        mp = self.ctx
        mu = mp.mpf(self.mu)
        t, k = self._steps(s)
        psi, w = self.evaluate(t)
        dpsi, dw = self.derivative(t)
        scale = (1 / self.multiplier if self.branch is Branch.UNSTABLE else self.multiplier) ** k
        dpsi, dw = dpsi * scale, dw * scale
        tangent_step = (
            mpmap.tangent_forward if self.branch is Branch.UNSTABLE else mpmap.tangent_inverse
        )
        for _ in range(k * self.period):
            psi, w, dpsi, dw = tangent_step(mp, psi, w, dpsi, dw, mu)
        return (psi, w), (dpsi, dw)

    @functools.cached_property
    def float_coeffs(self) -> np.ndarray:
        return np.array([[float(cp), float(cw)] for cp, cw in self.coeffs])

    def evaluate_float(self, t: np.ndarray) -> np.ndarray:
        """z(t) in double precision for an array of |t| <= 1; returns (len(t), 2)."""
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape + (2,))
        for c in self.float_coeffs[::-1]:
            out = out * t[..., None] + c
        return out


def _fixed_point_mp(mp, psi: float, mu):
    """Polishes a fixed point (psi, 0) to working precision: eta(psi) = 0."""
    if psi == 0.0:
        return mp.zero
    return mp.findroot(lambda x: mpmap.eta(mp, x, mu), mp.mpf(psi))


def _base_orbit(base: Base, params: RtmParams, ctx: PrecisionContext):
    """Working-precision base point and period."""
    mp = ctx.ctx
    mu = mp.mpf(params.mu)
    if base is None:
        # p_h = (-2 phi_s, 0)，直接在工作精度下求
        return (-2 * mp.atan(mu / (2 * mp.pi)), mp.zero), 1
    if isinstance(base, SymmetricPeriodicOrbit):
        if not base.refined or base.mantissa_bits != ctx.mantissa_bits:
            base = refine_spo(base, ctx)
        return (base.psi_mp, base.w_mp), base.period
    p = PhasePoint(float(base[0]), float(base[1]))
    q = map_forward(p, params)
    if abs(q.psi - p.psi) > 1e-10 or abs(q.w - p.w) > 1e-10:
        raise DomainError(f"{p} is not a fixed point; pass a SymmetricPeriodicOrbit for periodic bases")
    return (_fixed_point_mp(mp, p.psi, mu), mp.zero), 1


def _eigen(mp, m, unstable: bool):
    """Multiplier and unit eigenvector of a 2x2 area-preserving matrix."""
    trace = m[0][0] + m[1][1]
    disc = trace * trace - 4
    if disc <= 0:
        raise NonHyperbolicError(f"base point is not hyperbolic (trace {mp.nstr(trace, 8)})")
    root = mp.sqrt(disc)
    lam = (trace + root) / 2 if trace > 0 else (trace - root) / 2
    if not unstable:
        lam = 1 / lam
    a, b = m[0]
    c, d = m[1]
    if abs(b) >= abs(c):
        v = (b, lam - a)
    else:
        v = (lam - d, c)
    norm = mp.sqrt(v[0] ** 2 + v[1] ** 2)
    v = (v[0] / norm, v[1] / norm)
    if v[0] < 0 or (v[0] == 0 and v[1] < 0):
        v = (-v[0], -v[1])
    return lam, v


class _Solver:
    """Order-by-order solution of the conjugacy equation along one base orbit."""

    def __init__(self, mp, point, period: int, mu, order: int):
        self.mp = mp
        self.mu = mu
        self.period = period
        self.order = order
        self.P = [[mp.zero] * (order + 1) for _ in range(period + 1)]
        self.W = [[mp.zero] * (order + 1) for _ in range(period + 1)]
        self.C = [[mp.zero] * (order + 1) for _ in range(period)]
        self.S = [[mp.zero] * (order + 1) for _ in range(period)]
        self.cos0 = []
        self.sin0 = []
        psi, w = point
        self.P[0][0], self.W[0][0] = psi, w
        for s in range(period):
            psi, w = mpmap.forward(mp, psi, w, mu)
            self.P[s + 1][0], self.W[s + 1][0] = psi, w
            self.C[s][0], self.S[s][0] = mp.one, mp.zero
            self.cos0.append(mp.cos(psi))
            self.sin0.append(mp.sin(psi))

    def _eta_k(self, s: int, k: int):
        """Order-k coefficient of eta along the (s+1)-th image."""
        mp = self.mp
        u, C, S = self.P[s + 1], self.C[s], self.S[s]
        ck = mp.zero
        sk = mp.zero
        for j in range(1, k + 1):
            ju = j * u[j]
            ck -= ju * S[k - j]
            sk += ju * C[k - j]
        ck /= k
        sk /= k
        C[k], S[k] = ck, sk
        cosk = self.cos0[s] * ck - self.sin0[s] * sk
        sink = self.sin0[s] * ck + self.cos0[s] * sk
        return 2 * mp.pi * cosk - self.mu * sink

    def propagate(self, k: int):
        for s in range(self.period):
            self.P[s + 1][k] = self.P[s][k] + self.W[s][k]
            self.W[s + 1][k] = self.W[s][k] + self._eta_k(s, k)

    def solve(self, lam, vec, m) -> List[Tuple[object, object]]:
        mp = self.mp
        self.P[0][1], self.W[0][1] = vec
        self.propagate(1)
        lam_k = lam
        for k in range(2, self.order + 1):
            lam_k = lam_k * lam
            self.P[0][k] = self.W[0][k] = mp.zero
            self.propagate(k)
            r_psi, r_w = self.P[self.period][k], self.W[self.period][k]
            # (lam^k I - M) c = R，Cramer 法则
            a, b = lam_k - m[0][0], -m[0][1]
            c, d = -m[1][0], lam_k - m[1][1]
            det = a * d - b * c
            self.P[0][k] = (r_psi * d - b * r_w) / det
            self.W[0][k] = (a * r_w - c * r_psi) / det
            self.propagate(k)
        return [(self.P[0][k], self.W[0][k]) for k in range(self.order + 1)]


def _rescale(mp, coeffs: List, tol) -> List:
    """Scales t so that the last terms of the series sit at the tail tolerance."""
    radius = None
    for k in range(max(1, len(coeffs) - 5), len(coeffs)):
        size = max(abs(coeffs[k][0]), abs(coeffs[k][1]))
        if size == 0:
            continue
        r = (tol / size) ** (mp.one / k)
        radius = r if radius is None else min(radius, r)
    if radius is None:
        return coeffs
    out = []
    scale = mp.one
    for cp, cw in coeffs:
        out.append((cp * scale, cw * scale))
        scale *= radius
    return out


def _residual(series: ManifoldSeries):
    """max |F(z(t)) - z(lambda t)| over t in [-1/|lambda|, 1/|lambda|]."""
    mp = series.ctx
    mu = mp.mpf(series.mu)
    lam = series.multiplier
    # F 把 t 映到 lam*t；稳定分支时 |lam| < 1
    reach = 1 / abs(lam) if abs(lam) > 1 else mp.one
    worst = mp.zero
    for j in range(1, RESIDUAL_SAMPLES + 1):
        for sign in (1, -1):
            t = sign * reach * j / RESIDUAL_SAMPLES
            psi, w = series.evaluate(t)
            for _ in range(series.period):
                psi, w = mpmap.forward(mp, psi, w, mu)
            zp, zw = series.evaluate(lam * t)
            worst = max(worst, abs(psi - zp), abs(w - zw))
    return worst


def _solve_series(base: Base, order: int, ctx: PrecisionContext, params: RtmParams, branch: Branch):
    mp = ctx.ctx
    mu = mp.mpf(params.mu)
    point, period = _base_orbit(base, params, ctx)
    m, _ = mpmap.monodromy(mp, point[0], point[1], mu, period)
    lam, vec = _eigen(mp, m, unstable=branch is Branch.UNSTABLE)
    target = ctx.residual_target
    n = max(2, int(order))
    achieved = None
    while True:
        coeffs = _Solver(mp, point, period, mu, n).solve(lam, vec, m)
        coeffs = _rescale(mp, coeffs, target / TAIL_MARGIN)
        series = ManifoldSeries(
            base_point=PhasePoint(float(point[0]), float(point[1])),
            multiplier=lam,
            coeffs=tuple(coeffs),
            branch=branch,
            period=period,
            mu=params.mu,
            precision=ctx,
        )
        achieved = _residual(series)
        logger.debug(
            f"{branch.value} series order {n} at mu={params.mu}: residual {mp.nstr(achieved, 3)}"
        )
        if achieved <= target:
            return dataclasses.replace(series, residual=achieved)
        if n >= MAX_ORDER:
            break
        n = min(2 * n, MAX_ORDER)
    raise ToleranceError(
        f"series residual {mp.nstr(achieved, 3)} above target {mp.nstr(target, 3)} at order {n}",
        float(achieved),
    )


def unstable_series(
    base: Base = None,
    order: int = DEFAULT_ORDER,
    ctx: PrecisionContext = PrecisionContext(),
    params: Optional[RtmParams] = None,
) -> ManifoldSeries:
    """
    Unstable branch of the invariant curve through a hyperbolic point.

    Args:
        base: None for p_h, a fixed PhasePoint, or a symmetric periodic orbit.
        order (int): Initial series order; doubled up to 400 until the
            conjugacy residual meets the precision target.
        ctx (PrecisionContext): Working precision.
        params (RtmParams): Map parameters.
    Returns:
        ManifoldSeries: The solved branch, t in [1/lambda, 1] being a fundamental domain.
    Raises:
        NonHyperbolicError: if |trace DF| <= 2 at the base.
        ToleranceError: if order 400 does not reach the residual target.
    """
    if params is None:
        raise DomainError("params are required")
    return _solve_series(base, order, ctx, params, Branch.UNSTABLE)


def stable_series(
    base: Base = None,
    order: int = DEFAULT_ORDER,
    ctx: PrecisionContext = PrecisionContext(),
    params: Optional[RtmParams] = None,
) -> ManifoldSeries:
    """Stable branch, solved directly with the contracting multiplier."""
    if params is None:
        raise DomainError("params are required")
    return _solve_series(base, order, ctx, params, Branch.STABLE)


def reflect_series(series: ManifoldSeries) -> ManifoldSeries:
    """
    The r0-image of a branch: r0(z(t)) parameterizes the opposite branch of
    r0(base) with multiplier 1/lambda.
    """
    coeffs = tuple((cp + cw, -cw) for cp, cw in series.coeffs)
    base = series.base_point
    branch = Branch.STABLE if series.branch is Branch.UNSTABLE else Branch.UNSTABLE
    return dataclasses.replace(
        series,
        base_point=PhasePoint(base.psi + base.w, -base.w),
        multiplier=1 / series.multiplier,
        coeffs=coeffs,
        branch=branch,
    )
