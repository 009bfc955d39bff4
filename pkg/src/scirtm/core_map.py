"""
The race-track microtron longitudinal phase map.

The map acts on the cylinder (psi, w), psi an angle and w the scaled energy
deviation::

    psi_1 = psi + w
    w_1   = w + 2*pi*(cos(psi_1) - 1) - mu*sin(psi_1)

It has the elliptic fixed point p_s = (0, 0) and the hyperbolic fixed point
p_h = (-2*phi_s, 0), where mu = 2*pi*tan(phi_s). The map factors as
``f = r1 o r0`` with the two involutions implemented below.
"""

import dataclasses
import enum
import logging
import math
from typing import NamedTuple, Optional, Union

import numpy as np

from .errors import BudgetError, DomainError, UnboundedOrbitError

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

# 迭代次数上限（可被 RunConfig 覆盖）
DEFAULT_ITERATION_BUDGET = 10_000_000
LIFT_LIMIT = 1e12


class PhasePoint(NamedTuple):
    """A point of the cylinder with psi reduced to [-pi, pi)."""

    psi: float
    w: float


class LiftedPoint(NamedTuple):
    """A point whose phase is tracked on the real line."""

    psi_tilde: float
    w: float

    def to_phase(self) -> PhasePoint:
        return PhasePoint(wrap_phase(self.psi_tilde), self.w)


class LinearType(str, enum.Enum):
    HYPERBOLIC = "hyperbolic"
    PARABOLIC = "parabolic"
    ELLIPTIC = "elliptic"


@dataclasses.dataclass(frozen=True)
class RtmParams:
    """
    Map parameter and the quantities derived from it.

    Attributes:
        mu (float): The map parameter, mu = 2*pi*tan(phi_s).
        phi_s (float): Synchronous phase in radians.
        theta (Optional[float]): Rotation angle of the linearization at p_s,
            cos(theta) = 1 - mu/2. Defined for 0 < mu <= 4.
        h (Optional[float]): Characteristic exponent of p_h, cosh(h) = 1 + mu/2.
            Defined for mu > 0.
    """

    mu: float
    phi_s: float
    theta: Optional[float] = None
    h: Optional[float] = None

    @property
    def psi_h(self) -> float:
        return -2.0 * self.phi_s

    @property
    def p_s(self) -> PhasePoint:
        return PhasePoint(0.0, 0.0)

    @property
    def p_h(self) -> PhasePoint:
        return PhasePoint(self.psi_h, 0.0)

    @property
    def rotation(self) -> Optional[float]:
        """Linear rotation number theta/2pi of p_s, or None when p_s is not elliptic."""
        if self.theta is None:
            return None
        return self.theta / TWO_PI

    @property
    def multiplier(self) -> Optional[float]:
        """Unstable eigenvalue exp(h) of p_h."""
        if self.h is None:
            return None
        return math.exp(self.h)


@dataclasses.dataclass(frozen=True)
class LinearTypes:
    trace_s: float
    trace_h: float
    type_s: LinearType
    type_h: LinearType


@dataclasses.dataclass(frozen=True)
class CharacteristicPhases:
    """Synchronous phases at which the map changes character."""

    phi_p: float
    phi_u: float
    mu_p: float
    mu_u: float
    cosh_h_p: float
    cosh_h_u: float


def _as_finite(value: float, name: str) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise DomainError(f"{name} must be a real number, got {value!r}")
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value}")
    return value


def params_from_mu(mu: float) -> RtmParams:
    """
    Builds the parameter record for a given mu.

    Args:
        mu (float): The map parameter.
    Returns:
        RtmParams: mu together with phi_s, theta and h where they are defined.
    """
    mu = _as_finite(mu, "mu")
    phi_s = math.atan(mu / TWO_PI)
    theta = math.acos(max(-1.0, 1.0 - mu / 2.0)) if 0.0 < mu <= 4.0 else None
    h = math.acosh(1.0 + mu / 2.0) if mu > 0.0 else None
    return RtmParams(mu=mu, phi_s=phi_s, theta=theta, h=h)


def params_from_phase(phi_s: float) -> RtmParams:
    """Parameter record from the synchronous phase (radians, |phi_s| < pi/2)."""
    phi_s = _as_finite(phi_s, "phi_s")
    if abs(phi_s) >= math.pi / 2:
        raise DomainError(f"phi_s must lie in (-pi/2, pi/2), got {phi_s}")
    return params_from_mu(TWO_PI * math.tan(phi_s))


def params_from_h(h: float) -> RtmParams:
    """Parameter record from the characteristic exponent h > 0."""
    h = _as_finite(h, "h")
    if h <= 0.0:
        raise DomainError(f"h must be positive, got {h}")
    return params_from_mu(2.0 * (math.cosh(h) - 1.0))


def characteristic_phases() -> CharacteristicPhases:
    """
    The parabolic limit phi_p = arctan(2/pi) (mu = 4) and the third-order
    resonance phi_u = arctan(3/2pi) (mu = 3).
    """
    return CharacteristicPhases(
        phi_p=math.atan(2.0 / math.pi),
        phi_u=math.atan(3.0 / TWO_PI),
        mu_p=4.0,
        mu_u=3.0,
        cosh_h_p=3.0,
        cosh_h_u=2.5,
    )


def wrap_phase(psi: float) -> float:
    """Reduces an angle to [-pi, pi); angles already in range are returned unchanged."""
    if -math.pi <= psi < math.pi:
        return psi
    reduced = (psi + math.pi) % TWO_PI - math.pi
    if reduced >= math.pi:
        reduced -= TWO_PI
    return reduced


def eta(psi: float, params: RtmParams) -> float:
    """eta(psi) = 2*pi*(cos(psi) - 1) - mu*sin(psi)."""
    return TWO_PI * (math.cos(psi) - 1.0) - params.mu * math.sin(psi)


def eta_prime(psi: float, params: RtmParams) -> float:
    return -TWO_PI * math.sin(psi) - params.mu * math.cos(psi)


def map_forward(p: PhasePoint, params: RtmParams) -> PhasePoint:
    psi1 = p[0] + p[1]
    w1 = p[1] + eta(psi1, params)
    return PhasePoint(wrap_phase(psi1), w1)


def map_inverse(p: PhasePoint, params: RtmParams) -> PhasePoint:
    psi1, w1 = p
    w = w1 - eta(psi1, params)
    return PhasePoint(wrap_phase(psi1 - w), w)


def map_forward_lifted(q: LiftedPoint, params: RtmParams) -> LiftedPoint:
    psi1 = q[0] + q[1]
    return LiftedPoint(psi1, q[1] + eta(psi1, params))


def map_inverse_lifted(q: LiftedPoint, params: RtmParams) -> LiftedPoint:
    psi1, w1 = q
    w = w1 - eta(psi1, params)
    return LiftedPoint(psi1 - w, w)


def _check_budget(n: int, budget: int) -> int:
    if int(n) != n:
        raise DomainError(f"iteration count must be an integer, got {n!r}")
    n = int(n)
    if abs(n) > budget:
        raise BudgetError(f"|n| = {abs(n)} exceeds the iteration budget {budget}")
    return n


def iterate(
    p: PhasePoint, n: int, params: RtmParams, budget: int = DEFAULT_ITERATION_BUDGET
) -> PhasePoint:
    """
    Applies the map n times (the inverse when n < 0) on the cylinder.

    Args:
        p (PhasePoint): Initial point.
        n (int): Signed number of iterations.
        params (RtmParams): Map parameters.
        budget (int): Largest admissible |n|.
    Returns:
        PhasePoint: f^n(p).
    """
    n = _check_budget(n, budget)
    step = map_forward if n >= 0 else map_inverse
    point = PhasePoint(wrap_phase(p[0]), p[1])
    for _ in range(abs(n)):
        point = step(point, params)
    return point


def iterate_lifted(
    p: Union[PhasePoint, LiftedPoint],
    n: int,
    params: RtmParams,
    budget: int = DEFAULT_ITERATION_BUDGET,
) -> LiftedPoint:
    """
    Applies the map n times keeping the phase on the real line.

    Raises:
        UnboundedOrbitError: if the lifted phase leaves [-1e12, 1e12] or the
            energy deviation overflows.
    """
    n = _check_budget(n, budget)
    step = map_forward_lifted if n >= 0 else map_inverse_lifted
    point = LiftedPoint(float(p[0]), float(p[1]))
    for k in range(abs(n)):
        point = step(point, params)
        if not (abs(point.psi_tilde) <= LIFT_LIMIT and math.isfinite(point.w)):
            raise UnboundedOrbitError(
                f"lifted orbit unbounded after {k + 1} steps (psi_tilde={point.psi_tilde:.3e})"
            )
    return point


def orbit(p: PhasePoint, n: int, params: RtmParams) -> np.ndarray:
    """Returns the (|n|+1, 2) array of successive iterates p, f(p), ..., f^n(p)."""
    n = _check_budget(n, DEFAULT_ITERATION_BUDGET)
    step = map_forward if n >= 0 else map_inverse
    out = np.empty((abs(n) + 1, 2), dtype=float)
    point = PhasePoint(wrap_phase(p[0]), p[1])
    out[0] = point
    for k in range(1, abs(n) + 1):
        point = step(point, params)
        out[k] = point
    return out


def reversor_r0(p: PhasePoint) -> PhasePoint:
    """r0(psi, w) = (psi + w, -w); its fixed set is the line w = 0."""
    return PhasePoint(wrap_phase(p[0] + p[1]), -p[1])


def reversor_r1(p: PhasePoint, params: RtmParams) -> PhasePoint:
    """r1(psi, w) = (psi, eta(psi) - w); its fixed set is the curve w = eta(psi)/2."""
    return PhasePoint(p[0], eta(p[0], params) - p[1])


def jacobian(p: PhasePoint, params: RtmParams) -> np.ndarray:
    d = eta_prime(p[0] + p[1], params)
    return np.array([[1.0, 1.0], [d, 1.0 + d]])


def classify_trace(trace: float) -> LinearType:
    if abs(trace) < 2.0:
        return LinearType.ELLIPTIC
    if abs(trace) == 2.0:
        return LinearType.PARABOLIC
    return LinearType.HYPERBOLIC


def linear_type_at_fixed_points(params: RtmParams) -> LinearTypes:
    """Traces T_s = 2 - mu and T_h = 2 + mu and the resulting linear types."""
    trace_s = 2.0 - params.mu
    trace_h = 2.0 + params.mu
    return LinearTypes(
        trace_s=trace_s,
        trace_h=trace_h,
        type_s=classify_trace(trace_s),
        type_h=classify_trace(trace_h),
    )


def _raw_potential(psi: float, mu: float) -> float:
    return TWO_PI * math.sin(psi) - TWO_PI * psi + mu * math.cos(psi)


def potential(psi: float, params: RtmParams) -> float:
    """V(psi) with V' = eta, normalized so that V(psi_h) = 0."""
    return _raw_potential(psi, params.mu) - _raw_potential(params.psi_h, params.mu)


def generating_action(psi: float, psi1: float, params: RtmParams) -> float:
    """
    Twist generating function L(psi, psi1) = (psi1 - psi)^2/2 + V(psi1).

    The map is recovered from w = -dL/dpsi and w1 = dL/dpsi1 on lifted phases.
    """
    return 0.5 * (psi1 - psi) ** 2 + potential(psi1, params)


def energy_spread(w_extent: float) -> float:
    """Relative energy tolerance |E0 - E0s|/Delta_s implied by a w-extent."""
    return w_extent / TWO_PI
