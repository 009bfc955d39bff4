"""
Local theory at the synchronous fixed point p_s.

Closed forms only: the twist coefficient and its root, the local stability
verdict for every mu, resonance parameter values, the Taylor coefficients
used by the fourth- and second-order criteria, and the asymptotic area and shape formulas near
mu = 0 and mu = 3.
"""

import dataclasses
import enum
import logging
import math
from fractions import Fraction
from typing import List, Sequence, Tuple

import mpmath
import numpy as np
from scipy import optimize

from . import stats
from .core_map import PhasePoint
from .errors import DomainError, InsufficientDataError, PoleError

logger = logging.getLogger(__name__)

_PI = math.pi
_POLE_TOLERANCE = 1e-12
_FLAT_WINDOW = 0.05
_FLAT_MIN_SAMPLES = 8


class StabilityReason(str, enum.Enum):
    HYPERBOLIC_UNSTABLE = "hyperbolic_unstable"
    SADDLE_CENTER_PARABOLIC_UNSTABLE = "saddle_center_parabolic_unstable"
    ELLIPTIC_TWIST_STABLE = "elliptic_twist_stable"
    FOURTH_ORDER_STABLE = "fourth_order_stable"
    TWIST_ROOT_HIGHER_ORDER_STABLE = "twist_root_higher_order_stable"
    THIRD_ORDER_RESONANCE_UNSTABLE = "third_order_resonance_unstable"
    SECOND_ORDER_PARABOLIC_STABLE = "second_order_parabolic_stable"


@dataclasses.dataclass(frozen=True)
class StabilityVerdict:
    stable: bool
    reason: StabilityReason


@dataclasses.dataclass(frozen=True)
class ResonanceId:
    """
    An (m, n) resonance: rotation number m/n of the elliptic point.

    (0, 1) stands for the fixed point itself.
    """

    m: int
    n: int

    def __post_init__(self):
        if self.n < 1 or self.m < 0:
            raise DomainError(f"resonance ({self.m},{self.n}) needs m >= 0 and n >= 1")
        if math.gcd(self.m, self.n) != 1:
            raise DomainError(f"resonance ({self.m},{self.n}) is not in lowest terms")
        if (self.m, self.n) != (0, 1) and not (1 <= self.m and 2 * self.m <= self.n):
            raise DomainError(f"resonance ({self.m},{self.n}) needs 1 <= m <= n/2")

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.m, self.n)

    def __str__(self) -> str:
        return f"({self.m},{self.n})"


@dataclasses.dataclass(frozen=True)
class TwistRoot:
    theta_r: float
    mu_r: float
    cos_theta_r: float


@dataclasses.dataclass(frozen=True)
class TaylorCoefficients:
    """Second and third Taylor coefficients of a local map component and the criterion built on them."""

    second: float
    third: float
    criterion: float
    stable: bool


@dataclasses.dataclass(frozen=True)
class FlatFit:
    rho0: float
    rho2: float
    n_samples: int
    residual: float


@dataclasses.dataclass(frozen=True)
class EscapeRow:
    resonance: ResonanceId
    mu_bullet: float
    mu_star: Tuple[float, float]


def _twist_terms(theta: float) -> Tuple[float, float]:
    c = math.cos(theta)
    s = math.sin(theta)
    numerator = 2 * c**3 - 3 * c**2 + 4 * _PI**2 * c + 1 + _PI**2
    denominator = (c - 1) * (2 * c + 1) * s**2
    return numerator, denominator


def twist_coefficient(theta: float) -> float:
    """
    First Birkhoff (twist) coefficient tau(theta) of p_s.

    Args:
        theta (float): Rotation angle of the linearization, in (0, pi).
    Returns:
        float: tau(theta).
    Raises:
        PoleError: at theta in {0, 2pi/3, pi}.
        DomainError: outside [0, pi].
    """
    theta = float(theta)
    for pole in (0.0, 2 * _PI / 3, _PI):
        if abs(theta - pole) < _POLE_TOLERANCE:
            raise PoleError(f"tau has a pole at theta = {pole}")
    if not 0.0 < theta < _PI:
        raise DomainError(f"theta must lie in (0, pi), got {theta}")
    numerator, denominator = _twist_terms(theta)
    return numerator / denominator


def numerator_discriminant() -> float:
    """Discriminant of the cubic 2c^3 - 3c^2 + 4pi^2 c + 1 + pi^2 in c = cos(theta)."""
    a, b, c, d = 2.0, -3.0, 4 * _PI**2, 1 + _PI**2
    return 18 * a * b * c * d - 4 * b**3 * d + b**2 * c**2 - 4 * a * c**3 - 27 * a**2 * d**2


def twist_root() -> TwistRoot:
    """
    The unique zero theta_r of tau on (0, pi) and mu_r = 2 - 2cos(theta_r).

    A bracketed solve on (1.5, 2.09) is polished on the numerator cubic in
    cos(theta) at 40 digits.
    """
    theta0 = optimize.brentq(lambda t: _twist_terms(t)[0], 1.5, 2.09, xtol=1e-15)
    ctx = mpmath.MPContext()
    ctx.dps = 40
    c = ctx.findroot(
        lambda x: 2 * x**3 - 3 * x**2 + 4 * ctx.pi**2 * x + 1 + ctx.pi**2,
        ctx.mpf(math.cos(theta0)),
    )
    theta_r = ctx.acos(c)
    logger.debug(f"twist root theta_r = {ctx.nstr(theta_r, 30)}")
    return TwistRoot(
        theta_r=float(theta_r), mu_r=float(2 - 2 * c), cos_theta_r=float(c)
    )


def classify_local_stability(mu: float) -> StabilityVerdict:
    """
    Local stability of p_s: stable exactly for mu in (0, 4] except mu = 3.

    The verdict records which criterion decides each case.
    """
    mu = float(mu)
    if not math.isfinite(mu):
        raise DomainError(f"mu must be finite, got {mu}")

    def near(value: float) -> bool:
        return math.isclose(mu, value, rel_tol=0.0, abs_tol=_POLE_TOLERANCE)

    R = StabilityReason
    if near(0.0):
        return StabilityVerdict(False, R.SADDLE_CENTER_PARABOLIC_UNSTABLE)
    if near(4.0):
        return StabilityVerdict(second_order_coefficients().stable, R.SECOND_ORDER_PARABOLIC_STABLE)
    if mu < 0.0 or mu > 4.0:
        return StabilityVerdict(False, R.HYPERBOLIC_UNSTABLE)
    if near(3.0):
        return StabilityVerdict(False, R.THIRD_ORDER_RESONANCE_UNSTABLE)
    if near(2.0):
        return StabilityVerdict(fourth_order_coefficients().stable, R.FOURTH_ORDER_STABLE)
    if near(twist_root().mu_r):
        return StabilityVerdict(True, R.TWIST_ROOT_HIGHER_ORDER_STABLE)
    return StabilityVerdict(True, R.ELLIPTIC_TWIST_STABLE)


def fourth_order_coefficients() -> TaylorCoefficients:
    """
    a(x) = 2pi(1 - cos x) - 2(x - sin x) = a2 x^2 + a3 x^3 + ...

    p_s at mu = 2 is unstable when 0 < a3 <= a2^2, stable otherwise.
    """
    # 1 - cos x = x^2/2 - ...,  x - sin x = x^3/6 - ...
    a2 = 2 * _PI * 0.5
    a3 = -2.0 / 6.0
    unstable = 0.0 < a3 <= a2**2
    return TaylorCoefficients(second=a2, third=a3, criterion=a2**2 - a3, stable=not unstable)


def second_order_coefficients() -> TaylorCoefficients:
    """
    b(u) = 2pi(cos u - 1) + 4(u - sin u) = b2 u^2 + b3 u^3 + ...

    p_s at mu = 4 is stable when 2*b3 + b2^2 > 0.
    """
    b2 = -2 * _PI * 0.5
    b3 = 4.0 / 6.0
    criterion = 2 * b3 + b2**2
    return TaylorCoefficients(second=b2, third=b3, criterion=criterion, stable=criterion > 0)


def levi_civita_second_derivative(mu: float) -> float:
    """d^2 w1 / d psi^2 at the origin; nonzero means the mu = 0 parabolic point is unstable."""
    return -2 * _PI * math.cos(0.0) + float(mu) * math.sin(0.0)


def resonance_mu(r: ResonanceId) -> float:
    """mu at which p_s is (m, n)-resonant: 2 - 2cos(2 pi m / n)."""
    return 2.0 - 2.0 * math.cos(2 * _PI * r.m / r.n)


def asymptotic_area_saddle_center(mu: float) -> float:
    """Leading term 6 mu^(5/2) / (5 pi^2) of the stability-domain area as mu -> 0+."""
    mu = float(mu)
    if mu <= 0.0:
        raise DomainError(f"mu must be positive, got {mu}")
    return 6.0 * mu**2.5 / (5.0 * _PI**2)


def asymptotic_area_third_order(eps: float) -> float:
    """Leading term 9 eps^2 / (2 pi^2) of |D| at mu = 3 + eps."""
    return 9.0 * float(eps) ** 2 / (2.0 * _PI**2)


def third_order_triangle(eps: float) -> List[PhasePoint]:
    """Vertices of the triangle that approximates D near mu = 3 + eps."""
    k = float(eps) / _PI
    return [PhasePoint(k, 0.0), PhasePoint(k, -3.0 * k), PhasePoint(-2.0 * k, 3.0 * k)]


def polygon_area(vertices: Sequence[Sequence[float]]) -> float:
    """Shoelace area of a simple polygon."""
    pts = np.asarray(vertices, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def third_order_map_expansion(psi: float, w: float) -> PhasePoint:
    """Quadratic part of f^3 at mu = 3."""
    psi3 = psi - _PI * (3 * psi**2 + 2 * psi * w)
    w3 = w + _PI * (6 * psi**2 + 6 * psi * w + w**2)
    return PhasePoint(psi3, w3)


def third_order_generating_function(psi: float, w3: float) -> float:
    """G = pi psi (psi + w3)(2 psi + w3); no strict extremum at the origin."""
    return _PI * psi * (psi + w3) * (2 * psi + w3)


def flat_rotation_fit(
    samples: Sequence[Tuple[float, float]],
    window: float = _FLAT_WINDOW,
    min_samples: int = _FLAT_MIN_SAMPLES,
) -> FlatFit:
    """
    Least-squares fit rho = rho0 + rho2 psi^4 on Fix(r0) near psi = 0.

    Args:
        samples: (psi, rho) pairs, chaotic points already removed.
        window (float): Only samples with |psi| <= window are used.
        min_samples (int): Smallest admissible number of samples.
    Returns:
        FlatFit: fitted rho0 and rho2.
    Raises:
        InsufficientDataError: too few finite samples inside the window.
    """
    data = np.asarray(list(samples), dtype=float).reshape(-1, 2)
    mask = np.isfinite(data).all(axis=1) & (np.abs(data[:, 0]) <= window)
    data = data[mask]
    if len(data) < min_samples:
        raise InsufficientDataError(
            f"flat fit needs at least {min_samples} samples with |psi| <= {window}, got {len(data)}"
        )
    fit = stats.fit_powers(data[:, 0], data[:, 1], powers=(0, 4))
    return FlatFit(
        rho0=float(fit.coefficients[0]),
        rho2=float(fit.coefficients[1]),
        n_samples=fit.n_samples,
        residual=fit.residual,
    )


def _simplest_in(lo: Fraction, hi: Fraction) -> Fraction:
    # 0 <= lo < hi, open interval
    fl = math.floor(lo)
    if fl + 1 < hi:
        return Fraction(fl + 1)
    if lo == fl:
        return fl + 1 / Fraction(math.floor(1 / (hi - fl)) + 1)
    return fl + 1 / _simplest_in(1 / (hi - fl), 1 / (lo - fl))


def simplest_rational_between(a: float, b: float) -> Fraction:
    """
    The rational with the smallest denominator in the open interval (a, b).
    """
    lo, hi = sorted((Fraction(a), Fraction(b)))
    if lo == hi:
        raise DomainError("interval is empty")
    shift = math.floor(lo)
    return _simplest_in(lo - shift, hi - shift) + shift


def _escape_table() -> List[EscapeRow]:
    brackets = [
        ((1, 9), (0.859, 0.860)),
        ((1, 8), (0.948, 0.949)),
        ((1, 7), (1.071, 1.072)),
        ((1, 6), (1.251, 1.252)),
        ((1, 5), (1.539, 1.540)),
        ((2, 9), (1.835, 1.836)),
        ((1, 4), (2.037, 2.038)),
        ((2, 7), (2.526, 2.527)),
        ((1, 3), (2.853, 2.854)),
        ((3, 8), (3.589, 3.590)),
        ((2, 5), (3.735, 3.736)),
        ((3, 7), (3.942, 3.943)),
        ((4, 9), (4.023, 4.024)),
        ((1, 2), (4.080, 4.081)),
    ]
    rows = []
    for (m, n), mu_star in brackets:
        r = ResonanceId(m, n)
        rows.append(EscapeRow(resonance=r, mu_bullet=resonance_mu(r), mu_star=mu_star))
    return rows


# 已知共振逃逸值（mu_star 区间）
ESCAPE_TABLE: List[EscapeRow] = _escape_table()
