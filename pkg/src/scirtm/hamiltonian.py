"""
Interpolating Hamiltonians of the map near its three bifurcation scenarios.

* saddle-center (mu -> 0+): x = psi/mu, y = w/mu^(3/2), limit Hamiltonian
  H1 = (x^2 + y^2)/2 + pi x^3/3 - 1/(6 pi^2) and its generating-function
  corrections up to fourth order;
* fourth-order resonance (mu = 2): a polynomial Hamiltonian of degree <= 6
  in x = psi + w, y = psi;
* third-order resonance (mu = 3 + eps): x = pi psi/eps, y = pi w/eps,
  H1 = (1 - x)(x + y - 1)(2x + y + 1).

Flows use the convention x' = H_y, y' = -H_x.
"""

import dataclasses
import enum
import logging
import math
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from .core_map import PhasePoint, RtmParams, map_forward_lifted, params_from_mu
from .errors import DomainError

logger = logging.getLogger(__name__)

_PI = math.pi

Gradient = Callable[[float, float], Tuple[float, float]]


class ScaledPoint(NamedTuple):
    x: float
    y: float


class Scenario(str, enum.Enum):
    SADDLE_CENTER = "saddle_center"
    FOURTH_ORDER = "fourth_order"
    THIRD_ORDER = "third_order"


_ORDERS = {
    Scenario.SADDLE_CENTER: range(1, 5),
    Scenario.FOURTH_ORDER: range(4, 7),
    Scenario.THIRD_ORDER: range(1, 2),
}


@dataclasses.dataclass(frozen=True)
class HamiltonianId:
    scenario: Scenario
    order: int

    def __post_init__(self):
        object.__setattr__(self, "scenario", Scenario(self.scenario))
        if self.order not in _ORDERS[self.scenario]:
            allowed = list(_ORDERS[self.scenario])
            raise DomainError(f"{self.scenario.value} order must be one of {allowed}, got {self.order}")

    def evaluate(self, p: PhasePoint, params: RtmParams) -> float:
        """The Hamiltonian in the original (psi, w) coordinates."""
        if self.scenario is Scenario.SADDLE_CENTER:
            return h_corrected_saddle_center(p, params, self.order)
        if self.scenario is Scenario.FOURTH_ORDER:
            return h_fourth_order(p, self.order)
        return h1_third_order(scale_third_order(p, params.mu - 3.0))


# ---------------------------------------------------------------------------
# saddle-center

def h1_saddle_center(q: ScaledPoint) -> float:
    x, y = q
    return (x * x + y * y) / 2 + _PI * x**3 / 3 - 1 / (6 * _PI**2)


def grad_h1_saddle_center(x: float, y: float) -> Tuple[float, float]:
    return x + _PI * x * x, y


def _h2_saddle_center(x, y):
    return (x + _PI * x * x) * y / 2


def _h3_saddle_center(x, y):
    return (x + _PI * x * x) ** 2 / 12 + (1 + 2 * _PI * x) * y * y / 12


def _h4_saddle_center(x, y):
    return (1 + 2 * _PI * x) * (x + _PI * x * x) * y / 12


_SADDLE_CENTER_TERMS = [
    lambda x, y: h1_saddle_center(ScaledPoint(x, y)),
    _h2_saddle_center,
    _h3_saddle_center,
    _h4_saddle_center,
]


def scale_saddle_center(p: PhasePoint, mu: float) -> ScaledPoint:
    if mu == 0:
        raise DomainError("the saddle-center scaling needs mu != 0")
    return ScaledPoint(p[0] / mu, p[1] / abs(mu) ** 1.5)


def h_corrected_saddle_center(p: PhasePoint, params: RtmParams, order: int = 4) -> float:
    """
    H^[n](psi, w; mu) = sum_{j<=n} mu^(j/2) H_j(psi/mu, w/mu^(3/2)).

    Args:
        p (PhasePoint): Point in original coordinates.
        params (RtmParams): mu > 0.
        order (int): Truncation order n in 1..4.
    """
    if not params.mu > 0:
        raise DomainError(f"mu must be positive, got {params.mu}")
    if order not in range(1, 5):
        raise DomainError(f"order must be in 1..4, got {order}")
    x, y = scale_saddle_center(p, params.mu)
    return sum(
        params.mu ** ((j + 1) / 2) * term(x, y)
        for j, term in enumerate(_SADDLE_CENTER_TERMS[:order])
    )


def scaled_saddle_center_map(q: ScaledPoint, mu: float) -> ScaledPoint:
    """The map in saddle-center coordinates: x1 = x + mu^(1/2) y, y1 = y - mu^(1/2) c(x1)."""
    s = math.sqrt(mu)
    x1 = q[0] + s * q[1]
    c = (2 * _PI * (1 - math.cos(mu * x1)) + mu * math.sin(mu * x1)) / mu**2
    return ScaledPoint(x1, q[1] - s * c)


@dataclasses.dataclass(frozen=True)
class Partials:
    G: float
    Gx: float
    Gy: float
    Gxx: float
    Gxy: float
    Gyy: float
    Gxxy: float = 0.0
    Gxyy: float = 0.0


GeneratingField = Callable[[float, float], Partials]


def saddle_center_generating_field(mu: float, exact: bool = True) -> GeneratingField:
    """
    G(x1, y) for the scaled saddle-center map, with analytic partials.

    ``exact=False`` gives its limit mu^(1/2) H1.
    """
    if not mu > 0:
        raise DomainError(f"mu must be positive, got {mu}")
    s = math.sqrt(mu)

    if not exact:
        def field(x: float, y: float) -> Partials:
            return Partials(
                G=s * h1_saddle_center(ScaledPoint(x, y)),
                Gx=s * (x + _PI * x * x),
                Gy=s * y,
                Gxx=s * (1 + 2 * _PI * x),
                Gxy=0.0,
                Gyy=s,
            )

        return field

    def antiderivative(x: float) -> float:
        return (2 * _PI * (x - math.sin(mu * x) / mu) - math.cos(mu * x)) / mu**2

    base = antiderivative(-1 / _PI)

    def field(x: float, y: float) -> Partials:
        c = (2 * _PI * (1 - math.cos(mu * x)) + mu * math.sin(mu * x)) / mu**2
        dc = 2 * _PI * math.sin(mu * x) / mu + math.cos(mu * x)
        return Partials(
            G=s * (y * y / 2 + antiderivative(x) - base),
            Gx=s * c,
            Gy=s * y,
            Gxx=s * dc,
            Gxy=0.0,
            Gyy=s,
        )

    return field


def generating_series_terms(field: GeneratingField, order: int = 4) -> List[Callable[[float, float], float]]:
    """
    Evaluators of the first ``order`` terms of the formal Hamiltonian whose
    1-time flow matches the map generated by x1*y + G(x1, y).
    """
    if order not in range(1, 5):
        raise DomainError(f"order must be in 1..4, got {order}")

    def h1(x, y):
        return field(x, y).G

    def h2(x, y):
        d = field(x, y)
        return d.Gx * d.Gy / 2

    def h3(x, y):
        d = field(x, y)
        return (d.Gxx * d.Gy**2 + 4 * d.Gxy * d.Gx * d.Gy + d.Gyy * d.Gx**2) / 12

    def h4(x, y):
        d = field(x, y)
        first = (d.Gxxy * d.Gy + d.Gxyy * d.Gx + d.Gxx * d.Gyy + 3 * d.Gxy**2) * d.Gx * d.Gy
        second = d.Gxy * (d.Gxx * d.Gy**2 + d.Gyy * d.Gx**2)
        return (first + second) / 12

    return [h1, h2, h3, h4][:order]


# ---------------------------------------------------------------------------
# fourth-order resonance

_ALPHA = 1 / 180 - _PI**4 / 3
_BETA = -5 * _PI**2 / 12
_GAMMA = 1 / 9 - 2 * _PI**4


def _h4_fourth(x, y):
    return -(x**4 + y**4) / 6 - _PI**2 * x**2 * y**2


def _h5_fourth(x, y):
    return -(_PI**3) * (x**4 * y + x * y**4) - _PI * (x**3 * y**2 + x**2 * y**3) / 3


def _h6_fourth(x, y):
    return _ALPHA * (x**6 + y**6) + _BETA * (x**4 * y**2 + x**2 * y**4) + _GAMMA * x**3 * y**3


_FOURTH_ORDER_TERMS = {4: _h4_fourth, 5: _h5_fourth, 6: _h6_fourth}


def h_fourth_order(p: PhasePoint, order: int = 6) -> float:
    """H^[n](psi, w) = sum_{j=4}^{n} H_j(psi + w, psi), n in {4, 5, 6}."""
    if order not in _FOURTH_ORDER_TERMS:
        raise DomainError(f"order must be 4, 5 or 6, got {order}")
    x, y = p[0] + p[1], p[0]
    return sum(_FOURTH_ORDER_TERMS[j](x, y) for j in range(4, order + 1))


# ---------------------------------------------------------------------------
# third-order resonance

def h1_third_order(q: ScaledPoint) -> float:
    x, y = q
    return (1 - x) * (x + y - 1) * (2 * x + y + 1)


def grad_h1_third_order(x: float, y: float) -> Tuple[float, float]:
    hx = 6 * x + 3 * y - 6 * x * x - 6 * x * y - y * y
    hy = 3 * x + 2 * y - 3 * x * x - 2 * x * y
    return hx, hy


def equilibria_third_order() -> List[ScaledPoint]:
    """The elliptic point followed by the three saddles."""
    return [ScaledPoint(0.0, 0.0), ScaledPoint(1.0, 0.0), ScaledPoint(1.0, -3.0), ScaledPoint(-2.0, 3.0)]


def scale_third_order(p: PhasePoint, eps: float) -> ScaledPoint:
    if eps == 0:
        raise DomainError("the third-order scaling needs eps != 0")
    return ScaledPoint(_PI * p[0] / eps, _PI * p[1] / eps)


def third_order_scaled_map(q: ScaledPoint, eps: float) -> ScaledPoint:
    """The map at mu = 3 + eps in the scaled coordinates x = pi psi/eps, y = pi w/eps."""
    params = params_from_mu(3.0 + eps)
    k = eps / _PI
    psi1, w1 = map_forward_lifted((k * q[0], k * q[1]), params)
    return ScaledPoint(psi1 / k, w1 / k)


def third_order_first_variation(q: ScaledPoint) -> ScaledPoint:
    """f1 in f^3 = I + eps f1 + O(eps^2); the Hamiltonian field of H1."""
    hx, hy = grad_h1_third_order(*q)
    return ScaledPoint(hy, -hx)


# ---------------------------------------------------------------------------
# flows, homoclinic orbit, level sets

def hamiltonian_flow(
    gradient: Gradient,
    q: Sequence[float],
    t: float,
    scale: float = 1.0,
    rtol: float = 1e-12,
    atol: float = 1e-14,
    t_eval: Optional[Sequence[float]] = None,
) -> np.ndarray:
    """
    Time-t flow of x' = scale*H_y, y' = -scale*H_x.

    Returns:
        np.ndarray: The end point, or the (len(t_eval), 2) trajectory when
        ``t_eval`` is given.
    """

    def rhs(_, z):
        hx, hy = gradient(z[0], z[1])
        return [scale * hy, -scale * hx]

    sol = integrate.solve_ivp(
        rhs, (0.0, t), list(q), method="DOP853", rtol=rtol, atol=atol, t_eval=t_eval
    )
    if not sol.success:
        raise ArithmeticError(f"flow integration failed: {sol.message}")
    if t_eval is None:
        return sol.y[:, -1]
    return sol.y.T


def homoclinic_trajectory(t: float) -> ScaledPoint:
    """The separatrix of the saddle-center limit Hamiltonian, through (1/2pi, 0) at t = 0."""
    c = math.cosh(t / 2)
    return ScaledPoint(3 / (2 * _PI * c * c) - 1 / _PI, 3 * math.sinh(t / 2) / (2 * _PI * c**3))


def separatrix_area() -> float:
    """Area 6/(5 pi^2) enclosed by the saddle-center separatrix."""
    return 6 / (5 * _PI**2)


def separatrix_area_quadrature(t_max: float = 40.0) -> float:
    """|integral of y x' dt| along the homoclinic trajectory on [-t_max, t_max]."""

    def integrand(t):
        c = math.cosh(t / 2)
        y = 3 * math.sinh(t / 2) / (2 * _PI * c**3)
        # x'(t) = -y(t)
        return -y * y

    value, err = integrate.quad(integrand, -t_max, t_max, epsabs=1e-15, epsrel=1e-13, limit=200)
    logger.debug(f"separatrix quadrature {value} (+- {err})")
    return abs(value)


def level_curves(
    H: Callable[[np.ndarray, np.ndarray], np.ndarray],
    window: Tuple[float, float, float, float],
    levels: Sequence[float],
    n: int = 2000,
) -> Dict[float, List[np.ndarray]]:
    """
    Marching-squares polylines of H = level on an n x n grid.

    Args:
        H: Vectorized function of (X, Y) arrays.
        window: (x_min, x_max, y_min, y_max).
        levels: Level values.
        n (int): Grid points per axis.
    Returns:
        dict: level -> list of (k, 2) vertex arrays.
    """
    from matplotlib.figure import Figure

    levels = sorted(set(float(v) for v in levels))
    if not levels:
        return {}
    x = np.linspace(window[0], window[1], n)
    y = np.linspace(window[2], window[3], n)
    X, Y = np.meshgrid(x, y)
    Z = np.asarray(H(X, Y), dtype=float)
    ax = Figure().subplots()
    contours = ax.contour(X, Y, Z, levels=levels)
    return {
        level: [np.asarray(seg, dtype=float) for seg in segs if len(seg) > 1]
        for level, segs in zip(levels, contours.allsegs)
    }


def polylines_to_rows(curves: Dict[float, List[np.ndarray]]) -> List[dict]:
    """Flattens level curves into CSV rows (level, curve, psi, w)."""
    rows = []
    for level, segs in curves.items():
        for k, seg in enumerate(segs):
            rows.extend(
                {"level": level, "curve": k, "psi": float(a), "w": float(b)} for a, b in seg
            )
    return rows


@dataclasses.dataclass(frozen=True)
class LastLevel:
    psi: float
    value: float


def last_level(
    H: Callable[[PhasePoint], float], raster
) -> Optional[LastLevel]:
    """
    H at the outermost RIC cell of D along w = 0, the level standing in for
    the last invariant curve. None when D has no such cell.
    """
    from .stability_domain import CellClass, label_components

    if raster.labels is None:
        raster = label_components(raster)
    row = raster.center_row
    red = (raster.cells[row] == CellClass.RED) & (raster.labels[row] == 1)
    if not red.any():
        return None
    psis = raster.psi_centers[red]
    psi = float(psis[np.argmax(np.abs(psis))])
    return LastLevel(psi=psi, value=float(H(PhasePoint(psi, 0.0))))
