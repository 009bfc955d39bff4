"""
Refined rotation numbers around p_s and the classification of bounded orbits.

The argument of p_n - p_s is measured clockwise and lifted to the real line;
its increments (in turns) are summed P times and the resulting averages are
combined by Richardson extrapolation at N = 2^(Q-P), ..., 2^Q. The estimate
has an O(N^-(P+1)) error for orbits on invariant curves, and the difference
between consecutive Q gives an empirical bound that stays large on chaotic
orbits.
"""

import dataclasses
import enum
import logging
import math
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from .core_map import TWO_PI, PhasePoint, RtmParams, eta, map_forward, map_inverse
from .errors import DegenerateArgumentError, DomainError, EscapeError

logger = logging.getLogger(__name__)

DEFAULT_P = 7
DEFAULT_Q = 15
DEFAULT_TOLERANCE = 1e-10
DEFAULT_CONTROL_W = 1.0

CF_MAX_TERMS = 12
CF_BLOWUP = 1e6

# mu 高于此值时按平均转角选取提升
UNWRAP_HEURISTIC_MU = 3.5

Step = Callable[[PhasePoint], PhasePoint]


class OrbitKind(enum.IntEnum):
    """Outcome of a classification; the values double as raster color codes."""

    ESCAPED = 0
    CHAOTIC = 1
    RATIONAL = 2
    IRRATIONAL = 3


@dataclasses.dataclass(frozen=True)
class RotationEstimate:
    theta_pq: float
    err_bound: float
    P: int
    Q: int
    theta_prev: float

    @property
    def rho(self) -> float:
        """The estimate reduced to [0, 1)."""
        return self.theta_pq % 1.0


@dataclasses.dataclass(frozen=True)
class OrbitClass:
    kind: OrbitKind
    rho: Optional[float] = None
    err_bound: Optional[float] = None
    m: Optional[int] = None
    n: Optional[int] = None

    def __str__(self) -> str:
        if self.kind is OrbitKind.RATIONAL:
            return f"rational({self.m},{self.n})"
        if self.kind is OrbitKind.IRRATIONAL:
            return f"irrational({self.rho:.12g})"
        return self.kind.name.lower()


@dataclasses.dataclass(frozen=True)
class RotationSample:
    psi: float
    w: float
    rho: float
    err_bound: float
    orbit_class: OrbitClass


def richardson_weights(P: int) -> np.ndarray:
    """
    Weights (-1)^(P-p) 2^(p(p+1)/2) / (delta_p delta_{P-p}), p = 0..P, with
    delta_p = prod_{j=1}^{p} (2^j - 1). They sum to one.
    """
    delta = [1]
    for j in range(1, P + 1):
        delta.append(delta[-1] * (2**j - 1))
    weights = [
        Fraction((-1) ** (P - p) * 2 ** (p * (p + 1) // 2), delta[p] * delta[P - p])
        for p in range(P + 1)
    ]
    return np.array([float(wt) for wt in weights])


def binomial_weights(P: int, q_values: Sequence[int]) -> np.ndarray:
    """C(2^q + P, P + 1) for each q, exact integers rounded once to float."""
    return np.array([float(math.comb(2**q + P, P + 1)) for q in q_values])


def _check_pq(P: int, Q: int) -> Tuple[int, int]:
    P, Q = int(P), int(Q)
    if not 0 < P < Q:
        raise DomainError(f"need 0 < P < Q, got P={P}, Q={Q}")
    if Q > 40:
        raise DomainError(f"Q={Q} is beyond any sensible iteration count")
    return P, Q


def _unwrap_reference(params: RtmParams) -> Tuple[float, bool]:
    if params.theta is not None:
        ref0 = params.theta
    else:
        ref0 = math.pi if params.mu > 4.0 else 0.0
    return ref0, params.mu > UNWRAP_HEURISTIC_MU


def _argument(p: PhasePoint) -> float:
    if p[0] * p[0] + p[1] * p[1] < _kernels.DEGENERATE_RADIUS_SQ:
        raise DegenerateArgumentError(f"orbit point {tuple(p)} is within 1e-13 of p_s")
    return math.atan2(-p[1], p[0])


def unwrapped_arguments(
    p: PhasePoint,
    N: int,
    params: Optional[RtmParams] = None,
    step: Optional[Step] = None,
    backward: bool = False,
    control_w: float = DEFAULT_CONTROL_W,
) -> np.ndarray:
    """
    Lifted clockwise arguments phi_0..phi_N of the orbit of p around p_s.

    Successive lifts differ by less than pi. A custom ``step`` replaces the
    map, which is how rigid rotations and other oracles are fed in.

    Raises:
        DegenerateArgumentError: an orbit point lies within 1e-13 of p_s.
        EscapeError: |w| exceeds control_w (only when the map itself is used).
    """
    if step is None:
        if params is None:
            raise ValueError("either params or step is required")
        mapping = map_inverse if backward else map_forward
        step = lambda q: mapping(q, params)
        check_escape = True
    else:
        check_escape = False

    phis = np.empty(int(N) + 1)
    point = PhasePoint(float(p[0]), float(p[1]))
    phis[0] = _argument(point)
    for n in range(1, int(N) + 1):
        point = step(point)
        if check_escape and not abs(point[1]) <= control_w:
            raise EscapeError(f"orbit escaped at step {n}", step=n)
        a = _argument(point)
        delta = a - (phis[n - 1] % TWO_PI)
        delta -= TWO_PI * math.floor(delta / TWO_PI + 0.5)
        phis[n] = phis[n - 1] + delta
    return phis


def streaming_sums(turns: np.ndarray, P: int, q_lo: int, q_hi: int) -> np.ndarray:
    """S^P_{2^q} for q = q_lo..q_hi from per-step increments, in one pass."""
    out = np.zeros((q_hi - q_lo + 1, 2))
    _kernels.checkpoints_from_turns(np.ascontiguousarray(turns, dtype=float), P, q_lo, out)
    return out[:, 0] + out[:, 1]


def _estimate_from_buffer(buf: np.ndarray, P: int, Q: int) -> RotationEstimate:
    q_lo = Q - P - 1
    weights = richardson_weights(P)
    binoms = binomial_weights(P, range(q_lo, Q + 1))
    now, before = _kernels.combine(buf, weights, binoms, P)
    return RotationEstimate(
        theta_pq=float(now),
        err_bound=abs(now - before) / 2 ** (P + 1),
        P=P,
        Q=Q,
        theta_prev=float(before),
    )


def refined_rotation_number(
    p: PhasePoint,
    P: int = DEFAULT_P,
    Q: int = DEFAULT_Q,
    params: Optional[RtmParams] = None,
    control_w: float = DEFAULT_CONTROL_W,
    backward: bool = False,
    step: Optional[Step] = None,
) -> RotationEstimate:
    """
    Refined rotation number Theta(P, Q) of the orbit of p, with its error bound.

    Args:
        p (PhasePoint): Initial point, p != p_s.
        P (int): Number of summations, 0 < P < Q.
        Q (int): 2^Q iterates are used.
        params (RtmParams): Map parameters; required unless ``step`` is given.
        control_w (float): Escape threshold on |w|.
        backward (bool): Iterate the inverse map. The estimate still refers to
            the forward map, so both directions are directly comparable.
        step (Callable): Replacement dynamics on the plane.
    Returns:
        RotationEstimate: Theta(P, Q), its bound and Theta(P, Q-1).
    Raises:
        EscapeError: the orbit left the control region.
        DegenerateArgumentError: the orbit came within 1e-13 of p_s.
    """
    P, Q = _check_pq(P, Q)
    q_lo = Q - P - 1
    buf = np.zeros((P + 2, 2))

    if step is not None:
        phis = unwrapped_arguments(p, 2**Q, step=step)
        turns = np.diff(phis) / TWO_PI
        if backward:
            turns = -turns
        _kernels.checkpoints_from_turns(turns, P, q_lo, buf)
        return _estimate_from_buffer(buf, P, Q)

    if params is None:
        raise ValueError("either params or step is required")
    ref0, use_ref = _unwrap_reference(params)
    status = _kernels.rotation_checkpoints(
        float(p[0]), float(p[1]), params.mu, P, Q, q_lo, float(control_w),
        bool(backward), ref0, use_ref, buf,
    )
    if status == _kernels.STATUS_ESCAPED:
        raise EscapeError(f"orbit of {tuple(p)} escaped |w| <= {control_w}")
    if status == _kernels.STATUS_DEGENERATE:
        raise DegenerateArgumentError(f"orbit of {tuple(p)} is within 1e-13 of p_s")
    return _estimate_from_buffer(buf, P, Q)


def _expand(rho: float, max_terms: int, blowup: float) -> Tuple[List[int], bool]:
    """Partial quotients of rho in (0,1) and whether the expansion terminated."""
    quotients: List[int] = []
    x = float(rho)
    for _ in range(max_terms):
        if x == 0.0:
            return quotients, True
        y = 1.0 / x
        a = math.floor(y)
        if a > blowup:
            return quotients, True
        quotients.append(int(a))
        x = y - a
    return quotients, x == 0.0


def continued_fraction(
    rho: float, max_terms: int = CF_MAX_TERMS, blowup: float = CF_BLOWUP
) -> List[int]:
    """
    Partial quotients [a1, a2, ...] of rho = 1/(a1 + 1/(a2 + ...)).

    The expansion stops at a quotient above ``blowup``, which marks rho as
    rational, or after ``max_terms`` quotients.
    """
    return _expand(rho, max_terms, blowup)[0]


def convergent(quotients: Sequence[int]) -> Fraction:
    value = Fraction(0)
    for a in reversed(quotients):
        value = 1 / (a + value)
    return value


def rational_approximation(
    rho: float, max_terms: int = CF_MAX_TERMS, blowup: float = CF_BLOWUP
) -> Optional[Fraction]:
    """m/n when the continued fraction of rho blows up within max_terms, else None."""
    quotients, terminated = _expand(rho % 1.0, max_terms, blowup)
    if not terminated:
        return None
    return convergent(quotients)


def _orbit_class(theta: float, err_bound: float, tol: float) -> OrbitClass:
    if not math.isfinite(theta) or err_bound > tol:
        return OrbitClass(OrbitKind.CHAOTIC, rho=theta % 1.0, err_bound=err_bound)
    rho = theta % 1.0
    fraction = rational_approximation(rho)
    if fraction is None:
        return OrbitClass(OrbitKind.IRRATIONAL, rho=rho, err_bound=err_bound)
    return OrbitClass(
        OrbitKind.RATIONAL,
        rho=rho,
        err_bound=err_bound,
        m=fraction.numerator,
        n=fraction.denominator,
    )


def classify_point(
    p: PhasePoint,
    params: RtmParams,
    P: int = DEFAULT_P,
    Q: int = DEFAULT_Q,
    tol: float = DEFAULT_TOLERANCE,
    control_w: float = DEFAULT_CONTROL_W,
) -> OrbitClass:
    """
    Classifies the orbit of p as chaotic, rational (island) or irrational (RIC).

    An orbit that leaves |w| <= control_w during the estimate is reported as
    escaped.
    """
    try:
        estimate = refined_rotation_number(p, P, Q, params, control_w=control_w)
    except EscapeError:
        return OrbitClass(OrbitKind.ESCAPED)
    return _orbit_class(estimate.theta_pq, estimate.err_bound, tol)


@dataclasses.dataclass
class BatchClassification:
    kinds: np.ndarray
    rho: np.ndarray
    err_bound: np.ndarray
    m: np.ndarray
    n: np.ndarray


def classify_many(
    psis: np.ndarray,
    ws: np.ndarray,
    params: RtmParams,
    P: int = DEFAULT_P,
    Q: int = DEFAULT_Q,
    tol: float = DEFAULT_TOLERANCE,
    control_w: float = DEFAULT_CONTROL_W,
) -> BatchClassification:
    """
    Vectorized classify_point over many starting points.

    Orbits that escape get OrbitKind.ESCAPED. A start point at p_s itself is
    reported with the linear rotation number of p_s when it is elliptic.
    """
    P, Q = _check_pq(P, Q)
    psis = np.ascontiguousarray(psis, dtype=float).ravel()
    ws = np.ascontiguousarray(ws, dtype=float).ravel()
    if psis.shape != ws.shape:
        raise ValueError(f"psis and ws must have the same length, got {len(psis)} and {len(ws)}")
    size = len(psis)
    theta = np.empty(size)
    theta_prev = np.empty(size)
    status = np.empty(size, dtype=np.int64)
    ref0, use_ref = _unwrap_reference(params)
    q_lo = Q - P - 1
    _kernels.rotation_many(
        psis, ws, params.mu, P, Q, float(control_w), False, ref0, use_ref,
        richardson_weights(P), binomial_weights(P, range(q_lo, Q + 1)),
        theta, theta_prev, status,
    )
    err = np.abs(theta - theta_prev) / 2 ** (P + 1)

    kinds = np.full(size, int(OrbitKind.ESCAPED), dtype=np.int8)
    rho = np.full(size, np.nan)
    m = np.zeros(size, dtype=np.int64)
    n = np.zeros(size, dtype=np.int64)
    for k in range(size):
        if status[k] == _kernels.STATUS_ESCAPED:
            continue
        if status[k] == _kernels.STATUS_DEGENERATE:
            # p_s 本身：用线性化转数
            if params.rotation is None:
                kinds[k] = int(OrbitKind.CHAOTIC)
                continue
            cls = _orbit_class(params.rotation, 0.0, tol)
        else:
            cls = _orbit_class(theta[k], err[k], tol)
        kinds[k] = int(cls.kind)
        rho[k] = cls.rho
        if cls.kind is OrbitKind.RATIONAL:
            m[k], n[k] = cls.m, cls.n
    logger.debug(
        f"classified {size} points at mu={params.mu}: "
        + ", ".join(f"{kind.name.lower()}={int(np.sum(kinds == kind))}" for kind in OrbitKind)
    )
    return BatchClassification(kinds=kinds, rho=rho, err_bound=err, m=m, n=n)


def rotation_profile(
    params: RtmParams,
    psis: Sequence[float],
    line: str = "fix_r0",
    P: int = DEFAULT_P,
    Q: int = DEFAULT_Q,
    tol: float = DEFAULT_TOLERANCE,
) -> List[RotationSample]:
    """
    Rotation numbers along a symmetry line.

    Args:
        params (RtmParams): Map parameters.
        psis: Phases of the sample points.
        line (str): "fix_r0" samples (psi, 0); "fix_r1" samples (psi, eta(psi)/2).
    Returns:
        list[RotationSample]: One entry per phase, in input order.
    """
    psis = np.asarray(psis, dtype=float)
    if line == "fix_r0":
        ws = np.zeros_like(psis)
    elif line == "fix_r1":
        ws = np.array([0.5 * eta(psi, params) for psi in psis])
    else:
        raise ValueError(f"line must be 'fix_r0' or 'fix_r1', got {line!r}")
    batch = classify_many(psis, ws, params, P, Q, tol)
    samples = []
    for k, (psi, w) in enumerate(zip(psis, ws)):
        kind = OrbitKind(int(batch.kinds[k]))
        orbit_class = OrbitClass(
            kind,
            rho=None if kind is OrbitKind.ESCAPED else float(batch.rho[k]),
            err_bound=float(batch.err_bound[k]),
            m=int(batch.m[k]) if kind is OrbitKind.RATIONAL else None,
            n=int(batch.n[k]) if kind is OrbitKind.RATIONAL else None,
        )
        samples.append(
            RotationSample(
                psi=float(psi),
                w=float(w),
                rho=float(batch.rho[k]),
                err_bound=float(batch.err_bound[k]),
                orbit_class=orbit_class,
            )
        )
    return samples
