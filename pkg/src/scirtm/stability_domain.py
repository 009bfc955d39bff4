"""
The orbit method for the stability domain A of p_s and its component D.

Cells live on the lattice ((i + 1/2) l, j l). Only the upper half j >= 0 is
iterated: the lattice is invariant under r0(psi, w) = (psi + w, -w), which
maps the lower cell (i, -j) onto the upper cell (i - j, j), so A's lower half
is the r0-image of its upper half. Cells are whitened by a fast escape pass,
then by repeated deep passes over the layer of cells adjacent to white ones,
where every cell visited by an escaping orbit is whitened too. Surviving cells
are classified by their refined rotation number.
"""

import dataclasses
import enum
import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import ndimage

from . import _kernels
from .core_map import TWO_PI, PhasePoint, RtmParams, energy_spread, eta, params_from_mu
from .errors import DomainError, NoTransitionError
from .local_analysis import ResonanceId
from .parallel import run_jobs
from .rotation_number import DEFAULT_P, DEFAULT_Q, DEFAULT_TOLERANCE, OrbitKind, classify_many

logger = logging.getLogger(__name__)

# 4-连通结构元
FOUR_CONNECTIVITY = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]])

# 稳定域的已知包络
ENVELOPE_PSI = (-0.45, 0.35)
ENVELOPE_W = 0.8


class CellClass(enum.IntEnum):
    WHITE = int(OrbitKind.ESCAPED)
    BLUE = int(OrbitKind.CHAOTIC)
    GREEN = int(OrbitKind.RATIONAL)
    RED = int(OrbitKind.IRRATIONAL)


PALETTE: Dict[CellClass, Tuple[int, int, int]] = {
    CellClass.WHITE: (255, 255, 255),
    CellClass.BLUE: (0, 0, 255),
    CellClass.GREEN: (0, 160, 0),
    CellClass.RED: (220, 0, 0),
}


@dataclasses.dataclass(frozen=True)
class RasterSpec:
    """
    Window, resolution and budgets of a stability raster.

    Attributes:
        psi_range (tuple): Phase window.
        w_range (tuple): Energy window; the raster covers |w| <= max(|w_lo|, |w_hi|).
        cell_side (float): Cell side l.
        escape_budget_fast (int): Iterates per direction in the first pass.
        escape_budget_deep (int): Iterates per direction in the boundary passes.
        control_w (float): An orbit has escaped once |w| > control_w.
        P, Q, tol: Rotation-number settings used to classify surviving cells.
        max_passes (int): Cap on the boundary passes.
    """

    psi_range: Tuple[float, float] = (-0.5, 0.4)
    w_range: Tuple[float, float] = (-0.85, 0.85)
    cell_side: float = 1.0 / 1000
    escape_budget_fast: int = 1000
    escape_budget_deep: int = 100_000
    control_w: float = 1.0
    P: int = DEFAULT_P
    Q: int = DEFAULT_Q
    tol: float = DEFAULT_TOLERANCE
    max_passes: int = 50

    def __post_init__(self):
        if not self.cell_side > 0:
            raise DomainError(f"cell_side must be positive, got {self.cell_side}")
        if not self.psi_range[0] < self.psi_range[1]:
            raise DomainError(f"psi_range must be increasing, got {self.psi_range}")
        if not self.w_range[0] <= 0.0 <= self.w_range[1] or self.w_range[0] == self.w_range[1]:
            raise DomainError(f"w_range must contain 0 in its interior or edge, got {self.w_range}")
        if not self.psi_range[0] < 0.0 < self.psi_range[1]:
            raise DomainError(f"psi_range must contain 0, got {self.psi_range}")
        if self.escape_budget_fast < 1 or self.escape_budget_deep < 1:
            raise DomainError("escape budgets must be >= 1")
        if not self.control_w > 0:
            raise DomainError(f"control_w must be positive, got {self.control_w}")
        if self.max_passes < 1:
            raise DomainError(f"max_passes must be >= 1, got {self.max_passes}")

    @classmethod
    def local(cls, params: RtmParams, cell_side: float, **overrides) -> "RasterSpec":
        """A window fitted to the saddle-center scaling psi ~ mu, w ~ mu^(3/2)."""
        mu = params.mu
        if mu <= 0:
            raise DomainError(f"a local window needs mu > 0, got {mu}")
        margin = 4 * cell_side
        w_max = 0.25 * mu**1.5 + margin
        return cls(
            psi_range=(-0.4 * mu - margin, 0.25 * mu + margin),
            w_range=(-w_max, w_max),
            cell_side=cell_side,
            **overrides,
        )

    @property
    def w_max(self) -> float:
        return max(abs(self.w_range[0]), abs(self.w_range[1]))

    def lattice(self) -> Tuple[int, int, int]:
        """(i_min, number of columns, J): columns i_min..i_min+n-1 and rows -J..J."""
        ell = self.cell_side
        i_min = math.floor(self.psi_range[0] / ell)
        i_max = math.ceil(self.psi_range[1] / ell) - 1
        J = math.ceil(self.w_max / ell)
        return i_min, i_max - i_min + 1, J


@dataclasses.dataclass
class StabilityRaster:
    """
    Classified cells of the full window, row 0 at w = J*l, last row at w = -J*l.

    ``labels`` holds 4-connected component labels of the non-white cells,
    with label 1 reserved for the component of p_s.
    """

    spec: RasterSpec
    mu: float
    cells: np.ndarray
    psi_centers: np.ndarray
    w_centers: np.ndarray
    rho: np.ndarray
    res_m: np.ndarray
    res_n: np.ndarray
    labels: Optional[np.ndarray] = None

    @property
    def cell_side(self) -> float:
        return self.spec.cell_side

    @property
    def center_row(self) -> int:
        return (len(self.w_centers) - 1) // 2

    def ps_cells(self) -> List[Tuple[int, int]]:
        """The two cells whose common edge carries p_s, when inside the window."""
        i_min = int(round(self.psi_centers[0] / self.cell_side - 0.5))
        cols = [-i_min - 1, -i_min]
        return [
            (self.center_row, c) for c in cols if 0 <= c < self.cells.shape[1]
        ]


@dataclasses.dataclass(frozen=True)
class RasterAreas:
    area_A: float
    area_D: float


@dataclasses.dataclass(frozen=True)
class Extents:
    psi_min: float = 0.0
    psi_max: float = 0.0
    w_min: float = 0.0
    w_max: float = 0.0
    capture_efficiency: float = 0.0
    energy_spread: float = 0.0

    @property
    def psi_extent(self) -> float:
        return self.psi_max - self.psi_min

    @property
    def w_extent(self) -> float:
        return self.w_max - self.w_min


@dataclasses.dataclass
class SectionSets:
    mu: np.ndarray
    psi: np.ndarray
    s0: np.ndarray
    s1: np.ndarray


def escape_time(
    p: PhasePoint, budget: int, control_w: float, params: RtmParams
) -> Optional[int]:
    """
    Smallest |n| <= budget with |w_n| > control_w, forward and backward
    interleaved, or None if the orbit stays inside.
    """
    if budget < 1:
        raise DomainError(f"budget must be >= 1, got {budget}")
    step = _kernels.escape_step(
        float(p[0]), float(p[1]), params.mu, int(budget), float(control_w)
    )
    if step == _kernels.NO_ESCAPE:
        return None
    return abs(int(step))


def _frontier(white: np.ndarray, tested: np.ndarray) -> np.ndarray:
    """Untested non-white upper-half cells 4-adjacent to a white one."""
    w = white.astype(bool)
    adj = np.zeros_like(w)
    adj[1:, :] |= w[:-1, :]
    adj[:-1, :] |= w[1:, :]
    adj[:, 1:] |= w[:, :-1]
    adj[:, :-1] |= w[:, 1:]
    if w.shape[0] > 1:
        # 跨 w=0 的邻接：下方格 (i,-1) 等同于上方格 (i-1,1)
        adj[0, 1:] |= w[1, :-1]
        adj[1, :-1] |= w[0, 1:]
    # 窗口外视为白色
    adj[:, 0] = True
    adj[:, -1] = True
    adj[-1, :] = True
    adj[0, 0] = True
    return adj & ~w & ~tested


def _flood(
    white: np.ndarray,
    psi_c: np.ndarray,
    w_c: np.ndarray,
    spec: RasterSpec,
    params: RtmParams,
    i_min: int,
    with_tqdm: bool = False,
) -> int:
    """Boundary passes until no cell turns white; returns the number of passes."""
    tested = np.zeros(white.shape, dtype=bool)
    passes = range(spec.max_passes)
    if with_tqdm:
        from tqdm import tqdm

        passes = tqdm(passes, desc=f"flood mu={params.mu:g}")
    n_pass = 0
    for n_pass in passes:
        frontier = _frontier(white, tested)
        rows, cols = np.nonzero(frontier)
        if len(rows) == 0:
            return n_pass
        tested[rows, cols] = True
        psis = np.ascontiguousarray(psi_c[cols])
        ws = np.ascontiguousarray(w_c[rows])
        steps = np.empty(len(rows), dtype=np.int64)
        _kernels.escape_many(
            psis, ws, params.mu, spec.escape_budget_deep, spec.control_w, steps
        )
        escaped = steps != _kernels.NO_ESCAPE
        before = int(white.sum())
        if escaped.any():
            _kernels.mark_escaping_orbits(
                np.ascontiguousarray(psis[escaped]),
                np.ascontiguousarray(ws[escaped]),
                np.ascontiguousarray(steps[escaped]),
                params.mu,
                spec.cell_side,
                i_min,
                white,
            )
        added = int(white.sum()) - before
        logger.debug(
            f"flood pass {n_pass + 1}: {len(rows)} frontier cells, {int(escaped.sum())} escaped, {added} whitened"
        )
        if added == 0:
            return n_pass + 1
    logger.warning(f"flood at mu={params.mu} stopped at the cap of {spec.max_passes} passes")
    return spec.max_passes


def _mirror(upper: np.ndarray, fill) -> np.ndarray:
    """Full window (rows w = J..-J) from the upper half (rows w = 0..J) by r0."""
    J = upper.shape[0] - 1
    n = upper.shape[1]
    full = np.full((2 * J + 1, n), fill, dtype=upper.dtype)
    full[: J + 1] = upper[::-1]
    for j in range(1, J + 1):
        if j < n:
            full[J + j, j:] = upper[j, : n - j]
    return full


def raster_stability(
    spec: RasterSpec, params: RtmParams, with_tqdm: bool = False
) -> StabilityRaster:
    """
    Rasterizes the stability domain of p_s by the orbit method.

    Args:
        spec (RasterSpec): Window, resolution and budgets.
        params (RtmParams): Map parameters.
        with_tqdm (bool): Show progress of the boundary passes.
    Returns:
        StabilityRaster: Classified and labelled cells.
    """
    ell = spec.cell_side
    i_min, n_psi, J = spec.lattice()
    psi_c = (np.arange(n_psi) + i_min + 0.5) * ell
    w_c = np.arange(J + 1) * ell
    logger.info(f"raster mu={params.mu}: {n_psi}x{J + 1} upper cells, l={ell}")

    white = np.zeros((J + 1, n_psi), dtype=np.uint8)
    _kernels.fast_pass(psi_c, w_c, params.mu, spec.escape_budget_fast, spec.control_w, white)
    logger.debug(f"fast pass whitened {int(white.sum())} cells")
    passes = _flood(white, psi_c, w_c, spec, params, i_min, with_tqdm=with_tqdm)
    logger.info(f"flood finished after {passes} passes, {int(white.sum())} white cells")

    upper = np.full(white.shape, int(CellClass.WHITE), dtype=np.int8)
    rho = np.full(white.shape, np.nan)
    res_m = np.zeros(white.shape, dtype=np.int64)
    res_n = np.zeros(white.shape, dtype=np.int64)
    rows, cols = np.nonzero(white == 0)
    if len(rows):
        batch = classify_many(
            psi_c[cols], w_c[rows], params, spec.P, spec.Q, spec.tol, spec.control_w
        )
        upper[rows, cols] = batch.kinds
        rho[rows, cols] = batch.rho
        res_m[rows, cols] = batch.m
        res_n[rows, cols] = batch.n
        logger.debug(
            f"{int(np.sum(batch.kinds == CellClass.WHITE))} cells escaped during classification"
        )

    raster = StabilityRaster(
        spec=spec,
        mu=params.mu,
        cells=_mirror(upper, int(CellClass.WHITE)),
        psi_centers=psi_c,
        w_centers=np.arange(J, -J - 1, -1) * ell,
        rho=_mirror(rho, np.nan),
        res_m=_mirror(res_m, 0),
        res_n=_mirror(res_n, 0),
    )
    return label_components(raster)


def label_array(
    cells: np.ndarray, seeds: Sequence[Tuple[int, int]] = ()
) -> np.ndarray:
    """
    4-connected labels of the non-white cells; the component of the first
    non-white seed becomes label 1.
    """
    labels, count = ndimage.label(cells != CellClass.WHITE, structure=FOUR_CONNECTIVITY)
    for r, c in seeds:
        seed_label = labels[r, c]
        if seed_label > 0:
            if seed_label != 1:
                swap = labels == 1
                labels[labels == seed_label] = 1
                labels[swap] = seed_label
            break
    return labels.astype(np.int32)


def label_components(raster: StabilityRaster) -> StabilityRaster:
    """Fills the component labels; D is empty when the cells of p_s are white."""
    seeds = raster.ps_cells()
    labels = label_array(raster.cells, seeds)
    if not any(raster.cells[r, c] != CellClass.WHITE for r, c in seeds):
        logger.info(f"p_s cells are white at mu={raster.mu}: D is empty")
        # 没有 p_s 所在分量时，标签 1 不代表 D
        labels = np.where(labels > 0, labels + 1, 0).astype(np.int32)
    return dataclasses.replace(raster, labels=labels)


def areas(raster: StabilityRaster) -> RasterAreas:
    """|A| = l^2 (non-white cells) and |D| = l^2 (cells of label 1)."""
    if raster.labels is None:
        raster = label_components(raster)
    cell = raster.cell_side**2
    return RasterAreas(
        area_A=cell * int(np.count_nonzero(raster.cells != CellClass.WHITE)),
        area_D=cell * int(np.count_nonzero(raster.labels == 1)),
    )


def extents(raster: StabilityRaster) -> Extents:
    """
    Extent of D along w = 0 and along psi = 0, with the capture efficiency
    psi_extent/2pi and the energy spread w_extent/2pi.

    psi = 0 is a cell edge of the lattice, so the w-extent is the mean of the
    extents of the two cell columns that share it.
    """
    if raster.labels is None:
        raster = label_components(raster)
    ell = raster.cell_side
    in_d = raster.labels == 1
    row = in_d[raster.center_row]
    seeds = raster.ps_cells()
    if not row.any() or not seeds:
        return Extents()
    psi_in = raster.psi_centers[row]
    psi_min, psi_max = float(psi_in.min() - ell / 2), float(psi_in.max() + ell / 2)
    lows, highs = [], []
    for _, col in seeds:
        w_in = raster.w_centers[in_d[:, col]]
        if w_in.size:
            lows.append(w_in.min() - ell / 2)
            highs.append(w_in.max() + ell / 2)
    if not lows:
        return Extents()
    w_min, w_max = float(np.mean(lows)), float(np.mean(highs))
    return Extents(
        psi_min=psi_min,
        psi_max=psi_max,
        w_min=w_min,
        w_max=w_max,
        capture_efficiency=(psi_max - psi_min) / TWO_PI,
        energy_spread=energy_spread(w_max - w_min),
    )


def classes_to_rgb(cells: np.ndarray) -> np.ndarray:
    """Maps an array of CellClass values to uint8 RGB in the standard palette."""
    lut = np.zeros((len(CellClass), 3), dtype=np.uint8)
    for cls, color in PALETTE.items():
        lut[int(cls)] = color
    return lut[np.asarray(cells).astype(np.intp)]


def raster_to_rgb(raster: StabilityRaster) -> np.ndarray:
    """(rows, cols, 3) uint8 image in the standard palette, top row at w_max."""
    return classes_to_rgb(raster.cells)


SWEEP_COLUMNS = [
    "mu",
    "ell",
    "area_A",
    "area_D",
    "psi_extent",
    "w_extent",
    "capture_efficiency",
]


def _sweep_row(
    mu: float,
    spec: RasterSpec,
    local: bool,
    params_factory: Callable[[float], RtmParams] = params_from_mu,
) -> dict:
    params = params_factory(mu)
    if local:
        spec = RasterSpec.local(
            params,
            spec.cell_side,
            escape_budget_fast=spec.escape_budget_fast,
            escape_budget_deep=spec.escape_budget_deep,
            control_w=spec.control_w,
            P=spec.P,
            Q=spec.Q,
            tol=spec.tol,
            max_passes=spec.max_passes,
        )
    raster = raster_stability(spec, params)
    a = areas(raster)
    e = extents(raster)
    return {
        "mu": float(mu),
        "ell": spec.cell_side,
        "area_A": a.area_A,
        "area_D": a.area_D,
        "psi_extent": e.psi_extent,
        "w_extent": e.w_extent,
        "capture_efficiency": e.capture_efficiency,
    }


def sweep_mu(
    mu_list: Sequence[float],
    spec_template: RasterSpec = RasterSpec(),
    params_factory: Callable[[float], RtmParams] = params_from_mu,
    local: bool = False,
    **job_options,
) -> pd.DataFrame:
    """
    |A_mu| and |D_mu| (and the extents of D) for each mu.

    Args:
        mu_list: Parameter values; one row each, in this order.
        spec_template (RasterSpec): Raster settings shared by every mu.
        params_factory: Builds RtmParams from mu.
        local (bool): Use RasterSpec.local windows (small mu).
        **job_options: Passed to :func:`scirtm.parallel.run_jobs`.
    Returns:
        pd.DataFrame: Columns mu, ell, area_A, area_D, psi_extent, w_extent,
        capture_efficiency.
    """
    mu_list = [float(mu) for mu in mu_list]
    if not mu_list:
        raise ValueError("mu_list must not be empty")
    job_options.setdefault("description", "sweep")
    rows = run_jobs(
        _sweep_row,
        [(mu, spec_template, local, params_factory) for mu in mu_list],
        **job_options,
    )
    return pd.DataFrame.from_records(rows, columns=SWEEP_COLUMNS)


def large_area_intervals(
    rows: pd.DataFrame, threshold: float = 0.1, column: str = "area_A"
) -> List[Tuple[float, float]]:
    """Maximal runs of consecutive sweep rows (sorted by mu) with area >= threshold."""
    ordered = rows.sort_values("mu")
    intervals = []
    start = end = None
    for mu, value in zip(ordered["mu"], ordered[column]):
        if value >= threshold:
            if start is None:
                start = mu
            end = mu
        elif start is not None:
            intervals.append((float(start), float(end)))
            start = None
    if start is not None:
        intervals.append((float(start), float(end)))
    return intervals


def _section_row(mu: float, psi: np.ndarray, spec: RasterSpec) -> Tuple[np.ndarray, np.ndarray]:
    params = params_from_mu(mu)
    out = []
    for ws in (np.zeros_like(psi), np.array([0.5 * eta(x, params) for x in psi])):
        steps = np.empty(len(psi), dtype=np.int64)
        _kernels.escape_many(psi, ws, params.mu, spec.escape_budget_deep, spec.control_w, steps)
        row = np.full(len(psi), int(CellClass.WHITE), dtype=np.int8)
        alive = steps == _kernels.NO_ESCAPE
        if alive.any():
            batch = classify_many(
                psi[alive], ws[alive], params, spec.P, spec.Q, spec.tol, spec.control_w
            )
            row[alive] = batch.kinds
        out.append(row)
    return out[0], out[1]


def section_sets(
    mu_range: Tuple[float, float],
    psi_range: Tuple[float, float],
    resolution: Tuple[int, int],
    spec: RasterSpec = RasterSpec(),
    **job_options,
) -> SectionSets:
    """
    Classes of the symmetry-line points (psi, 0) and (psi, eta(psi)/2) on a
    (mu, psi) grid.

    Args:
        mu_range, psi_range: Closed intervals of the grid.
        resolution: (number of mu values, number of psi values).
        spec (RasterSpec): Budgets and classification settings.
        **job_options: Passed to :func:`scirtm.parallel.run_jobs`.
    Returns:
        SectionSets: s0 and s1 with one row per mu.
    """
    n_mu, n_psi = (int(r) for r in resolution)
    if n_mu < 1 or n_psi < 1:
        raise DomainError(f"resolution must be positive, got {resolution}")
    if mu_range[0] > mu_range[1] or psi_range[0] > psi_range[1]:
        raise DomainError("ranges must be ordered")
    mu = np.linspace(mu_range[0], mu_range[1], n_mu)
    psi = np.linspace(psi_range[0], psi_range[1], n_psi)
    job_options.setdefault("description", "sections")
    rows = run_jobs(_section_row, [(float(m), psi, spec) for m in mu], **job_options)
    return SectionSets(
        mu=mu,
        psi=psi,
        s0=np.stack([r[0] for r in rows]),
        s1=np.stack([r[1] for r in rows]),
    )


def resonance_in_component(raster: StabilityRaster, r: ResonanceId) -> bool:
    """True while some cell with rotation number m/n belongs to D."""
    if raster.labels is None:
        raster = label_components(raster)
    island = (
        (raster.cells == CellClass.GREEN) & (raster.res_m == r.m) & (raster.res_n == r.n)
    )
    return bool(np.any(island & (raster.labels == 1)))


def _has_escaped(mu: float, r: ResonanceId, spec: RasterSpec) -> bool:
    raster = raster_stability(spec, params_from_mu(mu))
    escaped = not resonance_in_component(raster, r)
    logger.info(f"resonance {r} at mu={mu:.6f}: {'outside' if escaped else 'inside'} D")
    return escaped


def escape_value(
    r: ResonanceId,
    bracket: Tuple[float, float],
    grid_step: float,
    spec: RasterSpec = RasterSpec(),
    **job_options,
) -> Tuple[float, float]:
    """
    Brackets the mu at which the (m, n) islands leave D.

    Bisection runs on the grid bracket[0] + k*grid_step; the predicate is
    "no cell of rotation number m/n belongs to D".

    Returns:
        tuple: (mu_lo, mu_hi), consecutive grid values with the islands inside
        D at mu_lo and outside at mu_hi.
    Raises:
        NoTransitionError: the predicate agrees at both ends of the bracket.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not grid_step > 0 or not lo < hi:
        raise DomainError(f"need grid_step > 0 and an increasing bracket, got {bracket}, {grid_step}")
    k_hi = max(1, math.ceil((hi - lo) / grid_step - 1e-9))
    grid = lambda k: round(lo + k * grid_step, 12)

    ends = run_jobs(_has_escaped, [(grid(0), r, spec), (grid(k_hi), r, spec)], **job_options)
    if ends[0] == ends[1]:
        raise NoTransitionError(
            f"resonance {r} is {'outside' if ends[0] else 'inside'} D at both ends of {bracket}"
        )
    if ends[0]:
        raise NoTransitionError(f"resonance {r} is already outside D at mu={lo}")
    k_lo = 0
    while k_hi - k_lo > 1:
        k_mid = (k_lo + k_hi) // 2
        if _has_escaped(grid(k_mid), r, spec):
            k_hi = k_mid
        else:
            k_lo = k_mid
    return grid(k_lo), grid(k_hi)
