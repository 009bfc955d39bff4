"""
One function per subcommand. Each reads a validated RunConfig and writes its
table to ``config.out`` (CSV) or to the given stream.
"""

import logging
import math
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, TextIO

import numpy as np

import scirtm.file.csv
import scirtm.file.ppm

from ..core_map import LinearType, PhasePoint, orbit, params_from_mu
from ..hamiltonian import HamiltonianId, level_curves, polylines_to_rows
from ..manifolds import (
    Branch,
    PrecisionContext,
    SymmetryLine,
    find_spo,
    globalize,
    lobe_area,
    orbit_polylines,
    refine_spo,
    resonance_obstruction,
    splitting_fit,
    spo_candidates,
    stable_series,
    unstable_series,
)
from ..rotation_number import classify_point, rotation_profile
from ..stability_domain import (
    SWEEP_COLUMNS,
    areas,
    classes_to_rgb,
    extents,
    raster_stability,
    raster_to_rgb,
    section_sets,
    sweep_mu,
)
from .config import RunConfig, parse_pair, parse_range, parse_resonance

logger = logging.getLogger(__name__)

RASTER_COLUMNS = [
    "mu",
    "ell",
    "area_A",
    "area_D",
    "psi_min",
    "psi_max",
    "w_min",
    "w_max",
    "capture_efficiency",
    "energy_spread",
]


def emit(config: RunConfig, stream: TextIO, rows, columns: Optional[Sequence[str]] = None) -> None:
    """The command's main table: to ``config.out`` when set, else to ``stream``."""
    if config.out:
        scirtm.file.csv.write(config.out, rows, columns)
        logger.info(f"wrote {config.out}")
    else:
        stream.write(scirtm.file.csv.dumps(rows, columns))


def sibling(config: RunConfig, suffix: str) -> Optional[Path]:
    """A path next to ``config.out``: out.csv -> out<suffix>."""
    if not config.out:
        return None
    out = Path(config.out)
    return out.with_name(out.stem + suffix)


def run_map(config: RunConfig, stream: TextIO) -> None:
    params = params_from_mu(config.require_mu())
    path = orbit(PhasePoint(config.psi, config.w), config.steps, params)
    rows = [{"step": k, "psi": float(p), "w": float(w)} for k, (p, w) in enumerate(path)]
    emit(config, stream, rows, ["step", "psi", "w"])


def run_classify(config: RunConfig, stream: TextIO) -> None:
    params = params_from_mu(config.require_mu())
    cls = classify_point(
        PhasePoint(config.psi, config.w), params, config.P, config.Q, config.tol, config.control_w
    )
    row = {
        "psi": config.psi,
        "w": config.w,
        "mu": params.mu,
        "class": cls.kind.name.lower(),
        "rho": cls.rho,
        "err_bound": cls.err_bound,
        "m": cls.m,
        "n": cls.n,
    }
    emit(config, stream, [row], list(row))


def run_rotnum(config: RunConfig, stream: TextIO) -> None:
    params = params_from_mu(config.require_mu())
    if config.psi_range:
        lo, hi = parse_pair(config.psi_range)
        psis = np.linspace(lo, hi, config.points)
    else:
        psis = np.array([config.psi])
    samples = rotation_profile(params, psis, config.line, config.P, config.Q, config.tol)
    rows = [
        {
            "psi": s.psi,
            "w": s.w,
            "mu": params.mu,
            "theta_pq": s.rho,
            "err_bound": s.err_bound,
            "class": str(s.orbit_class),
        }
        for s in samples
    ]
    emit(config, stream, rows, ["psi", "w", "mu", "theta_pq", "err_bound", "class"])


def _raster_row(mu: float, raster) -> Dict[str, Any]:
    a = areas(raster)
    e = extents(raster)
    return {
        "mu": mu,
        "ell": raster.cell_side,
        "area_A": a.area_A,
        "area_D": a.area_D,
        "psi_min": e.psi_min,
        "psi_max": e.psi_max,
        "w_min": e.w_min,
        "w_max": e.w_max,
        "capture_efficiency": e.capture_efficiency,
        "energy_spread": e.energy_spread,
    }


def run_raster(config: RunConfig, stream: TextIO) -> None:
    mu = config.require_mu()
    raster = raster_stability(config.raster_spec(), params_from_mu(mu), with_tqdm=config.progress)
    image = sibling(config, ".ppm")
    if image is not None:
        scirtm.file.ppm.write(image, raster_to_rgb(raster))
        logger.info(f"wrote {image}")
    emit(config, stream, [_raster_row(mu, raster)], RASTER_COLUMNS)


def run_extents(config: RunConfig, stream: TextIO) -> None:
    mu = config.require_mu()
    raster = raster_stability(config.raster_spec(), params_from_mu(mu), with_tqdm=config.progress)
    row = _raster_row(mu, raster)
    row["psi_extent"] = row["psi_max"] - row["psi_min"]
    row["w_extent"] = row["w_max"] - row["w_min"]
    columns = ["mu", "ell", "psi_extent", "w_extent", "capture_efficiency", "energy_spread"]
    emit(config, stream, [row], columns)


def _mu_values(config: RunConfig) -> List[float]:
    if config.mu_range:
        return parse_range(config.mu_range)
    return [config.require_mu()]


def run_sweep(config: RunConfig, stream: TextIO) -> None:
    frame = sweep_mu(
        _mu_values(config), config.raster_spec(), local=config.local, **config.job_options()
    )
    emit(config, stream, frame, SWEEP_COLUMNS)


def run_sections(config: RunConfig, stream: TextIO) -> None:
    mus = _mu_values(config)
    psi_range = parse_pair(config.psi_range) if config.psi_range else (-math.pi, math.pi)
    sets = section_sets(
        (min(mus), max(mus)), psi_range, (len(mus), config.points), config.raster_spec(),
        **config.job_options(),
    )
    for name in ("s0", "s1"):
        image = sibling(config, f"_{name}.ppm")
        if image is not None:
            # 最大的 mu 在顶行
            scirtm.file.ppm.write(image, classes_to_rgb(np.flipud(getattr(sets, name))))
            logger.info(f"wrote {image}")
    rows = [
        {"mu": float(mu), "psi": float(psi), "s0": int(sets.s0[i, j]), "s1": int(sets.s1[i, j])}
        for i, mu in enumerate(sets.mu)
        for j, psi in enumerate(sets.psi)
    ]
    emit(config, stream, rows, ["mu", "psi", "s0", "s1"])


def _levels(text: str) -> List[float]:
    return [float(v) for v in str(text).split(",") if v.strip()]


def run_hamiltonian(config: RunConfig, stream: TextIO) -> None:
    params = params_from_mu(config.require_mu())
    hid = HamiltonianId(config.scenario, config.ham_order)
    levels = _levels(config.levels) if config.levels is not None else []
    if not levels:
        value = hid.evaluate(PhasePoint(config.psi, config.w), params)
        row = {"scenario": hid.scenario.value, "order": hid.order, "mu": params.mu,
               "psi": config.psi, "w": config.w, "value": value}
        emit(config, stream, [row], list(row))
        return
    spec = config.raster_spec()
    H = np.vectorize(lambda x, y: hid.evaluate(PhasePoint(x, y), params), otypes=[float])
    window = (*spec.psi_range, -spec.w_max, spec.w_max)
    curves = level_curves(H, window, levels, n=config.points)
    emit(config, stream, polylines_to_rows(curves), ["level", "curve", "psi", "w"])


def _hyperbolic_base(config: RunConfig, params, ctx: PrecisionContext):
    if config.resonance is None:
        return None
    spo = find_spo(parse_resonance(config.resonance), SymmetryLine(config.line), params,
                   kind=LinearType.HYPERBOLIC)
    return refine_spo(spo, ctx)


def run_manifold(config: RunConfig, stream: TextIO) -> None:
    params = params_from_mu(config.require_mu())
    ctx = PrecisionContext(config.bits)
    base = _hyperbolic_base(config, params, ctx)
    solve = unstable_series if Branch(config.branch) is Branch.UNSTABLE else stable_series
    series = solve(base, config.order, ctx, params)
    rows = []
    curve = 0
    for sign in (1, -1):
        polyline = globalize(series, config.domains, params, sign=sign)
        images = orbit_polylines(polyline, base, params) if base is not None else [polyline]
        for image in images:
            rows.extend({"curve": curve, "psi": float(p), "w": float(w)} for p, w in image.points)
            curve += 1
    emit(config, stream, rows, ["curve", "psi", "w"])


def run_lobe(config: RunConfig, stream: TextIO) -> None:
    mu = config.require_mu()
    result = lobe_area(mu, PrecisionContext(config.bits), config.order, cross_check=config.cross_check)
    row = {
        "mu": result.mu,
        "h": result.h,
        "area": float(result.area),
        "digits": result.digits,
        "quadrature": float(result.quadrature) if result.quadrature is not None else None,
        "agreement": result.agreement,
        "bits": result.mantissa_bits,
    }
    emit(config, stream, [row], list(row))


def run_splitfit(config: RunConfig, stream: TextIO) -> None:
    lo, hi = parse_pair(config.h_range)
    grid = np.linspace(lo, hi, config.h_points)
    fit = splitting_fit(grid, PrecisionContext(config.bits), config.order, **config.job_options())
    points = sibling(config, "_points.csv")
    if points is not None:
        rows = [
            {"h": float(h), "area": float(a), "scaled": float(s), "residual": float(r)}
            for h, a, s, r in zip(fit.h, fit.areas, fit.scaled, fit.residuals)
        ]
        scirtm.file.csv.write(points, rows, ["h", "area", "scaled", "residual"])
    row = {
        "a0": fit.a0,
        "a1": fit.a1,
        "jackknife_a0": fit.jackknife_a0,
        "residual": fit.fit.residual,
        "n_points": len(fit.h),
        "bits": config.bits,
    }
    emit(config, stream, [row], list(row))


def run_spo(config: RunConfig, stream: TextIO) -> None:
    params = params_from_mu(config.require_mu())
    if config.resonance is None:
        raise ValueError("spo needs --resonance m/n")
    r = parse_resonance(config.resonance)
    kind = LinearType(config.kind) if config.kind else None
    rows = [
        {
            "m": c.resonance.m,
            "n": c.resonance.n,
            "line": c.line.value,
            "psi": c.psi,
            "w": c.w,
            "trace": c.trace,
            "type": c.linear_type.value,
        }
        for c in spo_candidates(r, SymmetryLine(config.line), params)
        if kind is None or c.linear_type is kind
    ]
    emit(config, stream, rows, ["m", "n", "line", "psi", "w", "trace", "type"])


def run_obstruct(config: RunConfig, stream: TextIO) -> None:
    params = params_from_mu(config.require_mu())
    r = parse_resonance(config.resonance or "1/3")
    crossed = resonance_obstruction(params, r, PrecisionContext(config.bits), order=config.order)
    row = {"mu": params.mu, "m": r.m, "n": r.n, "obstructed": int(crossed)}
    emit(config, stream, [row], list(row))


def run_repro(config: RunConfig, stream: TextIO) -> None:
    from . import repro

    if config.list_recipes:
        repro.list_recipes(config, stream)
        return
    if config.recipe is None:
        raise ValueError("repro needs a recipe id or --list")
    repro.run_recipe(config.recipe, config, stream)


COMMANDS: Dict[str, Callable[[RunConfig, TextIO], None]] = {
    "map": run_map,
    "classify": run_classify,
    "rotnum": run_rotnum,
    "raster": run_raster,
    "sweep": run_sweep,
    "sections": run_sections,
    "extents": run_extents,
    "hamiltonian": run_hamiltonian,
    "manifold": run_manifold,
    "lobe": run_lobe,
    "splitfit": run_splitfit,
    "spo": run_spo,
    "obstruct": run_obstruct,
    "repro": run_repro,
}
