"""
Reproduction recipes: named, desk-scale runs of the published results.

Each recipe returns a table that carries the computed values next to the
reference values they are checked against.
"""

import dataclasses
import logging
import math
from pathlib import Path
from typing import Callable, Dict, List, Optional, TextIO

import numpy as np
import pandas as pd

import scirtm.file.csv
import scirtm.file.json
import scirtm.file.ppm

from ..core_map import PhasePoint, params_from_mu
from ..local_analysis import (
    ESCAPE_TABLE,
    ResonanceId,
    asymptotic_area_saddle_center,
    asymptotic_area_third_order,
    classify_local_stability,
    flat_rotation_fit,
    twist_root,
)
from ..manifolds import PrecisionContext, lobe_area, resonance_obstruction, splitting_fit
from ..manifolds.homoclinic import A0
from ..rotation_number import OrbitKind, refined_rotation_number, rotation_profile
from ..stability_domain import areas, escape_value, extents, raster_stability, raster_to_rgb, sweep_mu
from .config import RunConfig, parse_range

logger = logging.getLogger(__name__)

RecipeRun = Callable[[RunConfig, Optional[Path]], pd.DataFrame]


@dataclasses.dataclass(frozen=True)
class Recipe:
    id: str
    description: str
    criterion: str
    run: RecipeRun


def _twist_root(config: RunConfig, out_dir: Optional[Path]) -> pd.DataFrame:
    root = twist_root()
    return pd.DataFrame([{
        "theta_r": root.theta_r,
        "mu_r": root.mu_r,
        "reference_theta_r": 1.842998343412199,
        "reference_mu_r": 2.537706055658189,
    }])


def _local_stability(config: RunConfig, out_dir: Optional[Path]) -> pd.DataFrame:
    grid = [-0.5] + [round(0.1 * k, 10) for k in range(46)] + [3.0, 4.0, twist_root().mu_r, 2.0]
    rows = []
    for mu in grid:
        verdict = classify_local_stability(mu)
        rows.append({
            "mu": mu,
            "stable": verdict.stable,
            "reason": verdict.reason.value,
            "reference": bool(0.0 < mu <= 4.0 and not math.isclose(mu, 3.0)),
        })
    return pd.DataFrame(rows)


def _rotnum_limit(config: RunConfig, out_dir: Optional[Path]) -> pd.DataFrame:
    rows = []
    for mu in (0.5, 1.5, 2.5, 3.5):
        estimate = refined_rotation_number(
            PhasePoint(1e-4, 0.0), config.P, config.Q, params_from_mu(mu), config.control_w
        )
        reference = math.acos(1.0 - mu / 2.0) / (2.0 * math.pi)
        rows.append({
            "mu": mu,
            "theta_pq": estimate.rho,
            "err_bound": estimate.err_bound,
            "reference": reference,
            "difference": estimate.rho - reference,
        })
    return pd.DataFrame(rows)


def _flat_fit(config: RunConfig, out_dir: Optional[Path]) -> pd.DataFrame:
    root = twist_root()
    params = params_from_mu(root.mu_r)
    samples = rotation_profile(params, np.linspace(-0.05, 0.05, 41), "fix_r0", config.P, config.Q, config.tol)
    fit = flat_rotation_fit(
        (s.psi, s.rho) for s in samples if s.orbit_class.kind is OrbitKind.IRRATIONAL
    )
    return pd.DataFrame([{
        "rho0": fit.rho0,
        "rho2": fit.rho2,
        "n_samples": fit.n_samples,
        "reference_rho0": root.theta_r / (2.0 * math.pi),
        "reference_rho2": -200.0,
    }])


def _raster_rows(
    config: RunConfig, out_dir: Optional[Path], name: str, references: Dict[float, Dict[str, float]]
) -> pd.DataFrame:
    rows = []
    for mu, reference in references.items():
        raster = raster_stability(config.raster_spec(), params_from_mu(mu), with_tqdm=config.progress)
        if out_dir is not None:
            scirtm.file.ppm.write(out_dir / f"{name}-{mu}.ppm", raster_to_rgb(raster))
        a = areas(raster)
        e = extents(raster)
        row = {
            "mu": mu,
            "ell": raster.cell_side,
            "area_A": a.area_A,
            "area_D": a.area_D,
            "psi_extent": e.psi_extent,
            "w_extent": e.w_extent,
            "capture_efficiency": e.capture_efficiency,
        }
        row.update({f"reference_{k}": v for k, v in reference.items()})
        rows.append(row)
    return pd.DataFrame(rows)


def _raster_1_4(config: RunConfig, out_dir: Optional[Path]) -> pd.DataFrame:
    references = {
        2.037: {"area_A": 0.1166, "area_D": 0.1103},
        2.038: {"area_D": 0.0151},
    }
    return _raster_rows(config, out_dir, "raster-mu", references)


def _extents_mu_2(config: RunConfig, out_dir: Optional[Path]) -> pd.DataFrame:
    references = {2.0: {"psi_extent": 0.28, "w_extent": 0.4, "capture_efficiency": 0.04}}
    return _raster_rows(config, out_dir, "extents-mu", references)


def _escape(m: int, n: int) -> RecipeRun:
    def run(config: RunConfig, out_dir: Optional[Path]) -> pd.DataFrame:
        r = ResonanceId(m, n)
        row = next(e for e in ESCAPE_TABLE if e.resonance == r)
        lo = math.floor(row.mu_star[0] * 100) / 100 - 0.02
        spec = dataclasses.replace(config.raster_spec(), cell_side=1.0 / 500)
        mu_lo, mu_hi = escape_value(r, (lo, lo + 0.05), 0.01, spec, **config.job_options())
        return pd.DataFrame([{
            "m": m,
            "n": n,
            "mu_lo": mu_lo,
            "mu_hi": mu_hi,
            "reference_lo": row.mu_star[0],
            "reference_hi": row.mu_star[1],
        }])

    return run


def _sweep_small_mu(config: RunConfig, out_dir: Optional[Path]) -> pd.DataFrame:
    spec = dataclasses.replace(config.raster_spec(), cell_side=1.0 / 2000)
    frame = sweep_mu(parse_range("0.05:0.30:0.05"), spec, local=True, **config.job_options())
    frame["reference_area_A"] = [asymptotic_area_saddle_center(mu) for mu in frame["mu"]]
    frame["ratio"] = frame["area_A"] / frame["reference_area_A"]
    return frame


def _sweep_third_order(config: RunConfig, out_dir: Optional[Path]) -> pd.DataFrame:
    spec = dataclasses.replace(config.raster_spec(), cell_side=1.0 / 2000)
    frame = sweep_mu([2.9, 3.1], spec, **config.job_options())
    frame["reference_area_D"] = [asymptotic_area_third_order(mu - 3.0) for mu in frame["mu"]]
    frame["ratio"] = frame["area_D"] / frame["reference_area_D"]
    return frame


def _global_extrema(config: RunConfig, out_dir: Optional[Path]) -> pd.DataFrame:
    mus = parse_range("1.80:2.00:0.02") + [4.2, 4.6]
    frame = sweep_mu(mus, config.raster_spec(), **config.job_options())
    best = frame.loc[frame["mu"] <= 2.0, "area_A"].idxmax()
    frame["is_max_A"] = frame.index == best
    logger.info(f"largest |A| on the grid: {frame.loc[best, 'area_A']:.4f} at mu={frame.loc[best, 'mu']}")
    return frame


def _lobe(config: RunConfig, out_dir: Optional[Path]) -> pd.DataFrame:
    result = lobe_area(0.859, PrecisionContext(config.bits))
    return pd.DataFrame([{
        "mu": result.mu,
        "area": float(result.area),
        "digits": result.digits,
        "agreement": result.agreement,
        "bits": result.mantissa_bits,
        "reference": 3.808194826948494e-5,
    }])


def _splitfit(config: RunConfig, out_dir: Optional[Path]) -> pd.DataFrame:
    fit = splitting_fit(
        np.linspace(0.30, 0.60, 8), PrecisionContext(max(config.bits, 512)), **config.job_options()
    )
    return pd.DataFrame([{
        "a0": fit.a0,
        "a1": fit.a1,
        "jackknife_a0": fit.jackknife_a0,
        "reference_a0": A0,
    }])


def _obstruction(config: RunConfig, out_dir: Optional[Path]) -> pd.DataFrame:
    crossed = resonance_obstruction(params_from_mu(2.9), ResonanceId(1, 3), PrecisionContext(config.bits))
    return pd.DataFrame([{"mu": 2.9, "m": 1, "n": 3, "obstructed": int(crossed), "reference": 1}])


RECIPES: List[Recipe] = [
    Recipe("twist-root", "Zero of the twist coefficient", "theta_r, mu_r to 12 digits", _twist_root),
    Recipe("local-stability", "Local stability verdicts over a mu grid",
           "stable exactly on (0, 4] without 3", _local_stability),
    Recipe("rotnum-limit", "Rotation number next to p_s", "acos(1 - mu/2)/2pi within 1e-7", _rotnum_limit),
    Recipe("flat-fit", "Rotation number along Fix(r0) at mu_r",
           "rho2 in [-400, -100], rho0 = theta_r/2pi within 1e-6", _flat_fit),
    Recipe("raster-mu-2.037", "Rasters on both sides of the (1,4) escape",
           "|A|, |D| at 2.037 within 5%, |D| at 2.038 within 10%", _raster_1_4),
    Recipe("escape-1-4", "Escape of the (1,4) islands", "bracket (2.03, 2.04)", _escape(1, 4)),
    Recipe("escape-1-3", "Escape of the (1,3) islands", "bracket (2.85, 2.86)", _escape(1, 3)),
    Recipe("escape-2-5", "Escape of the (2,5) islands", "bracket (3.73, 3.74)", _escape(2, 5)),
    Recipe("sweep-small-mu", "|A| for small mu", "within 10% of 6 mu^(5/2)/5pi^2", _sweep_small_mu),
    Recipe("sweep-third-order", "|D| near mu = 3", "within 15% of 9 eps^2/2pi^2", _sweep_third_order),
    Recipe("global-extrema", "Largest |A| and the vanishing domains",
           "max |A| = 0.172 near mu = 1.91; |D|(4.2) = |A|(4.6) = 0", _global_extrema),
    Recipe("lobe-mu-0.859", "Lobe area at mu = 0.859", "3.808194826948494e-5 to 12 digits", _lobe),
    Recipe("splitfit", "Splitting asymptotics over h in [0.30, 0.60]",
           "a0 = 1.42099e5 within 0.01%, |a1|/a0 < 1e-3", _splitfit),
    Recipe("obstruction-2.9", "W^u(p_h) against W^s of the (1,3) SPO", "transversal crossing", _obstruction),
    Recipe("extents-mu-2", "Acceptance extents at mu = 2",
           "0.28, 0.4 and 0.04 within 15%", _extents_mu_2),
]


def get_recipe(recipe_id: str) -> Recipe:
    for recipe in RECIPES:
        if recipe.id == recipe_id:
            return recipe
    known = ", ".join(r.id for r in RECIPES)
    raise ValueError(f"unknown recipe {recipe_id!r}; known: {known}")


def catalogue() -> List[Dict[str, str]]:
    return [{"id": r.id, "description": r.description, "criterion": r.criterion} for r in RECIPES]


def list_recipes(config: RunConfig, stream: TextIO) -> None:
    entries = catalogue()
    if config.out:
        scirtm.file.json.write(Path(config.out) / "catalogue.json", {"recipes": entries})
    stream.write(scirtm.file.csv.dumps(entries, ["id", "description", "criterion"]))


def run_recipe(recipe_id: str, config: RunConfig, stream: TextIO) -> pd.DataFrame:
    """Runs one recipe; its table goes to stdout and, with --out DIR, to DIR/<id>.csv."""
    recipe = get_recipe(recipe_id)
    out_dir = Path(config.out) if config.out else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
    logger.info(f"running recipe {recipe.id}: {recipe.description}")
    frame = recipe.run(config, out_dir)
    if out_dir is not None:
        scirtm.file.csv.write(out_dir / f"{recipe.id}.csv", frame)
    stream.write(scirtm.file.csv.dumps(frame))
    return frame
