"""Tests for scirtm.stability_domain module."""

import math

import numpy as np
import pandas as pd
import pytest

from scirtm.core_map import PhasePoint, params_from_mu
from scirtm.errors import DomainError
from scirtm.local_analysis import (
    ResonanceId,
    asymptotic_area_saddle_center,
    asymptotic_area_third_order,
)
from scirtm.parallel import resolve_workers
from scirtm.stability_domain import (
    PALETTE,
    SWEEP_COLUMNS,
    CellClass,
    RasterSpec,
    StabilityRaster,
    _mirror,
    areas,
    classes_to_rgb,
    escape_time,
    escape_value,
    extents,
    label_array,
    label_components,
    large_area_intervals,
    raster_stability,
    raster_to_rgb,
    resonance_in_component,
    section_sets,
    sweep_mu,
)

# 粗网格，只检查结构
COARSE = RasterSpec(
    cell_side=1 / 50, escape_budget_fast=200, escape_budget_deep=2000, P=3, Q=10, max_passes=10
)


def synthetic_raster():
    """
    A 7x4 window with cell side 1/4: a plus-shaped component around p_s and
    one isolated cell in the top-left corner.
    """
    spec = RasterSpec(psi_range=(-0.5, 0.5), w_range=(-0.75, 0.75), cell_side=0.25)
    cells = np.full((7, 4), int(CellClass.WHITE), dtype=np.int8)
    for r, c in [(3, 1), (3, 2), (2, 2), (4, 2)]:
        cells[r, c] = CellClass.RED
    cells[3, 1] = CellClass.GREEN
    cells[0, 0] = CellClass.BLUE
    res_m = np.zeros(cells.shape, dtype=np.int64)
    res_n = np.zeros(cells.shape, dtype=np.int64)
    res_m[3, 1], res_n[3, 1] = 1, 4
    return StabilityRaster(
        spec=spec,
        mu=2.0,
        cells=cells,
        psi_centers=np.array([-0.375, -0.125, 0.125, 0.375]),
        w_centers=np.arange(3, -4, -1) * 0.25,
        rho=np.full(cells.shape, np.nan),
        res_m=res_m,
        res_n=res_n,
    )


class TestRasterSpec:
    """Test cases for RasterSpec."""

    @pytest.mark.parametrize(
        "kwargs, match",
        [
            ({"cell_side": 0.0}, "cell_side"),
            ({"psi_range": (0.1, 0.4)}, "contain 0"),
            ({"psi_range": (0.4, -0.4)}, "increasing"),
            ({"w_range": (0.2, 0.5)}, "w_range"),
            ({"max_passes": 0}, "max_passes"),
            ({"control_w": -1.0}, "control_w"),
            ({"escape_budget_fast": 0}, "budgets"),
        ],
    )
    def test_validation(self, kwargs, match):
        with pytest.raises(DomainError, match=match):
            RasterSpec(**kwargs)

    def test_lattice(self):
        spec = RasterSpec(psi_range=(-0.5, 0.5), w_range=(-0.75, 0.75), cell_side=0.25)
        assert spec.lattice() == (-2, 4, 3)
        assert spec.w_max == 0.75

    def test_local_window(self):
        spec = RasterSpec.local(params_from_mu(0.1), 1 / 2000)
        assert spec.psi_range[0] < 0 < spec.psi_range[1]
        assert spec.w_range[0] == -spec.w_range[1]
        with pytest.raises(DomainError, match="mu > 0"):
            RasterSpec.local(params_from_mu(0.0), 1 / 2000)


class TestCells:
    """Test cases for mirroring, labelling, areas and extents on a hand-made raster."""

    def test_mirror_is_r0_image(self):
        """Lower cell (i, -j) equals upper cell (i - j, j)."""
        upper = np.arange(15).reshape(3, 5)
        full = _mirror(upper, -1)
        J = 2
        assert np.array_equal(full[: J + 1], upper[::-1])
        for j in range(1, J + 1):
            for c in range(5):
                expected = upper[j, c - j] if c >= j else -1
                assert full[J + j, c] == expected

    def test_label_array_seed(self):
        cells = np.array([[3, 0, 3], [0, 0, 0], [3, 0, 3]])
        labels = label_array(cells, seeds=[(2, 2)])
        assert labels[2, 2] == 1
        assert len(np.unique(labels[labels > 0])) == 4

    def test_areas(self):
        raster = label_components(synthetic_raster())
        assert raster.labels[3, 1] == 1
        result = areas(raster)
        assert result.area_A == pytest.approx(5 * 0.0625)
        assert result.area_D == pytest.approx(4 * 0.0625)

    def test_extents(self):
        """The w-extent is the mean over the two columns that meet at psi = 0."""
        e = extents(synthetic_raster())
        assert (e.psi_min, e.psi_max) == pytest.approx((-0.25, 0.25))
        # 两列：+-0.375 与 +-0.125
        assert (e.w_min, e.w_max) == pytest.approx((-0.25, 0.25))
        assert e.energy_spread == pytest.approx(0.5 / (2 * math.pi))
        assert e.capture_efficiency == pytest.approx(0.5 / (2 * math.pi))

    def test_empty_component(self):
        """White p_s cells leave D empty."""
        raster = synthetic_raster()
        raster.cells[3, 1] = raster.cells[3, 2] = CellClass.WHITE
        raster = label_components(raster)
        assert areas(raster).area_D == 0.0
        assert extents(raster).psi_extent == 0.0

    def test_resonance_in_component(self):
        raster = synthetic_raster()
        assert resonance_in_component(raster, ResonanceId(1, 4))
        assert not resonance_in_component(raster, ResonanceId(1, 3))

    def test_palette(self):
        rgb = classes_to_rgb(np.array([[0, 1], [2, 3]]))
        assert rgb.dtype == np.uint8
        assert tuple(rgb[0, 0]) == PALETTE[CellClass.WHITE]
        assert tuple(rgb[1, 1]) == PALETTE[CellClass.RED]

    def test_large_area_intervals(self):
        rows = pd.DataFrame({"mu": [0.5, 0.1, 0.2, 0.3, 0.4], "area_A": [0.2, 0.0, 0.15, 0.12, 0.05]})
        assert large_area_intervals(rows) == [(0.2, 0.3), (0.5, 0.5)]


class TestEscapeTime:
    """Test cases for escape_time."""

    def test_escapes_at_once(self):
        assert escape_time(PhasePoint(3.0, 0.0), 10, 1.0, params_from_mu(1.0)) == 1

    def test_fixed_point_stays(self):
        assert escape_time(PhasePoint(0.0, 0.0), 100, 1.0, params_from_mu(1.0)) is None

    def test_budget(self):
        with pytest.raises(DomainError, match="budget"):
            escape_time(PhasePoint(0.0, 0.0), 0, 1.0, params_from_mu(1.0))


class TestRaster:
    """Test cases for raster_stability on a coarse grid."""

    def test_coarse_raster(self):
        raster = raster_stability(COARSE, params_from_mu(2.0))
        i_min, n_psi, J = COARSE.lattice()
        assert raster.cells.shape == (2 * J + 1, n_psi)
        assert raster_to_rgb(raster).shape == (2 * J + 1, n_psi, 3)
        # 下半部分是上半部分的 r0 像
        for j in range(1, J + 1):
            assert np.array_equal(raster.cells[J + j, j:], raster.cells[J - j, : n_psi - j])
        for r, c in raster.ps_cells():
            assert raster.labels[r, c] == 1
        result = areas(raster)
        assert 0.05 < result.area_D <= result.area_A < 0.3
        assert extents(raster).psi_extent > 0

    def test_sweep(self):
        frame = sweep_mu([2.0, 1.0], COARSE)
        assert list(frame.columns) == SWEEP_COLUMNS
        assert list(frame["mu"]) == [2.0, 1.0]
        assert (frame["area_A"] >= frame["area_D"]).all()

    def test_sweep_empty(self):
        with pytest.raises(ValueError, match="empty"):
            sweep_mu([], COARSE)

    def test_sections(self):
        """p_s itself sits on Fix(r0) and is resonant at mu = 1 and mu = 2."""
        sets = section_sets((1.0, 2.0), (-0.3, 0.3), (2, 5), COARSE)
        assert sets.s0.shape == (2, 5)
        assert sets.s1.shape == (2, 5)
        assert (sets.s0[:, 2] == CellClass.GREEN).all()

    def test_sections_bad_resolution(self):
        with pytest.raises(DomainError, match="resolution"):
            section_sets((1.0, 2.0), (-0.3, 0.3), (0, 5), COARSE)

    def test_escape_value_bracket(self):
        with pytest.raises(DomainError, match="bracket"):
            escape_value(ResonanceId(1, 4), (2.1, 2.0), 0.01, COARSE)

    def test_same_output_for_any_worker_count(self):
        """Two runs and two worker counts give the same raster and the same CSV text."""
        first = raster_stability(COARSE, params_from_mu(2.0))
        second = raster_stability(COARSE, params_from_mu(2.0))
        assert np.array_equal(first.cells, second.cells)
        assert np.array_equal(first.labels, second.labels)
        serial = sweep_mu([2.0, 1.0], COARSE, n_jobs=1)
        pooled = sweep_mu([2.0, 1.0], COARSE, n_jobs=2, process=True)
        pd.testing.assert_frame_equal(serial, pooled, check_exact=True)
        assert serial.to_csv(index=False) == pooled.to_csv(index=False)


def _pool():
    n = resolve_workers()
    return {"n_jobs": n, "process": n > 1}


@pytest.mark.slow
class TestPublishedValues:
    """Desk-scale reproductions of published areas, extents and escape values."""

    def test_areas_at_the_1_4_escape(self):
        """Just below the (1,4) escape D still holds the islands; just above it collapses."""
        frame = sweep_mu([2.037, 2.038], RasterSpec(), **_pool())
        before, after = frame.iloc[0], frame.iloc[1]
        assert before["area_A"] == pytest.approx(0.1166, rel=0.05)
        assert before["area_D"] == pytest.approx(0.1103, rel=0.05)
        assert after["area_D"] == pytest.approx(0.0151, rel=0.10)

    def test_saddle_center_asymptotics(self):
        mus = [0.05, 0.10, 0.15, 0.20, 0.25, 0.30]
        frame = sweep_mu(mus, RasterSpec(cell_side=1 / 2000), local=True, **_pool())
        expected = [asymptotic_area_saddle_center(mu) for mu in mus]
        assert frame["area_A"].to_numpy() == pytest.approx(expected, rel=0.10)

    def test_third_order_asymptotics(self):
        frame = sweep_mu([2.9, 3.1], RasterSpec(cell_side=1 / 2000), **_pool())
        expected = [asymptotic_area_third_order(eps) for eps in (-0.1, 0.1)]
        assert frame["area_D"].to_numpy() == pytest.approx(expected, rel=0.15)

    def test_global_extrema(self):
        """|A| peaks near mu = 1.91; D is empty at 4.2 and A at 4.6."""
        mus = [round(1.80 + 0.02 * k, 2) for k in range(11)] + [4.2, 4.6]
        frame = sweep_mu(mus, RasterSpec(), **_pool())
        window = frame[frame["mu"] <= 2.0]
        best = window["area_A"].idxmax()
        assert window.loc[best, "area_A"] == pytest.approx(0.172, rel=0.05)
        assert window.loc[best, "mu"] == pytest.approx(1.91, abs=0.05)
        assert frame.loc[frame["mu"] == 4.2, "area_D"].item() == 0.0
        assert frame.loc[frame["mu"] == 4.6, "area_A"].item() == 0.0
        assert frame["capture_efficiency"].max() <= 0.13

    def test_extents_at_mu_2(self):
        e = extents(raster_stability(RasterSpec(), params_from_mu(2.0)))
        assert e.psi_extent == pytest.approx(0.28, rel=0.15)
        assert e.w_extent == pytest.approx(0.4, rel=0.15)
        assert e.capture_efficiency == pytest.approx(0.04, rel=0.15)

    @pytest.mark.parametrize(
        "r, bracket, expected",
        [
            (ResonanceId(1, 4), (2.01, 2.06), (2.03, 2.04)),
            (ResonanceId(1, 3), (2.83, 2.88), (2.85, 2.86)),
            (ResonanceId(2, 5), (3.71, 3.76), (3.73, 3.74)),
        ],
    )
    def test_escape_value(self, r, bracket, expected):
        spec = RasterSpec(cell_side=1 / 500)
        assert escape_value(r, bracket, 0.01, spec, **_pool()) == pytest.approx(expected, abs=1e-9)
