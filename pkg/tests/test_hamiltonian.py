"""Tests for scirtm.hamiltonian module."""

import math

import numpy as np
import pytest

from scirtm.core_map import PhasePoint, map_forward, params_from_mu
from scirtm.errors import DomainError
from scirtm.hamiltonian import (
    HamiltonianId,
    Scenario,
    ScaledPoint,
    equilibria_third_order,
    generating_series_terms,
    grad_h1_saddle_center,
    grad_h1_third_order,
    h1_saddle_center,
    h1_third_order,
    h_corrected_saddle_center,
    h_fourth_order,
    hamiltonian_flow,
    homoclinic_trajectory,
    last_level,
    level_curves,
    polylines_to_rows,
    saddle_center_generating_field,
    scale_third_order,
    scaled_saddle_center_map,
    separatrix_area,
    separatrix_area_quadrature,
    third_order_first_variation,
    third_order_scaled_map,
)
from scirtm.stability_domain import CellClass, RasterSpec, StabilityRaster


class TestHamiltonianId:
    """Test cases for HamiltonianId."""

    def test_scenario_from_string(self):
        hid = HamiltonianId("fourth_order", 5)
        assert hid.scenario is Scenario.FOURTH_ORDER

    @pytest.mark.parametrize(
        "scenario, order", [("saddle_center", 5), ("fourth_order", 3), ("third_order", 2)]
    )
    def test_order_out_of_range(self, scenario, order):
        with pytest.raises(DomainError, match="order"):
            HamiltonianId(scenario, order)

    def test_unknown_scenario(self):
        with pytest.raises(ValueError):
            HamiltonianId("sextic", 1)

    def test_evaluate_dispatch(self):
        p = PhasePoint(0.01, 0.002)
        params = params_from_mu(3.1)
        assert HamiltonianId("third_order", 1).evaluate(p, params) == pytest.approx(
            h1_third_order(scale_third_order(p, 0.1))
        )
        assert HamiltonianId("fourth_order", 4).evaluate(p, params) == h_fourth_order(p, 4)


class TestSaddleCenter:
    """Test cases for the saddle-center Hamiltonians."""

    @pytest.mark.parametrize("t", [-3.0, -0.5, 0.0, 1.0, 6.0])
    def test_homoclinic_on_zero_level(self, t):
        assert h1_saddle_center(homoclinic_trajectory(t)) == pytest.approx(0.0, abs=1e-14)

    def test_saddle_on_zero_level(self):
        assert h1_saddle_center(ScaledPoint(-1 / math.pi, 0.0)) == pytest.approx(0.0, abs=1e-15)
        assert grad_h1_saddle_center(-1 / math.pi, 0.0) == pytest.approx((0.0, 0.0), abs=1e-15)

    def test_homoclinic_solves_flow(self):
        """The separatrix is a trajectory of the reversed H1 flow."""
        end = hamiltonian_flow(grad_h1_saddle_center, homoclinic_trajectory(0.0), 1.0, scale=-1.0)
        assert end == pytest.approx(list(homoclinic_trajectory(1.0)), abs=1e-9)

    def test_flow_trajectory_shape(self):
        path = hamiltonian_flow(grad_h1_saddle_center, (0.1, 0.0), 1.0, t_eval=np.linspace(0, 1, 11))
        assert path.shape == (11, 2)
        assert path[0] == pytest.approx([0.1, 0.0])

    def test_separatrix_area(self):
        """The quadrature along the separatrix gives 6/(5 pi^2)."""
        assert separatrix_area() == pytest.approx(6 / (5 * math.pi**2))
        assert separatrix_area_quadrature() == pytest.approx(separatrix_area(), rel=1e-10)

    def test_scaled_map_matches_map(self):
        mu = 0.05
        x, y = 0.2, -0.1
        q1 = scaled_saddle_center_map(ScaledPoint(x, y), mu)
        p1 = map_forward(PhasePoint(mu * x, mu**1.5 * y), params_from_mu(mu))
        assert q1.x == pytest.approx(p1.psi / mu, rel=1e-10)
        assert q1.y == pytest.approx(p1.w / mu**1.5, rel=1e-10)

    def test_series_terms_match_closed_form(self):
        """Terms built from the limit generating field agree with H^[4]."""
        mu = 0.04
        x, y = 0.1, 0.2
        terms = generating_series_terms(saddle_center_generating_field(mu, exact=False), order=4)
        params = params_from_mu(mu)
        p = PhasePoint(mu * x, mu**1.5 * y)
        assert sum(term(x, y) for term in terms) == pytest.approx(h_corrected_saddle_center(p, params, 4))

    def test_higher_order_is_better_conserved(self):
        """H^[4] drifts much less along an orbit than H^[1]."""
        mu = 0.02
        params = params_from_mu(mu)
        p = PhasePoint(mu * 0.1, mu**1.5 * 0.1)
        drift = {1: 0.0, 4: 0.0}
        start = {n: h_corrected_saddle_center(p, params, n) for n in drift}
        q = p
        for _ in range(50):
            q = map_forward(q, params)
            for n in drift:
                drift[n] = max(drift[n], abs(h_corrected_saddle_center(q, params, n) - start[n]))
        assert drift[4] < drift[1] / 5

    def test_domain(self):
        with pytest.raises(DomainError, match="positive"):
            h_corrected_saddle_center(PhasePoint(0.0, 0.0), params_from_mu(-0.1))
        with pytest.raises(DomainError, match="order"):
            h_corrected_saddle_center(PhasePoint(0.0, 0.0), params_from_mu(0.1), order=5)
        with pytest.raises(DomainError):
            saddle_center_generating_field(0.0)
        with pytest.raises(DomainError, match="order"):
            generating_series_terms(saddle_center_generating_field(0.1), order=0)


class TestFourthOrder:
    """Test cases for the fourth-order resonance Hamiltonian."""

    def test_leading_term_is_quartic(self):
        p = PhasePoint(0.03, -0.01)
        doubled = PhasePoint(0.06, -0.02)
        assert h_fourth_order(doubled, 4) == pytest.approx(16 * h_fourth_order(p, 4))
        assert h_fourth_order(PhasePoint(0.0, 0.0)) == 0.0

    def test_order(self):
        with pytest.raises(DomainError, match="4, 5 or 6"):
            h_fourth_order(PhasePoint(0.1, 0.0), 7)


class TestThirdOrder:
    """Test cases for the third-order resonance Hamiltonian."""

    def test_equilibria(self):
        """Four critical points; the three saddles sit on the zero level."""
        points = equilibria_third_order()
        assert len(points) == 4
        for q in points:
            assert grad_h1_third_order(*q) == pytest.approx((0.0, 0.0), abs=1e-12)
        assert h1_third_order(points[0]) == pytest.approx(-1.0)
        for q in points[1:]:
            assert h1_third_order(q) == pytest.approx(0.0, abs=1e-12)

    def test_first_variation(self):
        """(f^3(q) - q) / eps tends to the H1 vector field."""
        eps = 1e-4
        q = ScaledPoint(0.3, 0.2)
        r = q
        for _ in range(3):
            r = third_order_scaled_map(r, eps)
        f1 = third_order_first_variation(q)
        assert (r.x - q.x) / eps == pytest.approx(f1.x, abs=1e-2)
        assert (r.y - q.y) / eps == pytest.approx(f1.y, abs=1e-2)

    def test_scaling(self):
        with pytest.raises(DomainError, match="eps"):
            scale_third_order(PhasePoint(0.1, 0.0), 0.0)


class TestLevelSets:
    """Test cases for level_curves and last_level."""

    def test_circle(self):
        pytest.importorskip("matplotlib")
        curves = level_curves(lambda X, Y: X**2 + Y**2, (-2.0, 2.0, -2.0, 2.0), [1.0], n=201)
        assert list(curves) == [1.0]
        radii = np.hypot(*np.vstack(curves[1.0]).T)
        assert radii == pytest.approx(np.ones_like(radii), abs=1e-3)
        rows = polylines_to_rows(curves)
        assert set(rows[0]) == {"level", "curve", "psi", "w"}
        assert len(rows) == sum(len(seg) for seg in curves[1.0])

    def test_no_levels(self):
        pytest.importorskip("matplotlib")
        assert level_curves(lambda X, Y: X, (-1.0, 1.0, -1.0, 1.0), []) == {}

    def test_last_level(self):
        spec = RasterSpec(psi_range=(-0.5, 0.5), w_range=(-0.25, 0.25), cell_side=0.25)
        cells = np.full((3, 4), int(CellClass.WHITE), dtype=np.int8)
        cells[1, 1:4] = [CellClass.RED, CellClass.GREEN, CellClass.RED]
        zeros = np.zeros(cells.shape, dtype=np.int64)
        raster = StabilityRaster(
            spec=spec,
            mu=2.0,
            cells=cells,
            psi_centers=np.array([-0.375, -0.125, 0.125, 0.375]),
            w_centers=np.array([0.25, 0.0, -0.25]),
            rho=np.full(cells.shape, np.nan),
            res_m=zeros,
            res_n=zeros,
        )
        level = last_level(lambda p: p.psi**2, raster)
        assert level.psi == 0.375
        assert level.value == pytest.approx(0.140625)

        cells[1, :] = CellClass.GREEN
        assert last_level(lambda p: p.psi**2, raster) is None
