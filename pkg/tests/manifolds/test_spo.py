"""Tests for scirtm.manifolds.spo module."""

import math

import numpy as np
import pytest

from scirtm.core_map import LinearType, iterate_lifted, params_from_mu
from scirtm.errors import NotFoundError
from scirtm.local_analysis import ResonanceId
from scirtm.manifolds import (
    PrecisionContext,
    SymmetryLine,
    find_spo,
    point_on_line,
    refine_spo,
    spo_candidates,
)


class TestFindSpo:
    """Test cases for locating symmetric periodic orbits."""

    def test_fixed_point_p_h(self):
        """(0, 1) on Fix(r0) is the hyperbolic fixed point p_h."""
        params = params_from_mu(0.859)
        spo = find_spo(ResonanceId(0, 1), SymmetryLine.FIX_R0, params)
        assert spo.psi == pytest.approx(params.psi_h, abs=1e-12)
        assert spo.w == 0.0
        assert spo.trace == pytest.approx(2 + 0.859, abs=1e-9)
        assert spo.linear_type is LinearType.HYPERBOLIC

    def test_third_order_saddle(self):
        """Below mu = 3 the hyperbolic (1, 3) orbit sits on Fix(r0) at psi < 0."""
        params = params_from_mu(2.9)
        spo = find_spo(ResonanceId(1, 3), SymmetryLine.FIX_R0, params, kind=LinearType.HYPERBOLIC)
        assert spo.period == 3
        assert abs(spo.trace) > 2
        assert -0.1 < spo.psi < 0
        end = iterate_lifted(spo.point, 3, params)
        assert end[0] - spo.psi == pytest.approx(0.0, abs=1e-9)
        assert end[1] == pytest.approx(spo.w, abs=1e-9)

    def test_orbit_points(self):
        params = params_from_mu(2.9)
        spo = find_spo(ResonanceId(1, 3), SymmetryLine.FIX_R0, params, kind=LinearType.HYPERBOLIC)
        pts = spo.orbit(params)
        assert pts.shape == (3, 2)
        assert tuple(pts[0]) == (spo.psi, spo.w)

    def test_candidates_sorted(self):
        params = params_from_mu(2.9)
        candidates = spo_candidates(ResonanceId(1, 3), SymmetryLine.FIX_R0, params)
        assert candidates
        distances = [math.hypot(c.psi, c.w) for c in candidates]
        assert distances == sorted(distances)
        assert all(c.resonance == ResonanceId(1, 3) for c in candidates)

    def test_not_found(self):
        """For mu > 0 the only fixed point off p_s is the hyperbolic p_h."""
        with pytest.raises(NotFoundError, match=r"no elliptic \(0,1\) SPO"):
            find_spo(ResonanceId(0, 1), SymmetryLine.FIX_R0, params_from_mu(0.5), kind=LinearType.ELLIPTIC)

    def test_point_on_line(self):
        params = params_from_mu(1.0)
        psi, w = point_on_line(np.array([0.1, 0.2]), SymmetryLine.FIX_R0, params)
        assert np.all(w == 0)
        psi, w = point_on_line(0.3, SymmetryLine.FIX_R1, params)
        expected = 0.5 * (2 * math.pi * (math.cos(0.3) - 1) - math.sin(0.3))
        assert float(w) == pytest.approx(expected)


class TestRefineSpo:
    """Test cases for refine_spo."""

    def test_refine(self):
        params = params_from_mu(2.9)
        spo = find_spo(ResonanceId(1, 3), SymmetryLine.FIX_R0, params, kind=LinearType.HYPERBOLIC)
        ctx = PrecisionContext(192)
        refined = refine_spo(spo, ctx)
        assert refined.refined
        assert refined.mantissa_bits == 192
        assert refined.psi == pytest.approx(spo.psi, abs=1e-12)
        assert refined.trace == pytest.approx(spo.trace, rel=1e-8)
        assert refined.w_mp == 0
