"""Tests for scirtm.manifolds.homoclinic module."""

import math

import numpy as np
import pytest

from scirtm.core_map import eta, params_from_mu
from scirtm.errors import DomainError, InsufficientDataError, PrecisionError
from scirtm.manifolds import (
    LobeMethod,
    PrecisionContext,
    SymmetryLine,
    lobe_area,
    primary_homoclinic,
    scaled_lobe_sequence,
    splitting_estimate,
    splitting_fit,
    stable_series,
    unstable_series,
)
from scirtm.manifolds.homoclinic import A0, SPLITTING_EXPONENT

# h = 0.6
MU_MID = 2 * (math.cosh(0.6) - 1)


class TestEstimates:
    """Test cases for the asymptotic lobe area."""

    def test_splitting_estimate(self):
        assert splitting_estimate(0.5) == pytest.approx(A0 * math.exp(-2 * math.pi**2 / 0.5))
        assert SPLITTING_EXPONENT == pytest.approx(2 * math.pi**2)
        with pytest.raises(DomainError, match="positive"):
            splitting_estimate(0.0)

    def test_scaled_sequence(self):
        h = np.array([0.3, 0.4])
        areas = np.array([1e-20, 1e-15])
        assert scaled_lobe_sequence(h, areas, 1.0) == pytest.approx(areas * np.exp(1.0 / h))


class TestLobeArea:
    """Test cases for lobe_area and the primary homoclinic points."""

    def test_domain(self):
        with pytest.raises(DomainError, match="0 < mu < 4"):
            lobe_area(4.5)

    def test_precision_floor(self):
        """A lobe below the round-off floor asks for more bits."""
        with pytest.raises(PrecisionError) as info:
            lobe_area(0.1, PrecisionContext(64))
        assert info.value.recommended_bits > 64
        assert info.value.recommended_bits % 64 == 0

    def test_homoclinic_points_on_lines(self):
        params = params_from_mu(MU_MID)
        series = unstable_series(None, 60, PrecisionContext(128), params)
        a = primary_homoclinic(series, SymmetryLine.FIX_R0)
        b = primary_homoclinic(series, SymmetryLine.FIX_R1)
        assert a.w == 0
        assert b.point[1] == pytest.approx(eta(b.point[0], params) / 2, abs=1e-14)
        assert 0 < a.s < b.s

    def test_stable_series_refused(self):
        series = stable_series(None, 40, PrecisionContext(128), params_from_mu(MU_MID))
        with pytest.raises(DomainError, match="unstable series"):
            primary_homoclinic(series, SymmetryLine.FIX_R0)

    def test_area_against_asymptotics(self):
        """At h = 0.6 the lobe is within 1% of a0 exp(-2 pi^2 / h) and both methods agree."""
        result = lobe_area(MU_MID, PrecisionContext(128), order=60)
        assert result.method is LobeMethod.ACTION_SUM
        assert result.h == pytest.approx(0.6)
        assert float(result.area) == pytest.approx(splitting_estimate(0.6), rel=1e-2)
        assert result.agreement < 1e-12
        assert result.digits >= 12
        assert result.mantissa_bits == 128

    @pytest.mark.slow
    def test_published_value(self):
        result = lobe_area(0.859, PrecisionContext(256))
        assert float(result.area) == pytest.approx(3.808194826948494e-5, rel=1e-12)
        assert result.digits >= 12


class TestSplittingFit:
    """Test cases for splitting_fit."""

    def test_too_few_points(self):
        with pytest.raises(InsufficientDataError, match="at least 4"):
            splitting_fit([0.3, 0.4, 0.5])

    def test_non_positive_h(self):
        with pytest.raises(DomainError, match="positive"):
            splitting_fit([0.3, 0.4, 0.5, -0.1])

    @pytest.mark.slow
    def test_leading_coefficient(self):
        fit = splitting_fit(np.linspace(0.30, 0.60, 8), PrecisionContext(512))
        assert fit.a0 == pytest.approx(A0, rel=1e-4)
        assert abs(fit.a1) / fit.a0 < 1e-3
        assert fit.jackknife_a0 == pytest.approx(A0, rel=1e-4)
        assert list(fit.h) == sorted(fit.h, reverse=True)
