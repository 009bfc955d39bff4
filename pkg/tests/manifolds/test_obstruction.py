"""Tests for scirtm.manifolds.obstruction module."""

import math

import numpy as np
import pytest

from scirtm.core_map import params_from_mu
from scirtm.local_analysis import ResonanceId
from scirtm.manifolds import PrecisionContext, crossings, obstruction_check, resonance_obstruction
from scirtm.manifolds.globalize import Polyline

pytest.importorskip("shapely")

DIAGONAL = np.array([[-1.0, -1.0], [0.0, 0.0], [1.0, 1.0]])
ANTIDIAGONAL = np.array([[-1.0, 1.0], [1.0, -1.0]])


class TestCrossings:
    """Test cases for crossings and obstruction_check."""

    def test_cross(self):
        found = crossings(DIAGONAL, ANTIDIAGONAL)
        assert len(found) == 1
        psi, w, angle = found[0]
        assert (psi, w) == pytest.approx((0.0, 0.0), abs=1e-12)
        assert angle == pytest.approx(math.pi / 2)
        assert obstruction_check(Polyline(points=DIAGONAL), ANTIDIAGONAL)

    def test_disjoint_parallel(self):
        assert not obstruction_check(DIAGONAL, DIAGONAL + [0.0, 0.5])

    def test_overlap_is_not_transversal(self):
        assert not obstruction_check(DIAGONAL, DIAGONAL)

    def test_grazing_crossing(self):
        """A crossing at an angle below min_angle does not count."""
        flat = np.array([[-1.0, 0.0], [1.0, 0.0]])
        tilted = np.array([[-1.0, -1e-10], [1.0, 1e-10]])
        assert crossings(flat, tilted)
        assert not obstruction_check(flat, tilted)
        assert obstruction_check(flat, tilted, min_angle=1e-12)

    def test_degenerate_input(self):
        assert crossings(np.array([[0.0, 0.0]]), ANTIDIAGONAL) == []
        with pytest.raises(ValueError, match="shape"):
            crossings(np.zeros((3, 3)), ANTIDIAGONAL)

    @pytest.mark.slow
    def test_third_order_obstruction(self):
        assert resonance_obstruction(params_from_mu(2.9), ResonanceId(1, 3), PrecisionContext(128))
