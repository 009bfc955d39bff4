"""Tests for scirtm.parallel module."""
