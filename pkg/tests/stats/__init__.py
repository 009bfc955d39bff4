"""Tests for scirtm.stats module."""
