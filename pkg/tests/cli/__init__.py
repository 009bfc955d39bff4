"""Tests for scirtm.cli module."""
