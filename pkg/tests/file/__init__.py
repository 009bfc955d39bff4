"""Tests for scirtm.file module."""
