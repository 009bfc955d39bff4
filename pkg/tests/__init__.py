"""Tests for scirtm package."""
