"""Tests for scirtm.manifolds module."""
