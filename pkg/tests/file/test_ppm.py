"""Tests for scirtm.file.ppm module."""

import numpy as np
import pytest

from scirtm.file.ppm import read, write


class TestPpmWrite:
    """Test cases for the write function in ppm module."""

    def test_header_and_pixels(self, tmp_path):
        """P6 header followed by raw RGB bytes, top row first."""
        rgb = np.array([[[255, 0, 0], [0, 0, 255]]], dtype=np.uint8)
        ppm_file = tmp_path / "tiny.ppm"
        write(ppm_file, rgb)

        assert ppm_file.read_bytes() == b"P6\n2 1\n255\n" + bytes([255, 0, 0, 0, 0, 255])

    def test_rejects_bad_shape(self, tmp_path):
        with pytest.raises(ValueError, match="shape"):
            write(tmp_path / "bad.ppm", np.zeros((2, 2), dtype=np.uint8))

    def test_rejects_bad_dtype(self, tmp_path):
        with pytest.raises(TypeError, match="uint8"):
            write(tmp_path / "bad.ppm", np.zeros((2, 2, 3), dtype=np.float64))


class TestPpmRead:
    """Test cases for the read function in ppm module."""

    def test_read_written_image(self, tmp_path):
        rng = np.random.default_rng(0)
        rgb = rng.integers(0, 256, size=(4, 5, 3), dtype=np.uint8)
        ppm_file = tmp_path / "image.ppm"
        write(ppm_file, rgb)

        assert np.array_equal(read(ppm_file), rgb)

    def test_read_with_comment(self, tmp_path):
        """Comment lines in the header are skipped."""
        ppm_file = tmp_path / "comment.ppm"
        ppm_file.write_bytes(b"P6\n# made by hand\n1 1\n255\n" + bytes([1, 2, 3]))

        assert read(ppm_file).tolist() == [[[1, 2, 3]]]

    def test_read_wrong_magic(self, tmp_path):
        ppm_file = tmp_path / "ascii.ppm"
        ppm_file.write_bytes(b"P3\n1 1\n255\n1 2 3\n")

        with pytest.raises(ValueError, match="magic"):
            read(ppm_file)

    def test_read_wrong_maxval(self, tmp_path):
        ppm_file = tmp_path / "deep.ppm"
        ppm_file.write_bytes(b"P6\n1 1\n65535\n" + bytes(6))

        with pytest.raises(ValueError, match="maxval"):
            read(ppm_file)
