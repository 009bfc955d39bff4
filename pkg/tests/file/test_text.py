"""Tests for scirtm.file.text module."""

import pytest

from scirtm.file.text import read, write


class TestTextRead:
    """Test cases for the read function in text module."""

    def test_read_simple_text_file(self, tmp_path):
        """Test reading a simple text file."""
        text_file = tmp_path / "simple.txt"
        text_file.write_bytes(b"mu,area_A\n2.037,0.1166\n")

        assert read(text_file) == "mu,area_A\n2.037,0.1166\n"

    def test_read_keeps_line_endings(self, tmp_path):
        """CRLF is returned as written, not translated."""
        text_file = tmp_path / "crlf.txt"
        text_file.write_bytes(b"a\r\nb\r\n")

        assert read(text_file) == "a\r\nb\r\n"

    def test_read_with_utf8_encoding(self, tmp_path):
        """Test reading a text file with UTF-8 encoding containing Unicode characters."""
        text_file = tmp_path / "unicode.txt"
        text_file.write_bytes("稳定域 ψ ∈ [-π, π)".encode("utf-8"))

        assert read(text_file) == "稳定域 ψ ∈ [-π, π)"

    def test_read_with_different_encoding(self, tmp_path):
        """Test reading a text file with a non-default encoding."""
        text_file = tmp_path / "latin1.txt"
        text_file.write_bytes("café".encode("latin-1"))

        assert read(text_file, encoding="latin-1") == "café"

    def test_read_file_not_found(self, tmp_path):
        """Test reading a non-existent file raises FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            read(tmp_path / "missing.txt")


class TestTextWrite:
    """Test cases for the write function in text module."""

    def test_write_simple_text(self, tmp_path):
        """Test writing simple text content."""
        text_file = tmp_path / "out.txt"
        write(text_file, "Hello, World!")

        assert text_file.read_text(encoding="utf-8") == "Hello, World!"

    def test_write_lf_on_every_platform(self, tmp_path):
        """Line endings are written exactly as given."""
        text_file = tmp_path / "lf.txt"
        write(text_file, "a\nb\n")

        assert text_file.read_bytes() == b"a\nb\n"

    def test_write_creates_parent_directories(self, tmp_path):
        """Missing parent directories are created."""
        text_file = tmp_path / "runs" / "mu-2" / "log.txt"
        write(text_file, "done")

        assert text_file.read_text() == "done"

    def test_write_overwrites_existing_file(self, tmp_path):
        """Test that write overwrites an existing file."""
        text_file = tmp_path / "overwrite.txt"
        write(text_file, "old content that is longer")
        write(text_file, "new")

        assert read(text_file) == "new"

    def test_write_path_as_string(self, tmp_path):
        """Test writing with the path given as a string."""
        text_file = tmp_path / "string.txt"
        write(str(text_file), "content")

        assert read(text_file) == "content"
