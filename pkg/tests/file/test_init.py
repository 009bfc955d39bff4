"""Tests for scirtm.file module (.__init__ file)."""

import os

from scirtm.file import exists


class TestFileExists:
    """Test cases for the exists function in file module."""

    def test_exists_with_existing_file(self, tmp_path):
        """Test exists function with an existing file."""
        test_file = tmp_path / "settings.json"
        test_file.write_text("{}")

        assert exists(test_file) is True
        assert exists(str(test_file)) is True

    def test_exists_with_directory(self, tmp_path):
        """A directory is not a readable settings file."""
        test_dir = tmp_path / "results"
        test_dir.mkdir()

        assert exists(test_dir) is False

    def test_exists_with_nonexistent_file(self, tmp_path):
        """Test exists function with a non-existent file."""
        assert exists(tmp_path / "missing.json") is False
        assert exists("") is False

    def test_exists_with_relative_path(self, tmp_path):
        """Test exists function with a path relative to the working directory."""
        (tmp_path / "relative.csv").write_text("mu\n")
        original_cwd = os.getcwd()
        try:
            os.chdir(tmp_path)
            assert exists("relative.csv") is True
            assert exists("other.csv") is False
        finally:
            os.chdir(original_cwd)
