"""Tests for scirtm.file.json module."""

import json

import pytest

from scirtm.file.json import read, write


class TestJsonRead:
    """Test cases for the read function in json module."""

    def test_read_simple_json_file(self, tmp_path):
        """Test reading a saved run configuration."""
        test_data = {"command": "raster", "mu": 2.037, "cell_side": 0.002, "local": False}
        json_file = tmp_path / "settings.json"
        json_file.write_text(json.dumps(test_data), encoding="utf-8")

        assert read(json_file) == test_data

    def test_read_nested_json_file(self, tmp_path):
        """Test reading a nested JSON file."""
        test_data = {"recipes": [{"id": "twist-root", "criterion": "12 digits"}]}
        json_file = tmp_path / "catalogue.json"
        json_file.write_text(json.dumps(test_data), encoding="utf-8")

        assert read(json_file) == test_data

    def test_read_json_file_not_found(self, tmp_path):
        """Test reading a non-existent JSON file raises FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            read(tmp_path / "missing.json")

    def test_read_invalid_json_file(self, tmp_path):
        """Test reading an invalid JSON file raises JSONDecodeError."""
        json_file = tmp_path / "invalid.json"
        json_file.write_text("{mu: 2}", encoding="utf-8")

        with pytest.raises(json.JSONDecodeError):
            read(json_file)


class TestJsonWrite:
    """Test cases for the write function in json module."""

    def test_write_sorted_keys_and_newline(self, tmp_path):
        """Keys are sorted and the file ends with a newline, so saved configs diff cleanly."""
        json_file = tmp_path / "out.json"
        write(json_file, {"mu": 2.0, "command": "map"})

        content = json_file.read_text(encoding="utf-8")
        assert content == '{\n    "command": "map",\n    "mu": 2.0\n}\n'

    def test_write_with_custom_indent(self, tmp_path):
        """Test writing JSON with a custom indentation."""
        json_file = tmp_path / "indent.json"
        write(json_file, {"a": [1, 2]}, indent=2)

        assert json_file.read_text(encoding="utf-8").startswith('{\n  "a": [\n    1,')

    def test_write_with_unicode_content(self, tmp_path):
        """Non-ASCII text is written as is."""
        json_file = tmp_path / "unicode.json"
        write(json_file, {"description": "稳定域"})

        assert "稳定域" in json_file.read_text(encoding="utf-8")
        assert read(json_file) == {"description": "稳定域"}

    def test_write_special_values(self, tmp_path):
        """None and booleans survive a write and read."""
        json_file = tmp_path / "special.json"
        data = {"workers": None, "local": True, "levels": None}
        write(json_file, data)

        assert read(json_file) == data

    def test_write_overwrites_existing_file(self, tmp_path):
        """Test that write replaces the previous document."""
        json_file = tmp_path / "overwrite.json"
        write(json_file, {"old": 1})
        write(json_file, {"new": 2})

        assert read(json_file) == {"new": 2}
