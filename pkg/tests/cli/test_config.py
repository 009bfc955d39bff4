"""Tests for scirtm.cli.config module."""

import pytest

from scirtm.cli.config import RunConfig, parse_pair, parse_range, parse_resonance
from scirtm.local_analysis import ResonanceId
from scirtm.stability_domain import RasterSpec


class TestParsers:
    """Test cases for the range and resonance parsers."""

    def test_pair(self):
        assert parse_pair("-0.5:0.25") == (-0.5, 0.25)
        with pytest.raises(ValueError, match="a:b"):
            parse_pair("0.5")

    def test_range(self):
        assert parse_range("0:1:0.25") == [0.0, 0.25, 0.5, 0.75, 1.0]
        assert parse_range("1.80:2.00:0.02")[-1] == 2.0
        assert len(parse_range("1.80:2.00:0.02")) == 11
        assert parse_range("2.037") == [2.037]

    def test_bad_range(self):
        with pytest.raises(ValueError, match="step > 0"):
            parse_range("1:0:0.1")
        with pytest.raises(ValueError, match="step > 0"):
            parse_range("0:1:0")
        with pytest.raises(ValueError, match="a:b:step"):
            parse_range("0:1")

    def test_resonance(self):
        assert parse_resonance("1/3") == ResonanceId(1, 3)
        assert parse_resonance("2,5") == ResonanceId(2, 5)
        with pytest.raises(ValueError, match="m/n"):
            parse_resonance("13")


class TestRunConfig:
    """Test cases for the layered run configuration."""

    def test_defaults(self, monkeypatch):
        monkeypatch.delenv("SCIRTM_WORKERS", raising=False)
        monkeypatch.delenv("SCIRTM_CACHE_DIR", raising=False)
        config = RunConfig.build({}).validate()
        assert (config.P, config.Q, config.tol) == (7, 15, 1e-10)
        assert config.bits == 256
        assert config.workers is None

    def test_precedence(self, monkeypatch, tmp_path):
        """Flags beat the JSON file, which beats the environment."""
        monkeypatch.setenv("SCIRTM_WORKERS", "3")
        monkeypatch.setenv("SCIRTM_CACHE_DIR", str(tmp_path / "cache"))
        assert RunConfig.build({}).workers == 3

        settings = tmp_path / "settings.json"
        settings.write_text('{"workers": 2, "mu": 1.5}')
        config = RunConfig.build({}, str(settings))
        assert config.workers == 2
        assert config.mu == 1.5
        assert config.cache_dir == str(tmp_path / "cache")

        config = RunConfig.build({"workers": 1}, str(settings))
        assert config.workers == 1
        assert config.mu == 1.5

    def test_bad_environment(self, monkeypatch):
        monkeypatch.setenv("SCIRTM_WORKERS", "all")
        with pytest.raises(ValueError, match="integer"):
            RunConfig.build({})

    def test_missing_file(self, tmp_path):
        with pytest.raises(ValueError, match="does not exist"):
            RunConfig.build({}, str(tmp_path / "missing.json"))

    def test_unknown_setting(self, tmp_path):
        settings = tmp_path / "settings.json"
        settings.write_text('{"mu": 2.0, "colour": "red"}')
        with pytest.raises(ValueError, match="unknown setting 'colour'"):
            RunConfig.build({}, str(settings))

    def test_save_reads_back(self, tmp_path, monkeypatch):
        monkeypatch.delenv("SCIRTM_WORKERS", raising=False)
        monkeypatch.delenv("SCIRTM_CACHE_DIR", raising=False)
        config = RunConfig.build({"command": "sweep", "mu_range": "1.8:2.0:0.02", "local": True})
        path = tmp_path / "saved.json"
        config.save(str(path))
        assert RunConfig.build({}, str(path)) == config

    @pytest.mark.parametrize(
        "flags, message",
        [
            ({"P": 7, "Q": 7}, "0 < P < Q"),
            ({"Q": 30}, "0 < P < Q"),
            ({"tol": 0.0}, "tol"),
            ({"bits": 16}, "bits"),
            ({"cell_side": -1.0}, "cell side"),
            ({"budget_fast": 0}, "budget_fast"),
            ({"domains": -1}, "domains"),
            ({"workers": 0}, "workers"),
            ({"psi_range": "1:-1"}, "ordered"),
            ({"mu_range": "2:1:0.1"}, "step > 0"),
            ({"line": "fix_r2"}, "line"),
            ({"branch": "both"}, "branch"),
            ({"kind": "parabolic"}, "kind"),
            ({"mu": float("nan")}, "finite"),
        ],
    )
    def test_validate(self, flags, message):
        with pytest.raises(ValueError, match=message):
            RunConfig().update(flags, "flags").validate()

    def test_negative_steps(self):
        """Negative steps select the inverse map and are valid."""
        assert RunConfig(steps=-3).validate().steps == -3
        assert RunConfig(steps=0).validate().steps == 0

    def test_require_mu(self):
        with pytest.raises(ValueError, match="needs --mu"):
            RunConfig(command="raster").require_mu()

    def test_raster_spec(self):
        spec = RunConfig(psi_range="-1:1", cell_side=0.01, P=3, Q=10).raster_spec()
        assert isinstance(spec, RasterSpec)
        assert spec.psi_range == (-1.0, 1.0)
        assert spec.w_range == RasterSpec().w_range
        assert (spec.cell_side, spec.P, spec.Q) == (0.01, 3, 10)

    def test_job_options(self):
        opts = RunConfig(workers=1, progress=True).job_options()
        assert opts == {"n_jobs": 1, "process": False, "with_tqdm": True, "cache_dir": None}
        assert RunConfig(workers=4).job_options()["process"] is True
