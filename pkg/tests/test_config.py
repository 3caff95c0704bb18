import logging

import pytest

from app import create_app
from app.errors import ParameterRangeError, UnknownEntryError
from app.models import RunConfig


class TestCreateApp:
    """Settings come from the environment, overrides win"""

    def test_defaults(self, monkeypatch):
        monkeypatch.delenv("FRACTAL_SEED", raising=False)
        app = create_app({"LOG_LEVEL": "WARNING"})
        assert app.config["SEED"] == 20240611
        assert app.config["CATALOG_PATH"] is None
        assert app.config["CONTOUR_TOL"] == 1e-10

    def test_environment(self, monkeypatch):
        monkeypatch.setenv("FRACTAL_K_TRUNC", "250")
        monkeypatch.setenv("FRACTAL_CONTOUR_TOL", "1e-8")
        app = create_app({"LOG_LEVEL": "WARNING"})
        assert app.config["K_TRUNC"] == 250
        assert app.config["CONTOUR_TOL"] == 1e-8

    def test_unparseable_value_falls_back(self, monkeypatch, caplog):
        monkeypatch.setenv("FRACTAL_SEED", "abc")
        with caplog.at_level(logging.WARNING, logger="app"):
            app = create_app({"LOG_LEVEL": "WARNING"})
        assert app.config["SEED"] == 20240611
        assert "Cannot parse FRACTAL_SEED='abc'" in caplog.text

    def test_overrides(self, monkeypatch):
        monkeypatch.setenv("FRACTAL_MC_SAMPLES", "50000")
        app = create_app({"MC_SAMPLES": 12_000, "LOG_LEVEL": "WARNING"})
        assert app.config["MC_SAMPLES"] == 12_000

    def test_log_level(self):
        app = create_app({"LOG_LEVEL": "debug"})
        assert app.logger.level == logging.DEBUG
        create_app({"LOG_LEVEL": "WARNING"})

    def test_catalog_is_lazy(self, tmp_path):
        app = create_app({"CATALOG_PATH": str(tmp_path / "missing.json"), "LOG_LEVEL": "WARNING"})
        with pytest.raises(UnknownEntryError):
            app.catalog


class TestRunConfig:
    """A command's settings start from the app config"""

    def test_from_settings(self):
        app = create_app({"LOG_LEVEL": "WARNING", "MC_SAMPLES": 30_000, "MC_CHUNK": 10, "K_TRUNC": 77})
        cfg = RunConfig.from_settings(app.config, "zeta", "gasket", {"delta": "2"}, seed=None)
        assert cfg.seed == app.config["SEED"], "a None override keeps the setting"
        assert (cfg.mc_samples, cfg.mc_chunk, cfg.k_trunc) == (30_000, 10, 77)
        assert cfg.params == {"delta": "2"}
        mc = cfg.mc_config()
        assert (mc.samples, mc.seed, mc.chunk) == (30_000, app.config["SEED"], 10)

    def test_overrides_win(self):
        app = create_app({"LOG_LEVEL": "WARNING"})
        cfg = RunConfig.from_settings(app.config, "tube", k_trunc=5, seed=9)
        assert cfg.k_trunc == 5 and cfg.seed == 9
        assert cfg.contour_tol == app.config["CONTOUR_TOL"]

    def test_sample_floor_reaches_monte_carlo(self):
        app = create_app({"LOG_LEVEL": "WARNING"})
        cfg = RunConfig.from_settings(app.config, "zeta", mc_samples=500)
        with pytest.raises(ParameterRangeError):
            cfg.mc_config()
