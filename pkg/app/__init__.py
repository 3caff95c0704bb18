import os
import logging
from dataclasses import dataclass, field

from dotenv import load_dotenv

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

# (environment variable, config key, default, parser)
SETTINGS = [
    # None selects the catalog shipped in data/catalog.json
    ("FRACTAL_CATALOG_PATH", "CATALOG_PATH", None, str),
    ("FRACTAL_LOG_LEVEL", "LOG_LEVEL", "INFO", str),
    ("FRACTAL_SEED", "SEED", 20240611, int),
    ("FRACTAL_MC_SAMPLES", "MC_SAMPLES", 100_000, int),
    ("FRACTAL_MC_CHUNK", "MC_CHUNK", 16, int),
    ("FRACTAL_K_TRUNC", "K_TRUNC", 1000, int),
    ("FRACTAL_CONTOUR_TOL", "CONTOUR_TOL", 1e-10, float),
    ("FRACTAL_PIXEL_RESOLUTION", "PIXEL_RESOLUTION", 2048, int),
]


@dataclass
class FractalApp:
    """Configured toolkit instance: settings, logger and lazily loaded catalog"""
    config: dict
    logger: logging.Logger
    _catalog: dict = field(default=None, repr=False)

    @property
    def catalog(self):
        if self._catalog is None:
            from .catalog import load_catalog
            self._catalog = load_catalog(self.config["CATALOG_PATH"])
        return self._catalog


def configure_logging(level):
    logger = logging.getLogger("app")
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
    logger.setLevel(getattr(logging, str(level).upper(), logging.INFO))
    return logger


def create_app(overrides=None):
    # Load environment variables from .env file
    load_dotenv()

    config = {"APP_NAME": "FractalDrums", "TESTING": False}
    fallbacks = []
    for env_name, key, default, parse in SETTINGS:
        raw = os.getenv(env_name)
        if raw is None:
            config[key] = default
            continue
        try:
            config[key] = parse(raw)
        except ValueError:
            fallbacks.append(f"{env_name}={raw!r}")
            config[key] = default

    if overrides:
        config.update(overrides)

    logger = configure_logging(config["LOG_LEVEL"])
    for bad in fallbacks:
        logger.warning("⚠️  Cannot parse %s, falling back to the default", bad)

    return FractalApp(config=config, logger=logger)
