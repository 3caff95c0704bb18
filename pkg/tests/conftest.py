import sys
import os
import pytest
from click.testing import CliRunner

# Add project root to path so tests can import app
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from app import create_app
from app.catalog import entry_handle, entry_oracle, get_entry
from app.models import ZetaKind


@pytest.fixture(scope='session')
def app():
    """Create a toolkit instance for the tests."""
    # Keep a developer's .env from changing the catalog or seeds under test
    for name in ('FRACTAL_CATALOG_PATH', 'FRACTAL_SEED', 'FRACTAL_K_TRUNC'):
        os.environ.pop(name, None)

    app = create_app({"TESTING": True, "LOG_LEVEL": "WARNING", "MC_SAMPLES": 20_000})
    yield app


@pytest.fixture(scope='session')
def catalog(app):
    """Raw catalog records"""
    return app.catalog


@pytest.fixture
def runner():
    """A runner for the CLI commands."""
    return CliRunner()


@pytest.fixture
def handles(catalog):
    """Named access to catalog entries, handles and oracles"""
    class HandleActions:
        def entry(self, name, **overrides):
            return get_entry(name, overrides, catalog=catalog)

        def zeta(self, name, kind=ZetaKind.DISTANCE, **overrides):
            return entry_handle(self.entry(name, **overrides), kind)

        def oracle(self, name, **overrides):
            return entry_oracle(self.entry(name, **overrides))

    return HandleActions()
