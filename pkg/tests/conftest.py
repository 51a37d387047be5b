from __future__ import annotations

import shutil
import tempfile

import pytest

from app.config import SystemConfig, build_config


@pytest.fixture(scope="session")
def tmp_storage_root():
    d = tempfile.mkdtemp(prefix="mmimo_tests_")
    try:
        yield d
    finally:
        shutil.rmtree(d, ignore_errors=True)


@pytest.fixture()
def app_instance(tmp_storage_root, monkeypatch):
    # Isolated env for settings before creating the app
    monkeypatch.setenv("MMIMO_STORAGE_ROOT", tmp_storage_root)
    monkeypatch.setenv("MMIMO_TRIAL_WORKERS", "2")
    monkeypatch.setenv("MMIMO_DEFAULT_TRIALS", "2")
    monkeypatch.setenv("MMIMO_DEFAULT_SLOTS", "3")
    monkeypatch.setenv("MMIMO_LOG_LEVEL", "warning")

    from app.main import create_app

    app = create_app()
    assert app.state.settings.storage_root == tmp_storage_root
    return app


@pytest.fixture()
def default_config() -> SystemConfig:
    return SystemConfig()


@pytest.fixture()
def small_config() -> SystemConfig:
    """Two cells with a handful of users; fast enough for slot simulations."""
    return build_config(num_cells=2, num_users=3, num_antennas=16, pilot_len=8, frame_len=20, max_class=6)
