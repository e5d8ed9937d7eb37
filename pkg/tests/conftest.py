# tests/conftest.py
import logging
import sys

import pytest

from config.settings import reset_settings


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch, tmp_path):
    """Настройки без файла журнала и без .env из рабочего каталога"""
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("TOPO_LOG_FILE", "")
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def restore_logging():
    """setup_logging перенастраивает корневой логгер; возвращаем как было"""
    root = logging.getLogger()
    handlers, level, hook = root.handlers[:], root.level, sys.excepthook
    yield
    for handler in root.handlers[:]:
        root.removeHandler(handler)
    for handler in handlers:
        root.addHandler(handler)
    root.setLevel(level)
    sys.excepthook = hook


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="запускать медленные тесты на мелких решётках")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="нужен флаг --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)
