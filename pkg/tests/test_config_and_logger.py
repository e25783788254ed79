import logging

import pytest
from pydantic import ValidationError

from configs.config import AppConfig, config
from utils.logger import setup_logger


def test_app_config_defaults(monkeypatch):
    """AppConfig falls back to its defaults when no environment is set."""
    for name in ("APP_NAME", "LOG_LEVEL", "LATERAL_VDW_THREADS", "QUAD_REL_TOL", "OUTPUT_PRECISION"):
        monkeypatch.delenv(name, raising=False)
    cfg = AppConfig()
    assert cfg.APP_NAME == "Lateral vdW Analyzer"
    assert cfg.LOG_LEVEL == "INFO"
    assert cfg.LATERAL_VDW_THREADS == 1
    assert cfg.QUAD_REL_TOL == 1e-9
    assert cfg.OUTPUT_PRECISION == 9


def test_app_config_environment_override(monkeypatch):
    monkeypatch.setenv("LOG_LEVEL", "DEBUG")
    monkeypatch.setenv("QUAD_REL_TOL", "1e-6")
    cfg = AppConfig()
    assert cfg.LOG_LEVEL == "DEBUG"
    assert cfg.QUAD_REL_TOL == 1e-6


def test_app_config_rejects_bad_values(monkeypatch):
    """Failure case: out-of-range settings do not load."""
    monkeypatch.setenv("LATERAL_VDW_THREADS", "0")
    with pytest.raises(ValidationError):
        AppConfig()


def test_logger_basic_usage(caplog):
    logger = setup_logger("test_logger")
    with caplog.at_level(config.LOG_LEVEL, logger="test_logger"):
        logger.info("Test message")
    assert any(r.name == "test_logger" and r.getMessage() == "Test message" for r in caplog.records)


def test_logger_configured_once():
    first = setup_logger("repeat_logger")
    second = setup_logger("repeat_logger")
    assert first is second
    assert len(second.handlers) == 1
    assert second.level == logging.getLevelName(config.LOG_LEVEL)
