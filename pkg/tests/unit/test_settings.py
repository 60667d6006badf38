"""Unit tests for msstab settings"""

import pytest

from msstab.config import Settings, get_settings


@pytest.mark.unit
class TestSettings:
    """Test defaults and environment overrides"""

    def test_defaults(self, monkeypatch):
        """Happy path: numerical defaults without environment overrides"""
        monkeypatch.delenv("MSSTAB_WORKERS", raising=False)
        monkeypatch.delenv("MSSTAB_DEFAULT_SEED", raising=False)
        settings = Settings(_env_file=None)
        assert settings.log_level == "WARNING"
        assert settings.criterion_tolerance == 1e-9
        assert settings.radius_margin == 1e-7
        assert settings.overflow_threshold == 1e150
        assert settings.default_seed == 20240611
        assert settings.default_batches * settings.default_paths == 10_000

    def test_environment_override(self, monkeypatch):
        """Happy path: MSSTAB_* variables override defaults"""
        monkeypatch.setenv("MSSTAB_WORKERS", "2")
        monkeypatch.setenv("msstab_log_level", "DEBUG")
        settings = Settings(_env_file=None)
        assert settings.workers == 2
        assert settings.log_level == "DEBUG"

    def test_invalid_override(self, monkeypatch):
        """Error case: a non-numeric tolerance is rejected"""
        monkeypatch.setenv("MSSTAB_RADIUS_MARGIN", "tiny")
        with pytest.raises(ValueError):
            Settings(_env_file=None)

    def test_singleton(self):
        """Invariant: get_settings returns one shared instance"""
        assert get_settings() is get_settings()
