import logging

import pytest

from braidform.config import (
    Settings,
    configure_logging,
    get_settings,
    load_properties,
    load_settings,
    resolve_tolerance,
    set_settings,
)
from braidform.errors import ConfigurationError


@pytest.fixture
def properties(tmp_path):
    path = tmp_path / 'braidform.properties'
    path.write_text("# guards\ntolerance=1e-7\ndense_max_sites = 8\nlog_level=debug\n")
    return str(path)


def test_defaults():
    settings = load_settings()
    assert settings.tolerance == 1e-10
    assert settings.product_max_dim == 20736
    assert settings.log_file == ''


def test_properties_file(properties):
    settings = load_settings(properties)
    assert settings.tolerance == 1e-7
    assert settings.dense_max_sites == 8
    assert settings.log_level == 'DEBUG'


def test_environment_wins(monkeypatch, properties):
    monkeypatch.setenv('BRAIDFORM_TOLERANCE', '1e-5')
    settings = load_settings(properties)
    assert settings.tolerance == 1e-5
    assert settings.dense_max_sites == 8


def test_properties_from_environment(monkeypatch, properties):
    monkeypatch.setenv('BRAIDFORM_PROPERTIES', properties)
    assert load_settings().dense_max_sites == 8


def test_missing_properties(tmp_path):
    assert load_properties(str(tmp_path / 'nope.properties')) == {}


@pytest.mark.parametrize("value", ['abc', '0', '-3'])
def test_rejects_bad_values(monkeypatch, value):
    monkeypatch.setenv('BRAIDFORM_DENSE_MAX_SITES', value)
    with pytest.raises(ConfigurationError):
        load_settings()


def test_with_tolerance():
    settings = Settings()
    assert settings.with_tolerance(None) is settings
    assert settings.with_tolerance(1e-4).tolerance == 1e-4
    with pytest.raises(ConfigurationError):
        settings.with_tolerance(0.0)


def test_active_settings():
    assert get_settings().tolerance == 1e-10
    set_settings(Settings(tolerance=1e-3))
    assert resolve_tolerance(None) == 1e-3
    assert resolve_tolerance(1e-6) == 1e-6


def test_logging_to_file(tmp_path):
    log = tmp_path / 'run.log'
    logger = configure_logging(Settings(), quiet=True, log_file=str(log))
    logging.getLogger('braidform.test').info("hello")
    for handler in logger.handlers:
        handler.flush()
    assert 'hello' in log.read_text()
    assert not logger.propagate
    configure_logging(Settings(), log_file='')
