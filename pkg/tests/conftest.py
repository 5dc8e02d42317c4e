"""Shared fixtures for the braidform test suite"""
from fractions import Fraction

import numpy as np
import pytest

from braidform.config import set_settings
from braidform.rmatrix import catalog

THIRD = Fraction(1, 3)


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch, tmp_path):
    """Every test starts from default settings with file logging disabled"""
    for name in ('BRAIDFORM_TOLERANCE', 'BRAIDFORM_NULL_THRESHOLD', 'BRAIDFORM_PHASE_TOLERANCE',
                 'BRAIDFORM_MATERIALIZE_MAX_SITES', 'BRAIDFORM_DENSE_MAX_SITES',
                 'BRAIDFORM_PHASED_MAX_SITES', 'BRAIDFORM_PRODUCT_MAX_DIM',
                 'BRAIDFORM_FORMULA_MAX_SITES', 'BRAIDFORM_LOG_LEVEL'):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setenv('BRAIDFORM_LOG_FILE', '')
    monkeypatch.setenv('BRAIDFORM_PROPERTIES', str(tmp_path / 'absent.properties'))
    set_settings(None)
    yield
    set_settings(None)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def ex1():
    return catalog('ex1', theta_over_pi=THIRD)


@pytest.fixture
def ex2():
    return catalog('ex2', theta_over_pi=THIRD)


@pytest.fixture
def ex3():
    return catalog('ex3', theta_over_pi=THIRD)


@pytest.fixture
def ex4():
    return catalog('ex4', theta_over_pi=THIRD)


@pytest.fixture
def catalog_matrices(ex1, ex2, ex3, ex4):
    return {'ex1': ex1, 'ex2': ex2, 'ex3': ex3, 'ex4': ex4}
