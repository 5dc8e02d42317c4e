"""
Runtime configuration for braidform.

Configuration Priority (1 -> 3):
1. Environment variables (a .env file is loaded first via python-dotenv).
2. braidform.properties (key=value lines, placed in the working directory
   or pointed to by BRAIDFORM_PROPERTIES).
3. Code defaults.
"""
import logging
import os
from dataclasses import dataclass, replace
from typing import Dict, Optional

from dotenv import load_dotenv

from .errors import ConfigurationError

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'
LOG_DATEFMT = '%Y-%m-%d %H:%M:%S'

# (environment variable, properties key, default)
_KEYS = {
    'tolerance': ('BRAIDFORM_TOLERANCE', 'tolerance', '1e-10'),
    'null_threshold': ('BRAIDFORM_NULL_THRESHOLD', 'null_threshold', '1e-8'),
    'phase_tolerance': ('BRAIDFORM_PHASE_TOLERANCE', 'phase_tolerance', '1e-9'),
    'materialize_max_sites': ('BRAIDFORM_MATERIALIZE_MAX_SITES', 'materialize_max_sites', '12'),
    'dense_max_sites': ('BRAIDFORM_DENSE_MAX_SITES', 'dense_max_sites', '10'),
    'phased_max_sites': ('BRAIDFORM_PHASED_MAX_SITES', 'phased_max_sites', '22'),
    'product_max_dim': ('BRAIDFORM_PRODUCT_MAX_DIM', 'product_max_dim', '20736'),
    'formula_max_sites': ('BRAIDFORM_FORMULA_MAX_SITES', 'formula_max_sites', '6'),
    'log_file': ('BRAIDFORM_LOG_FILE', 'log_file', 'braidform.log'),
    'log_level': ('BRAIDFORM_LOG_LEVEL', 'log_level', 'INFO'),
}


@dataclass(frozen=True)
class Settings:
    tolerance: float = 1e-10
    null_threshold: float = 1e-8
    phase_tolerance: float = 1e-9
    materialize_max_sites: int = 12
    dense_max_sites: int = 10
    phased_max_sites: int = 22
    product_max_dim: int = 20736
    formula_max_sites: int = 6
    log_file: str = 'braidform.log'
    log_level: str = 'INFO'

    def with_tolerance(self, tolerance: Optional[float]) -> 'Settings':
        if tolerance is None:
            return self
        if not tolerance > 0:
            raise ConfigurationError(f"tolerance must be positive, got {tolerance}")
        return replace(self, tolerance=tolerance)


def load_properties(path: str) -> Dict[str, str]:
    """Load key=value pairs from a properties file; missing file -> {}"""
    config = {}
    try:
        with open(path, 'r') as f:
            for line in f:
                line = line.strip()
                if line and not line.startswith('#') and '=' in line:
                    key, value = line.split('=', 1)
                    config[key.strip()] = value.strip()
        logger.info(f"Configuration loaded from {path}")
    except FileNotFoundError:
        logger.debug(f"Properties file not found at {path}, using env and defaults")
    return config


def _positive(name: str, raw: str, kind):
    try:
        value = kind(raw)
    except ValueError:
        raise ConfigurationError(f"{name}: cannot parse {raw!r} as {kind.__name__}") from None
    if not value > 0:
        raise ConfigurationError(f"{name} must be positive, got {raw!r}")
    return value


def load_settings(properties_path: Optional[str] = None) -> Settings:
    load_dotenv()
    path = properties_path or os.getenv('BRAIDFORM_PROPERTIES', 'braidform.properties')
    props = load_properties(path)

    def cfg(field: str) -> str:
        env_name, prop_name, default = _KEYS[field]
        value = os.getenv(env_name)
        if value is None:
            value = props.get(prop_name, default)
        return value

    return Settings(
        tolerance=_positive('tolerance', cfg('tolerance'), float),
        null_threshold=_positive('null_threshold', cfg('null_threshold'), float),
        phase_tolerance=_positive('phase_tolerance', cfg('phase_tolerance'), float),
        materialize_max_sites=_positive('materialize_max_sites', cfg('materialize_max_sites'), int),
        dense_max_sites=_positive('dense_max_sites', cfg('dense_max_sites'), int),
        phased_max_sites=_positive('phased_max_sites', cfg('phased_max_sites'), int),
        product_max_dim=_positive('product_max_dim', cfg('product_max_dim'), int),
        formula_max_sites=_positive('formula_max_sites', cfg('formula_max_sites'), int),
        log_file=cfg('log_file'),
        log_level=cfg('log_level').upper(),
    )


_active: Optional[Settings] = None


def get_settings() -> Settings:
    global _active
    if _active is None:
        _active = load_settings()
    return _active


def set_settings(settings: Optional[Settings]):
    """Install process-wide settings; None reloads from env and properties on next use"""
    global _active
    _active = settings


def configure_logging(settings: Settings, quiet: bool = False, log_file: Optional[str] = None):
    """File handler plus console handler on stderr; stdout is kept for reports"""
    level = getattr(logging, settings.log_level, logging.INFO)
    root = logging.getLogger('braidform')
    root.setLevel(level)
    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()

    formatter = logging.Formatter(LOG_FORMAT, datefmt=LOG_DATEFMT)
    target = settings.log_file if log_file is None else log_file
    if target:
        file_handler = logging.FileHandler(target)
        file_handler.setLevel(level)
        file_handler.setFormatter(formatter)
        root.addHandler(file_handler)

    console_handler = logging.StreamHandler()
    console_handler.setLevel(logging.WARNING if quiet else level)
    console_handler.setFormatter(formatter)
    root.addHandler(console_handler)
    root.propagate = False
    return root


def resolve_tolerance(tolerance: Optional[float]) -> float:
    return get_settings().tolerance if tolerance is None else tolerance
