# Environment configuration helper for the planck-lab runner
import os
import logging
from functools import lru_cache

from dotenv import load_dotenv

TOOL_NAME = "planck-lab"
TOOL_VERSION = "0.1.0"

logger = logging.getLogger(__name__)

# name -> (default, parser)
_SETTINGS = {
    'LOG_LEVEL': ('INFO', str),
    'LAB_MAX_WORKERS': (1, int),
    'LAB_HOOP_COEFFICIENT': (1.0, float),
    'LAB_CAUSALITY_COEFFICIENT': (1.0, float),
    'LAB_EPSILON_COUPLING': (1.0, float),
    'LAB_HOLOGRAPHIC_THRESHOLD': (1.0, float),
    'LAB_CONSTANTS_PATH': ('', str),
}


def _read_settings():
    config = {}
    for name, (default, parse) in _SETTINGS.items():
        raw = os.environ.get(name)
        if raw is None or raw == '':
            config[name] = default
            continue
        try:
            value = parse(raw)
        except ValueError:
            logger.warning(f"⚠️ Could not parse {name}={raw!r}; falling back to {default!r}")
            value = default
        if isinstance(value, (int, float)) and value <= 0:
            logger.warning(f"⚠️ {name} must be positive (got {raw!r}); falling back to {default!r}")
            value = default
        config[name] = value

    config['LOG_LEVEL'] = str(config['LOG_LEVEL']).upper()
    return config


def configure_environment():
    """Load .env, set up logging and return the settings dict"""
    # Load environment variables from .env file if it exists
    load_dotenv()

    level_name = os.environ.get('LOG_LEVEL', 'INFO').upper()
    logging.basicConfig(
        level=getattr(logging, level_name, logging.INFO),
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
    )
    if not isinstance(getattr(logging, level_name, None), int):
        logger.warning(f"⚠️ Unknown LOG_LEVEL '{level_name}', using INFO")

    get_settings.cache_clear()
    config = get_settings()
    logger.debug("Lab settings: %s", config)
    return config


@lru_cache(maxsize=1)
def get_settings():
    """Settings from the environment, read once per process"""
    load_dotenv()
    return _read_settings()
