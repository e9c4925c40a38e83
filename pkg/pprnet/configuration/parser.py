import logging
from typing import Any, Dict, List, Optional, Tuple

import yaml

from pprnet.configuration.defaults import DEFAULT_CONFIG, KEY_TYPES, REQUIRED_KEYS
from pprnet.errors import ConfigurationError

log = logging.getLogger(__name__)

KNOWN_KEYS = set(DEFAULT_CONFIG) | set(REQUIRED_KEYS)


def _expected_types(key: str) -> Tuple[type, ...]:
    if key in KEY_TYPES:
        return KEY_TYPES[key]
    default = DEFAULT_CONFIG[key]
    if isinstance(default, bool):
        return (bool,)
    if isinstance(default, float):
        return (int, float)
    if isinstance(default, list):
        return (list, tuple)
    return (type(default),)


def validate_value(key: str, value: Any) -> Any:
    if key not in KNOWN_KEYS:
        raise ConfigurationError(f"Unknown configuration key '{key}'.")
    expected = _expected_types(key)
    # bool is an int subclass, but True is not a valid epoch count.
    if isinstance(value, bool) and bool not in expected:
        raise ConfigurationError(f"Configuration key '{key}' can not be a boolean.")
    if not isinstance(value, expected):
        names = "/".join(t.__name__ for t in expected)
        raise ConfigurationError(
            f"Configuration key '{key}' must be {names}, got {value!r}."
        )
    return list(value) if isinstance(value, tuple) else value


def load_config(path: str) -> Dict[str, Any]:
    """Read a flat YAML mapping of configuration keys from `path`.

    Raises
    ------
    ConfigurationError
        If the file is missing, is not a mapping or holds unknown keys or
        values of the wrong type.
    """
    try:
        with open(path, "r") as fh:
            content = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigurationError(f"Config file {path} does not exist.")
    except yaml.YAMLError as e:
        raise ConfigurationError(f"Config file {path} is not valid YAML: {e}")
    if content is None:
        return {}
    if not isinstance(content, dict):
        raise ConfigurationError(f"Config file {path} must hold a key: value mapping.")
    return {str(key): validate_value(str(key), value) for key, value in content.items()}


def merge_configurations(
    base: Dict[str, Any], overrides: Optional[Dict[str, Any]]
) -> Dict[str, Any]:
    """`base` updated with every override that is not None."""
    merged = dict(base)
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = validate_value(key, value)
    return merged


def resolve_config(
    path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None
) -> Dict[str, Any]:
    """Defaults, then the file at `path`, then `overrides`; all required keys set."""
    config = dict(DEFAULT_CONFIG)
    if path is not None:
        config = merge_configurations(config, load_config(path))
    config = merge_configurations(config, overrides)
    for key in REQUIRED_KEYS:
        if config.get(key) is None:
            raise ConfigurationError(f"Missing required configuration key '{key}'.")
    return config


def parse_pairs(pairs: List[Any]) -> Tuple[Tuple[str, str], ...]:
    """Bipolar pairs given as 'A-B' strings or [A, B] lists."""
    parsed = []
    for pair in pairs:
        if isinstance(pair, str):
            anterior, sep, posterior = pair.partition("-")
        elif isinstance(pair, (list, tuple)) and len(pair) == 2:
            (anterior, posterior), sep = pair, "-"
        else:
            anterior, sep, posterior = "", "", ""
        if not (sep and anterior and posterior):
            raise ConfigurationError(
                f"Invalid bipolar pair {pair!r} in 'bipolar_pairs'."
            )
        parsed.append((str(anterior).strip(), str(posterior).strip()))
    return tuple(parsed)
