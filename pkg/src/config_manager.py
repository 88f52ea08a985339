"""Configuration management for benchmark sweeps.

This module loads benchmark configuration files, merges them over default
values and validates the experiment grid. YAML files are the primary format;
flat ``key=value`` text files are accepted too.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

from utils.errors import ConfigurationError

logger = logging.getLogger(__name__)

FAMILIES = ("er", "ba", "parallel")
DENSITY_KINDS = ("neighbors", "prob")
ALGOS = ("gas", "gas+", "pc")
BENCH_TESTERS = ("oracle", "fisherz")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
TEXT_SUFFIXES = (".txt", ".cfg", ".conf", ".ini")

# Flat keys of key=value files that belong to the experiment section
_LIST_KEYS = {"sizes", "densities", "seeds", "algos", "testers"}
_ALIASES = {"p": "sizes", "density": "densities", "seed": "seeds",
            "algo": "algos", "tester": "testers"}


# Default configuration values
DEFAULT_CONFIG = {
    "experiment": {
        "family": "er",
        "sizes": [6, 8, 10],
        "densities": [1, 2],
        "density_kind": "neighbors",
        "n": 10000,
        "alpha": 0.05,
        "seeds": [0, 1, 2],
        "algos": ["gas", "gas+", "pc"],
        "testers": ["oracle"],
    },
    "output": {
        "dir": "./results",
    },
    "logging": {
        "level": "INFO",
        "file": None,
    },
    "advanced": {
        "show_progress": True,
        "checkpoint": True,
    },
}


def _parse_scalar(text: str) -> Any:
    value = text.strip()
    lowered = value.lower()
    if lowered in ("true", "yes"):
        return True
    if lowered in ("false", "no"):
        return False
    if lowered in ("none", "null", ""):
        return None
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            pass
    return value


def parse_key_value(text: str) -> Dict[str, Any]:
    """Parse a flat ``key=value`` config into the nested layout.

    Bare experiment keys (family, p/sizes, density/densities, n, alpha, seeds,
    algos, testers, density_kind) go under ``experiment``; dotted keys such as
    ``output.dir`` are nested as written. List keys take comma-separated values.

    Raises:
        ConfigurationError: On a line without '='
    """
    config: Dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError("Expected key=value", f"line {lineno}: {raw!r}")

        key, value = (part.strip() for part in line.split("=", 1))
        key = _ALIASES.get(key, key)
        if key in _LIST_KEYS:
            parsed: Any = [_parse_scalar(v) for v in value.split(",") if v.strip()]
        else:
            parsed = _parse_scalar(value)

        path = key.split(".") if "." in key else ["experiment", key]
        section = config
        for part in path[:-1]:
            section = section.setdefault(part, {})
        section[path[-1]] = parsed
    return config


class ConfigManager:
    """Manages benchmark configuration loading and validation.

    Loads a YAML or key=value file, merges it over ``DEFAULT_CONFIG``,
    validates the experiment grid and exposes dot-notation lookups.
    """

    def __init__(self, config_path: Optional[Path] = None):
        """Initialize the ConfigManager.

        Args:
            config_path: Path to the benchmark config (None = defaults only)
        """
        self.config_path = Path(config_path) if config_path is not None else None
        self.config: Dict[str, Any] = {}
        self._loaded = False

    def load(self):
        """Load and validate the configuration.

        Raises:
            ConfigurationError: If the file cannot be parsed or is invalid
        """
        self.config = self._deep_merge(DEFAULT_CONFIG, {})

        if self.config_path is None:
            logger.info("No config file given, using defaults")
        elif self.config_path.exists():
            logger.info("Loading configuration from %s", self.config_path)
            user_config = self._read(self.config_path)
            self.config = self._deep_merge(self.config, user_config)
        else:
            logger.warning("Config file %s not found, using defaults", self.config_path)

        self.validate()
        self._loaded = True

    def _read(self, path: Path) -> Dict[str, Any]:
        with open(path, "r") as f:
            text = f.read()

        if path.suffix.lower() in TEXT_SUFFIXES:
            return parse_key_value(text)

        try:
            data = yaml.safe_load(text) or {}
        except yaml.YAMLError as e:
            raise ConfigurationError("Invalid YAML in config file", f"{path}: {e}")
        if not isinstance(data, dict):
            raise ConfigurationError("Config file must contain a mapping", str(path))
        return data

    def validate(self):
        """Validate configuration against the expected schema.

        Raises:
            ConfigurationError: If configuration is invalid
        """
        logger.debug("Validating configuration")

        exp = self.config.get("experiment")
        if not isinstance(exp, dict):
            raise ConfigurationError("Missing required section: experiment")

        family = exp.get("family")
        if family not in FAMILIES:
            raise ConfigurationError(f"Invalid family: {family}", f"Must be one of {list(FAMILIES)}")

        if exp.get("density_kind") not in DENSITY_KINDS:
            raise ConfigurationError(f"Invalid density_kind: {exp.get('density_kind')}",
                                     f"Must be one of {list(DENSITY_KINDS)}")

        sizes = self._int_list(exp, "sizes", minimum=1)
        if family == "parallel" and min(sizes) < 3:
            raise ConfigurationError("Parallel-paths family needs every size >= 3")

        densities = exp.get("densities")
        if family != "parallel":
            if not isinstance(densities, list) or not densities:
                raise ConfigurationError("experiment.densities must be a nonempty list")
            for d in densities:
                self._check_density(family, exp["density_kind"], d, sizes)

        self._int_list(exp, "seeds", minimum=0)
        self._choice_list(exp, "algos", ALGOS)
        testers = self._choice_list(exp, "testers", BENCH_TESTERS)

        alpha = exp.get("alpha")
        if not isinstance(alpha, (int, float)) or not 0 < alpha < 1:
            raise ConfigurationError(f"Invalid alpha: {alpha}", "Must be between 0 and 1")

        n = exp.get("n")
        if "fisherz" in testers and (not isinstance(n, int) or n < 4):
            raise ConfigurationError(f"Invalid n: {n}", "Must be an integer >= 4")

        advanced = self.config.get("advanced", {})
        for key in ("show_progress", "checkpoint"):
            if not isinstance(advanced.get(key), bool):
                raise ConfigurationError(f"advanced.{key} must be true or false")

        level = self.config.get("logging", {}).get("level")
        if str(level).upper() not in LOG_LEVELS:
            raise ConfigurationError(f"Invalid logging.level: {level}", f"Must be one of {list(LOG_LEVELS)}")

        logger.debug("Configuration validation successful")

    @staticmethod
    def _int_list(section: Dict[str, Any], key: str, minimum: int) -> List[int]:
        values = section.get(key)
        if not isinstance(values, list) or not values:
            raise ConfigurationError(f"experiment.{key} must be a nonempty list")
        for v in values:
            if not isinstance(v, int) or isinstance(v, bool) or v < minimum:
                raise ConfigurationError(f"Invalid value in experiment.{key}: {v}",
                                         f"Must be an integer >= {minimum}")
        return values

    @staticmethod
    def _choice_list(section: Dict[str, Any], key: str, allowed) -> List[str]:
        values = section.get(key)
        if not isinstance(values, list) or not values:
            raise ConfigurationError(f"experiment.{key} must be a nonempty list")
        for v in values:
            if v not in allowed:
                raise ConfigurationError(f"Invalid value in experiment.{key}: {v}",
                                         f"Must be one of {list(allowed)}")
        return values

    @staticmethod
    def _check_density(family: str, kind: str, density: Any, sizes: List[int]):
        if not isinstance(density, (int, float)) or isinstance(density, bool) or density < 0:
            raise ConfigurationError(f"Invalid density: {density}", "Must be a non-negative number")
        if family == "ba":
            if not isinstance(density, int) or any(not 1 <= density < p for p in sizes):
                raise ConfigurationError(f"Invalid Barabasi-Albert m: {density}",
                                         "Must be an integer with 1 <= m < p for every size")
        elif kind == "prob" and density > 1:
            raise ConfigurationError(f"Invalid edge probability: {density}", "Must be in [0, 1]")
        elif kind == "neighbors" and any(density > p - 1 for p in sizes):
            raise ConfigurationError(f"Invalid expected neighbourhood size: {density}",
                                     "Must be <= p - 1 for every size")

    def get(self, key: str, default: Any = None) -> Any:
        """Get a configuration value.

        Args:
            key: Configuration key (supports dot notation, e.g., "experiment.alpha")
            default: Default value if key not found

        Returns:
            Configuration value or default
        """
        if not self._loaded:
            logger.warning("Configuration not loaded, call load() first")
            return default

        value = self.config
        for k in key.split('.'):
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                return default

        return value

    def experiment(self) -> Dict[str, Any]:
        """The validated experiment section."""
        return dict(self.get("experiment", {}))

    def _deep_merge(self, base: Dict, override: Dict) -> Dict:
        """Deep merge two dictionaries.

        Args:
            base: Base dictionary
            override: Dictionary with values to override

        Returns:
            Merged dictionary
        """
        result = {k: (self._deep_merge(v, {}) if isinstance(v, dict) else v)
                  for k, v in base.items()}

        for key, value in override.items():
            if key in result and isinstance(result[key], dict) and isinstance(value, dict):
                result[key] = self._deep_merge(result[key], value)
            else:
                result[key] = value

        return result
