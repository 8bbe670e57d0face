"""Configuration management for the cidsrank pipeline."""

import copy
import os
import yaml
from typing import Dict, Any, Optional, List, Mapping
from pathlib import Path


DEFAULT_CONFIG_PATH = Path(__file__).parent.parent.parent / "config" / "config.yaml"

CACHE_DIR_ENV = "CIDSRANK_CACHE_DIR"

DEFAULTS: Dict[str, Any] = {
    'fetch': {
        'min_interval_ms': 1000,
        'max_retries': 2,
        'cache_dir': './cache',
        'offline_only': True,
        'timeout': 30,
        'url_template': None,
        'fixture_dir': None,
    },
    'selection': {
        'k': 30,
        'raw_suffix': False,
        'labels': {'edu': 'USA', 'uk': 'UK', 'cn': 'China'},
    },
    'metrics': {
        'mode': 'all',
        'name_match': 'initial',
        'workers': 1,
    },
    'ranking': {
        'reference': None,
        'cits_per_doc_precision': 'displayed',
    },
    'report': {
        'format': 'text',
        'style': 'cids',
    },
    'corpus': {
        'strict': False,
    },
    'logging': {
        'level': 'INFO',
        'file': './logs/cidsrank.log',
        'max_file_size': '10MB',
        'backup_count': 5,
        'console': True,
    },
}


class ConfigError(ValueError):
    """Raised when a configuration file is missing or unreadable."""
    pass


def _deep_merge(base: Dict[str, Any], override: Mapping[str, Any]) -> Dict[str, Any]:
    for key, value in override.items():
        if isinstance(value, Mapping) and isinstance(base.get(key), dict):
            _deep_merge(base[key], value)
        else:
            base[key] = value
    return base


class ConfigManager:
    """Manages application configuration from YAML files.

    Values are layered lowest first: built-in defaults, environment,
    configuration file. Command-line flags are applied on top by the caller
    through ``apply_overrides``.
    """

    def __init__(self, config_path: Optional[str] = None,
                 environ: Optional[Mapping[str, str]] = None):
        """Initialize configuration manager.

        Args:
            config_path: Path to configuration file. Defaults to config/config.yaml,
                which may be absent; an explicit path must exist.
            environ: Environment mapping, defaults to ``os.environ``.
        """
        self._explicit = config_path is not None
        self.config_path = Path(config_path) if config_path else DEFAULT_CONFIG_PATH
        self._environ = os.environ if environ is None else environ
        self._config: Dict[str, Any] = {}
        self.load_config()

    def load_config(self) -> None:
        """Load configuration from defaults, environment and YAML file."""
        config = copy.deepcopy(DEFAULTS)

        cache_dir = self._environ.get(CACHE_DIR_ENV)
        if cache_dir:
            config['fetch']['cache_dir'] = cache_dir

        if self.config_path.exists():
            try:
                with open(self.config_path, 'r', encoding='utf-8') as file:
                    loaded = yaml.safe_load(file) or {}
            except yaml.YAMLError as e:
                raise ConfigError(f"Failed to load configuration {self.config_path}: {e}")
            if not isinstance(loaded, dict):
                raise ConfigError(f"Configuration root must be a mapping: {self.config_path}")
            _deep_merge(config, loaded)
        elif self._explicit:
            raise ConfigError(f"Configuration file not found: {self.config_path}")

        self._config = config

    def get(self, key: str, default: Any = None) -> Any:
        """Get configuration value by key.

        Args:
            key: Configuration key (supports dot notation, e.g., 'selection.k')
            default: Default value if key not found

        Returns:
            Configuration value or default
        """
        keys = key.split('.')
        value = self._config

        for k in keys:
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                return default

        return value

    def apply_overrides(self, overrides: Mapping[str, Any]) -> None:
        """Apply dotted-key overrides (command-line flags); ``None`` values are skipped."""
        for key, value in overrides.items():
            if value is None:
                continue
            keys = key.split('.')
            section = self._config
            for k in keys[:-1]:
                section = section.setdefault(k, {})
            section[keys[-1]] = value

    def get_fetch_config(self) -> Dict[str, Any]:
        """Get fetch client configuration."""
        return self.get('fetch', {})

    def get_selection_config(self) -> Dict[str, Any]:
        """Get team selection configuration."""
        return self.get('selection', {})

    def get_metrics_config(self) -> Dict[str, Any]:
        """Get metrics configuration."""
        return self.get('metrics', {})

    def get_ranking_config(self) -> Dict[str, Any]:
        """Get ranking configuration."""
        return self.get('ranking', {})

    def get_report_config(self) -> Dict[str, Any]:
        """Get report configuration."""
        return self.get('report', {})

    def get_corpus_config(self) -> Dict[str, Any]:
        """Get corpus configuration."""
        return self.get('corpus', {})

    def get_logging_config(self) -> Dict[str, Any]:
        """Get logging configuration."""
        return self.get('logging', {})

    def validate_config(self) -> bool:
        """Validate configuration completeness and correctness.

        Raises:
            ConfigError: If configuration is invalid
        """
        validation_results = self.validate_all_sections()

        if not validation_results['valid']:
            raise ConfigError(f"Configuration validation failed: {validation_results['errors']}")

        return True

    def validate_all_sections(self) -> Dict[str, Any]:
        """Validate all configuration sections.

        Returns:
            Dict with validation results and any errors found
        """
        errors: List[str] = []
        warnings: List[str] = []

        for validator in (self._validate_fetch_config, self._validate_selection_config,
                          self._validate_metrics_config, self._validate_ranking_config,
                          self._validate_report_config, self._validate_logging_config):
            result = validator()
            errors.extend(result['errors'])
            warnings.extend(result['warnings'])

        return {
            'valid': len(errors) == 0,
            'errors': errors,
            'warnings': warnings
        }

    def _validate_fetch_config(self) -> Dict[str, List[str]]:
        errors = []
        warnings = []

        min_interval = self.get('fetch.min_interval_ms')
        if not isinstance(min_interval, (int, float)) or isinstance(min_interval, bool) or min_interval < 0:
            errors.append("fetch.min_interval_ms must be a non-negative number")
        elif min_interval < 500 and not self.get('fetch.offline_only', True):
            warnings.append(f"Short fetch interval ({min_interval} ms) in live mode")

        max_retries = self.get('fetch.max_retries')
        if not isinstance(max_retries, int) or isinstance(max_retries, bool) or max_retries < 0:
            errors.append("fetch.max_retries must be a non-negative integer")

        timeout = self.get('fetch.timeout')
        if not isinstance(timeout, (int, float)) or timeout <= 0:
            errors.append("fetch.timeout must be a positive number")

        url_template = self.get('fetch.url_template')
        if url_template is not None and '{key}' not in str(url_template):
            errors.append("fetch.url_template must contain a '{key}' placeholder")

        return {'errors': errors, 'warnings': warnings}

    def _validate_selection_config(self) -> Dict[str, List[str]]:
        errors = []
        warnings = []

        k = self.get('selection.k')
        if not isinstance(k, int) or isinstance(k, bool) or k < 1:
            errors.append("selection.k must be a positive integer")

        labels = self.get('selection.labels')
        if not isinstance(labels, dict):
            errors.append("selection.labels must be a mapping of suffix to label")

        return {'errors': errors, 'warnings': warnings}

    def _validate_metrics_config(self) -> Dict[str, List[str]]:
        errors = []
        warnings = []

        mode = self.get('metrics.mode')
        if mode not in ('all', 'cited_only'):
            errors.append(f"Invalid metrics.mode: {mode}. Must be one of ['all', 'cited_only']")

        name_match = self.get('metrics.name_match')
        if name_match not in ('initial', 'full'):
            errors.append(f"Invalid metrics.name_match: {name_match}. Must be one of ['initial', 'full']")
        elif name_match == 'full':
            warnings.append("Full-name matching undercounts self-citations when given names are abbreviated")

        workers = self.get('metrics.workers')
        if not isinstance(workers, int) or isinstance(workers, bool) or workers < 1:
            errors.append("metrics.workers must be a positive integer")

        return {'errors': errors, 'warnings': warnings}

    def _validate_ranking_config(self) -> Dict[str, List[str]]:
        errors = []
        precision = self.get('ranking.cits_per_doc_precision')
        if precision not in ('displayed', 'full'):
            errors.append(
                f"Invalid ranking.cits_per_doc_precision: {precision}. Must be one of ['displayed', 'full']"
            )
        return {'errors': errors, 'warnings': []}

    def _validate_report_config(self) -> Dict[str, List[str]]:
        errors = []
        fmt = self.get('report.format')
        if fmt not in ('text', 'csv', 'markdown'):
            errors.append(f"Invalid report.format: {fmt}. Must be one of ['text', 'csv', 'markdown']")
        style = self.get('report.style')
        if style not in ('cids', 'scimago'):
            errors.append(f"Invalid report.style: {style}. Must be one of ['cids', 'scimago']")
        return {'errors': errors, 'warnings': []}

    def _validate_logging_config(self) -> Dict[str, List[str]]:
        errors = []
        warnings = []

        log_level = self.get('logging.level')
        if log_level:
            valid_levels = ['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']
            if log_level not in valid_levels:
                errors.append(f"Invalid logging level: {log_level}. Must be one of {valid_levels}")

        max_size = self.get('logging.max_file_size')
        if max_size and isinstance(max_size, str):
            if not max_size.endswith(('KB', 'MB', 'GB')):
                errors.append("Logging max_file_size must end with KB, MB, or GB")

        backup_count = self.get('logging.backup_count')
        if backup_count is not None:
            if not isinstance(backup_count, int) or backup_count < 0:
                errors.append("Logging backup_count must be a non-negative integer")

        return {'errors': errors, 'warnings': warnings}

    def as_dict(self) -> Dict[str, Any]:
        """Return a deep copy of the effective configuration."""
        return copy.deepcopy(self._config)
