import pytest

from config.config_manager import CACHE_DIR_ENV, DEFAULTS, ConfigError, ConfigManager


def test_defaults_without_a_file(tmp_path, monkeypatch):
    monkeypatch.setattr("config.config_manager.DEFAULT_CONFIG_PATH", tmp_path / "absent.yaml")
    config = ConfigManager(environ={})
    assert config.get("selection.k") == 30
    assert config.get("fetch.offline_only") is True
    assert config.get("selection.labels") == {"edu": "USA", "uk": "UK", "cn": "China"}
    assert config.validate_config()


def test_shipped_configs_are_valid():
    from config.config_manager import DEFAULT_CONFIG_PATH
    for path in (DEFAULT_CONFIG_PATH, DEFAULT_CONFIG_PATH.with_name("config.development.yaml")):
        assert ConfigManager(str(path), environ={}).validate_config()


def test_file_overrides_environment_overrides_defaults(config_file):
    path = config_file("fetch:\n  min_interval_ms: 0\n")
    from_env = ConfigManager(str(path), environ={CACHE_DIR_ENV: "/tmp/env-cache"})
    assert from_env.get("fetch.cache_dir") == "/tmp/env-cache"
    assert from_env.get("fetch.min_interval_ms") == 0
    assert from_env.get("fetch.max_retries") == DEFAULTS["fetch"]["max_retries"]

    path = config_file("fetch:\n  cache_dir: /tmp/file-cache\n")
    assert ConfigManager(str(path), environ={CACHE_DIR_ENV: "/tmp/env-cache"}).get("fetch.cache_dir") == \
        "/tmp/file-cache"


@pytest.mark.parametrize("name", ["config.yaml", "config.development.yaml"])
def test_environment_cache_dir_survives_the_shipped_configs(name):
    from config.config_manager import DEFAULT_CONFIG_PATH
    path = DEFAULT_CONFIG_PATH.with_name(name)
    assert ConfigManager(str(path), environ={}).get("fetch.cache_dir") == "./cache"
    assert ConfigManager(str(path), environ={CACHE_DIR_ENV: "/tmp/env-cache"}).get("fetch.cache_dir") == \
        "/tmp/env-cache"


def test_environment_cache_dir_with_the_default_path():
    assert ConfigManager(environ={CACHE_DIR_ENV: "/tmp/env-cache"}).get("fetch.cache_dir") == "/tmp/env-cache"


def test_overrides_win_and_skip_none(config):
    config.apply_overrides({"selection.k": 10, "report.style": None, "extra.key": "x"})
    assert config.get("selection.k") == 10
    assert config.get("report.style") == "cids"
    assert config.get("extra.key") == "x"


def test_defaults_are_not_shared(config):
    config.apply_overrides({"selection.labels.de": "Germany"})
    assert "de" not in DEFAULTS["selection"]["labels"]


def test_get_with_missing_key(config):
    assert config.get("selection.nope", 7) == 7
    assert config.get("selection.k.deeper") is None


def test_missing_explicit_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        ConfigManager(str(tmp_path / "nope.yaml"))


@pytest.mark.parametrize("text", ["fetch: [\n", "- just\n- a list\n"])
def test_unreadable_file(tmp_path, text):
    path = tmp_path / "bad.yaml"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(ConfigError):
        ConfigManager(str(path), environ={})


@pytest.mark.parametrize("overrides, message", [
    ({"selection.k": 0}, "selection.k"),
    ({"selection.k": True}, "selection.k"),
    ({"metrics.mode": "some"}, "metrics.mode"),
    ({"metrics.name_match": "fuzzy"}, "name_match"),
    ({"metrics.workers": 0}, "workers"),
    ({"ranking.cits_per_doc_precision": "exact"}, "cits_per_doc_precision"),
    ({"report.format": "latex"}, "report.format"),
    ({"report.style": "apa"}, "report.style"),
    ({"fetch.min_interval_ms": -1}, "min_interval_ms"),
    ({"fetch.url_template": "https://example.org/search"}, "{key}"),
    ({"logging.level": "LOUD"}, "logging level"),
])
def test_validation_errors(config, overrides, message):
    config.apply_overrides(overrides)
    with pytest.raises(ConfigError, match="validation failed") as info:
        config.validate_config()
    assert message in str(info.value)


def test_validation_warnings(config):
    config.apply_overrides({"metrics.name_match": "full", "fetch.offline_only": False,
                            "fetch.min_interval_ms": 100})
    result = config.validate_all_sections()
    assert result["valid"]
    assert len(result["warnings"]) == 2


def test_section_getters(config):
    assert config.get_fetch_config()["max_retries"] == 2
    assert config.get_logging_config()["console"] is False
    assert config.get_metrics_config()["mode"] == "all"
    assert config.as_dict()["report"] == {"format": "text", "style": "cids"}
