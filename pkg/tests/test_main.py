import json

import pytest

from main import build_parser, main
from helpers import corpus_text, profile, pub


@pytest.fixture
def cli(config_file, capsys):
    def run(*argv, config_text=""):
        code = main(["--config", str(config_file(config_text)), *argv])
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    return run


def test_reference_tables(cli, golden_dir):
    code, out, err = cli("reference-tables", "cids")
    assert code == 0
    assert out == (golden_dir / "cids_absolute.txt").read_text(encoding="utf-8") + "\n" + \
        (golden_dir / "cids_percentage.txt").read_text(encoding="utf-8")
    assert err == ""


def test_reference_tables_as_csv(cli, golden_dir):
    code, out, _ = cli("reference-tables", "scimago", "--format", "csv")
    assert code == 0
    assert out.startswith((golden_dir / "scimago_absolute.csv").read_text(encoding="utf-8"))


def test_analyze(cli, golden_dir, three_countries_path):
    code, out, err = cli("analyze", str(three_countries_path), "--suffix", "edu", "--suffix", "uk",
                         "--suffix", "cn", "--reference", "USA")
    assert code == 0
    assert out == (golden_dir / "three_countries_analyze.txt").read_text(encoding="utf-8")
    assert "warning: Team China: only 26 of 30 profiles match 'cn'" in err


def test_analyze_flags_reach_the_config(cli, three_countries_path):
    _, default, _ = cli("analyze", str(three_countries_path), "--suffix", "edu", "--format", "csv")
    code, cited, _ = cli("analyze", str(three_countries_path), "--suffix", "edu", "--format", "csv",
                         "--mode", "cited-only", "--k", "5", "--style", "scimago")
    assert code == 0
    assert cited != default
    usa = cited.splitlines()[1].split(",")
    assert "." in usa[4]


def test_render_metrics_file(cli, three_countries_path, tmp_path):
    metrics = tmp_path / "metrics.json"
    cli("analyze", str(three_countries_path), "--suffix", "edu", "--suffix", "uk",
        "--metrics-out", str(metrics))
    assert json.loads(metrics.read_text(encoding="utf-8"))["dataset"] == "analysis"

    code, out, _ = cli("render", str(metrics), "--reference", "UK", "--format", "markdown")
    assert code == 0
    assert out.startswith("| Country |")
    assert out.count("| Country |") == 2


@pytest.mark.parametrize("argv", [
    [],
    ["analyze"],
    ["reference-tables", "wos"],
    ["analyze", "corpus.json", "--k", "many"],
    ["ingest", "--search", "s.html"],
    ["analyze", "corpus.json", "--format", "latex"],
])
def test_usage_errors_exit_one(cli, argv):
    code, out, err = cli(*argv)
    assert code == 1
    assert out == ""
    assert err.startswith("error: ")


def test_reference_outside_analyzed_teams(cli, three_countries_path):
    code, _, err = cli("analyze", str(three_countries_path), "--suffix", "edu", "--reference", "China")
    assert code == 1
    assert "China" in err


def test_missing_config_file(capsys, tmp_path):
    assert main(["--config", str(tmp_path / "nope.yaml"), "reference-tables", "cids"]) == 1
    assert "Configuration file not found" in capsys.readouterr().err


def test_invalid_config_value(cli):
    code, _, err = cli("reference-tables", "cids", config_text="selection:\n  k: 0\n")
    assert code == 1
    assert "validation failed" in err


@pytest.mark.parametrize("content, message", [
    ('{"profiles": [', "line 1"),
    (corpus_text([profile("a", "mit.edu", 1, [pub("x", ["A Silva"], citing=["gone"])])]), "gone"),
])
def test_data_errors_exit_two(cli, tmp_path, content, message):
    corpus = tmp_path / "corpus.json"
    corpus.write_text(content, encoding="utf-8")
    code, out, err = cli("analyze", str(corpus), "--suffix", "edu")
    assert code == 2
    assert out == ""
    assert message in err


def test_missing_corpus_exits_two(cli, tmp_path):
    code, _, err = cli("analyze", str(tmp_path / "missing.json"), "--suffix", "edu")
    assert code == 2
    assert "missing.json" in err


def test_empty_team_exits_two(cli, three_countries_path):
    code, _, err = cli("analyze", str(three_countries_path), "--suffix", "edu", "--suffix", "de")
    assert code == 2
    assert "'de'" in err


def test_offline_cache_miss_exits_three(cli, tmp_path):
    code, out, err = cli("ingest", "--query", "edu", "--cache-dir", str(tmp_path / "empty"),
                         "--out", str(tmp_path / "corpus.json"))
    assert code == 3
    assert out == ""
    assert "search:edu" in err
    assert "hint:" in err
    assert not (tmp_path / "corpus.json").exists()


def test_online_ingest_from_fixture_pages(cli, fixtures_dir, tmp_path):
    config_text = f"fetch:\n  min_interval_ms: 0\n  fixture_dir: {fixtures_dir / 'pages'}\n"
    code, out, _ = cli("ingest", "--query", "edu", "--online", "--cache-dir", str(tmp_path / "cache"),
                       "--out", str(tmp_path / "corpus.json"), config_text=config_text)
    assert code == 0
    assert out == "edu: 2\nprofiles: 3\n"

    # the cache now answers without the transport
    code, out, _ = cli("ingest", "--query", "edu", "--cache-dir", str(tmp_path / "cache"),
                       "--out", str(tmp_path / "again.json"))
    assert code == 0
    assert out == "edu: 2\nprofiles: 3\n"


def test_ingest_pages(cli, fixtures_dir, tmp_path):
    code, out, err = cli("ingest", "--search", str(fixtures_dir / "search_page.html"),
                         "--profile", str(fixtures_dir / "profile_page.html"),
                         "--suffix", "edu", "--out", str(tmp_path / "corpus.json"))
    assert code == 0
    assert out == "edu: 4\nprofiles: 0\n"
    assert "fcouto" in err


def test_parser_defaults_leave_config_in_charge():
    args = build_parser().parse_args(["analyze", "c.json"])
    assert (args.k, args.mode, args.fmt, args.style, args.strict) == (None, None, None, None, None)


@pytest.mark.parametrize("argv", [
    ["ingest", "--strict"],
    ["--strict", "ingest"],
])
def test_strict_before_or_after_the_subcommand(cli, fixtures_dir, tmp_path, argv):
    pages = ["--search", str(fixtures_dir / "search_page.html"),
             "--profile", str(fixtures_dir / "profile_page_malformed.html")]
    code, out, _ = cli("ingest", *pages, "--out", str(tmp_path / "lenient.json"))
    assert code == 0
    assert out.endswith("profiles: 0\n")

    code, out, err = cli(*argv, *pages, "--out", str(tmp_path / "strict.json"))
    assert code == 2
    assert out == ""
    assert "profile_page_malformed.html" in err
    assert not (tmp_path / "strict.json").exists()


def test_strict_after_other_subcommands_parses():
    parser = build_parser()
    assert parser.parse_args(["analyze", "c.json", "--strict"]).strict is True
    assert parser.parse_args(["--strict", "render", "m.json"]).strict is True
    assert parser.parse_args(["reference-tables", "cids"]).strict is None
