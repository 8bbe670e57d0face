import pytest

from corpus.corpus_store import build_corpus, dump_corpus
from ingest.page_parser import (
    EmptyResultError, ParseReport, ProfileParseError, extract_email_domain,
    parse_author_search_page, parse_cited_by, parse_profile_document,
)
from selection.team_selector import filter_by_email_suffix
from helpers import profile_page, pub, search_page


def read(fixtures_dir, name):
    return (fixtures_dir / name).read_text(encoding="utf-8")


def test_search_page_fixture(fixtures_dir):
    stubs = parse_author_search_page(read(fixtures_dir, "search_page.html"))
    assert [s.search_rank for s in stubs] == list(range(1, 11))
    assert stubs[0].profile_id == "u01"
    assert stubs[0].display_name == "Alice Carter"
    assert stubs[3].email_domain == "tsinghua.edu.cn"
    assert len(filter_by_email_suffix(stubs, "edu")) == 4


def test_empty_results_marker(fixtures_dir):
    assert parse_author_search_page(read(fixtures_dir, "search_page_no_results.html")) == []


def test_page_without_entries_or_marker(fixtures_dir):
    with pytest.raises(EmptyResultError):
        parse_author_search_page(read(fixtures_dir, "search_page_garbage.html"))


def test_entry_without_verified_email_is_skipped(fixtures_dir):
    report = ParseReport()
    stubs = parse_author_search_page(read(fixtures_dir, "search_page_missing_email.html"), report)
    assert [(s.profile_id, s.search_rank) for s in stubs] == [("m01", 1), ("m03", 2)]
    assert len(report.warnings) == 1
    assert "m02" in report.warnings[0]


def test_ranks_follow_document_order():
    entries = [(f"id{i}", f"Person {i}", f"u{i}.{'edu' if i % 2 else 'uk'}") for i in range(25)]
    stubs = parse_author_search_page(search_page(entries))
    assert [s.profile_id for s in stubs] == [e[0] for e in entries]
    assert [s.search_rank for s in stubs] == list(range(1, 26))


@pytest.mark.parametrize("text, domain", [
    ("Verified email at mit.edu", "mit.edu"),
    ("verified EMAIL at CS.Stanford.EDU - Homepage", "cs.stanford.edu"),
    ("Verified email at jane@ox.ac.uk.", "ox.ac.uk"),
    ("University of Lisbon", None),
])
def test_extract_email_domain(text, domain):
    assert extract_email_domain(text) == domain


def test_profile_fixture(fixtures_dir):
    profile = parse_profile_document(read(fixtures_dir, "profile_page.html"), search_rank=7)
    assert profile.profile_id == "fcouto"
    assert profile.display_name == "Francisco M. Couto"
    assert profile.email_domain == "di.fc.ul.pt"
    assert profile.search_rank == 7
    assert [p.citation_count for p in profile.publications] == [10, 5, 0]
    assert [p.year for p in profile.publications] == [2005, 2011, 2013]
    first = profile.publications[0]
    assert first.pub_id == "fcouto:pub1"
    assert [a.match_key for a in first.authors] == ["couto f", "silva m", "coutinho p"]
    assert first.citing_pub_ids is None


def test_profile_with_no_publications_marker(fixtures_dir):
    profile = parse_profile_document(read(fixtures_dir, "profile_page_empty.html"))
    assert profile.publications == ()
    assert profile.email_domain == "upm.es"


def test_profile_without_header(fixtures_dir):
    with pytest.raises(ProfileParseError):
        parse_profile_document(read(fixtures_dir, "profile_page_malformed.html"))


def test_profile_with_no_parseable_rows():
    page = profile_page("p", "Ana Silva", "mit.edu", [pub("x", ["A Silva"], citation_count=0)])
    page = page.replace('class="gsc_a_at">Paper x<', 'class="gsc_a_at"><')
    with pytest.raises(ProfileParseError, match="no parseable publication rows"):
        parse_profile_document(page)


def test_unparseable_rows_are_skipped_with_warning():
    rows = [
        dict(pub("a", ["A Silva"]), cited_by="12"),
        dict(pub("b", ["A Silva"]), cited_by="many"),
        dict(pub("c", ["A Silva"], year=None), cited_by=""),
        dict(pub("d", ["A Silva"]), cited_by="1,204*"),
    ]
    report = ParseReport()
    profile = parse_profile_document(profile_page("p", "Ana Silva", "mit.edu", rows), report=report)
    assert [(p.pub_id, p.citation_count, p.year) for p in profile.publications] == [
        ("a", 12, 2010), ("c", 0, None), ("d", 1204, 2010),
    ]
    assert len(report.warnings) == 1
    assert "row 2" in report.warnings[0]


def test_email_domain_fallback():
    page = profile_page("p", "Ana Silva", None, [pub("x", ["A Silva"])])
    with pytest.raises(ProfileParseError, match="no verified email"):
        parse_profile_document(page)
    assert parse_profile_document(page, email_domain="mit.edu").email_domain == "mit.edu"


@pytest.mark.parametrize("text, count", [
    ("10", 10), ("0", 0), ("", 0), ("-", 0), ("—", 0), ("–", 0), ("3,456", 3456), ("12*", 12),
    ("n/a", None), ("1.5", None),
])
def test_parse_cited_by(text, count):
    assert parse_cited_by(text) == count


def test_parsing_is_deterministic(fixtures_dir):
    document = read(fixtures_dir, "profile_page.html")
    first = build_corpus([parse_profile_document(document)], generated_at="t")
    second = build_corpus([parse_profile_document(document)], generated_at="t")
    assert dump_corpus(first) == dump_corpus(second)
