"""
Parsers for author-search and profile pages.

Both page formats are simplified HTML modelled on the 2013 profile pages and
documented in docs/fixtures.md. Parsers are pure: the same document always
yields the same records.
"""

import logging
import re
from dataclasses import dataclass, field
from typing import List, Optional

from bs4 import BeautifulSoup

from corpus.models import Author, CorpusIntegrityError, Publication, ResearcherProfile
from corpus.names import NameMatch

logger = logging.getLogger(__name__)

_VERIFIED_EMAIL = re.compile(r"verified\s+email\s+at\s+([^\s<]+)", re.IGNORECASE)
_COUNT = re.compile(r"^\d[\d,]*$")


class EmptyResultError(ValueError):
    """Raised when a search page holds no author entries and no empty-results marker."""
    pass


class ProfileParseError(ValueError):
    """Raised when a profile page cannot be read."""
    pass


@dataclass(frozen=True)
class ProfileStub:
    """One entry of an author-search result page."""
    profile_id: str
    display_name: str
    email_domain: str
    search_rank: int

    @classmethod
    def from_profile(cls, profile: ResearcherProfile) -> "ProfileStub":
        return cls(profile.profile_id, profile.display_name, profile.email_domain, profile.search_rank)


@dataclass
class ParseReport:
    """Warnings collected while parsing one document."""
    warnings: List[str] = field(default_factory=list)

    def warn(self, message: str) -> None:
        logger.warning(message)
        self.warnings.append(message)


def _text(node) -> str:
    return " ".join(node.get_text(" ", strip=True).split()) if node is not None else ""


def extract_email_domain(text: str) -> Optional[str]:
    """Return the lowercase domain from a 'Verified email at <domain>' line."""
    match = _VERIFIED_EMAIL.search(text or "")
    if not match:
        return None
    domain = match.group(1).strip().rstrip(".,;").lower()
    if "@" in domain:
        domain = domain.rsplit("@", 1)[1]
    return domain or None


def parse_author_search_page(document: str, report: Optional[ParseReport] = None) -> List[ProfileStub]:
    """Parse a search page into stubs ranked 1..n in document order.

    Entries without a verified-email line are skipped with a warning; the
    ranks of the remaining entries follow their appearance order.

    Raises:
        EmptyResultError: If the page holds no entries and no empty-results marker
    """
    report = report or ParseReport()
    soup = BeautifulSoup(document, 'html.parser')
    entries = soup.select('li.gsc_1usr')

    if not entries:
        if soup.select_one('.gsc_no_results') is not None:
            return []
        raise EmptyResultError("No author entries found in search page")

    stubs: List[ProfileStub] = []
    for position, entry in enumerate(entries, 1):
        profile_id = (entry.get('data-profile-id') or '').strip()
        name = _text(entry.select_one('.gs_ai_name'))
        domain = extract_email_domain(_text(entry.select_one('.gs_ai_eml')))
        if not profile_id or not name:
            report.warn(f"Search entry {position}: missing profile id or name, skipped")
            continue
        if domain is None:
            report.warn(f"Search entry {position} ({profile_id}): no verified email, skipped")
            continue
        stubs.append(ProfileStub(profile_id, name, domain, len(stubs) + 1))

    return stubs


def parse_cited_by(text: str) -> Optional[int]:
    """Read a cited-by cell; blank and placeholder cells count as 0.

    Returns None when the cell holds something that is not a count.
    """
    value = (text or "").strip().replace("*", "")
    if value in ("", "-", "—", "–"):
        return 0
    if _COUNT.match(value):
        return int(value.replace(",", ""))
    return None


def _parse_row(row, index: int, profile_id: str, strictness: NameMatch) -> Publication:
    title = _text(row.select_one('.gsc_a_at'))
    if not title:
        raise ValueError("missing title")

    gray = row.select('.gs_gray')
    author_line = _text(gray[0]) if gray else ""
    authors = tuple(
        Author.from_raw(name.strip(), strictness)
        for name in author_line.split(",") if name.strip() and name.strip() != "..."
    )

    count = parse_cited_by(_text(row.select_one('.gsc_a_ac')))
    if count is None:
        raise ValueError("cited-by is not a count")

    year_text = _text(row.select_one('.gsc_a_h'))
    if year_text and not year_text.isdigit():
        raise ValueError(f"year {year_text!r} is not a number")
    year = int(year_text) if year_text else None

    pub_id = (row.get('data-pub-id') or '').strip() or f"{profile_id}:{index}"
    return Publication(pub_id=pub_id, title=title, year=year, authors=authors, citation_count=count)


def parse_profile_document(document: str, search_rank: int = 1,
                           email_domain: Optional[str] = None,
                           strictness: NameMatch = NameMatch.INITIAL,
                           report: Optional[ParseReport] = None) -> ResearcherProfile:
    """Parse a profile page into a ResearcherProfile.

    The page carries no search rank, so the caller supplies it (the ingest
    command takes it from the matching search stub). ``email_domain`` is the
    fallback when the page has no verified-email line.

    Raises:
        ProfileParseError: No profile header, or no parseable publication rows
            and no "no publications" marker
    """
    report = report or ParseReport()
    soup = BeautifulSoup(document, 'html.parser')
    header = soup.select_one('#gsc_prf')
    if header is None:
        raise ProfileParseError("Profile header #gsc_prf not found")

    profile_id = (header.get('data-profile-id') or '').strip()
    name = _text(soup.select_one('#gsc_prf_in'))
    if not profile_id or not name:
        raise ProfileParseError("Profile id or name missing")

    domain = extract_email_domain(_text(soup.select_one('#gsc_prf_ivh'))) or email_domain
    if not domain:
        raise ProfileParseError(f"Profile {profile_id}: no verified email domain")

    rows = soup.select('tr.gsc_a_tr')
    publications: List[Publication] = []
    seen = set()
    for index, row in enumerate(rows, 1):
        try:
            pub = _parse_row(row, index, profile_id, strictness)
        except (ValueError, CorpusIntegrityError) as e:
            report.warn(f"Profile {profile_id}: publication row {index} skipped ({e})")
            continue
        if pub.pub_id in seen:
            report.warn(f"Profile {profile_id}: duplicate publication {pub.pub_id} skipped")
            continue
        seen.add(pub.pub_id)
        publications.append(pub)

    if not publications and soup.select_one('.gsc_a_e') is None:
        raise ProfileParseError(f"Profile {profile_id}: no parseable publication rows")

    try:
        return ResearcherProfile(
            profile_id=profile_id,
            display_name=name,
            email_domain=domain,
            search_rank=search_rank,
            publications=tuple(publications),
        )
    except CorpusIntegrityError as e:
        raise ProfileParseError(str(e)) from e
