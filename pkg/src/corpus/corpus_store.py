"""
Corpus file reading and writing.

The corpus file is UTF-8 JSON::

    {"generated_at": "...",
     "profiles": [{"profile_id", "display_name", "email_domain", "search_rank",
                   "publications": [{"pub_id", "title", "year", "authors",
                                     "citation_count", "citing_pub_ids"?}]}],
     "publications": [...]?}

The optional top-level ``publications`` array holds citing documents that are
on no profile. ``save_corpus`` writes the canonical form: two-space indent,
keys in the order above, non-ASCII kept, trailing newline.
"""

import json
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from corpus.models import (
    Author, Corpus, CorpusIntegrityError, Publication, ResearcherProfile,
)
from corpus.names import NameMatch

logger = logging.getLogger(__name__)

TOP_LEVEL_FIELDS = ('generated_at', 'profiles', 'publications')
PROFILE_FIELDS = ('profile_id', 'display_name', 'email_domain', 'search_rank', 'publications')
PUBLICATION_FIELDS = ('pub_id', 'title', 'year', 'authors', 'citation_count', 'citing_pub_ids')


class CorpusParseError(ValueError):
    """Raised when a corpus document is malformed; names the line or field."""

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field:
            location.append(f"field {field}")
        super().__init__(f"{message} ({', '.join(location)})" if location else message)
        self.field = field
        self.line = line


class _Reader:
    """Validates the decoded JSON tree and builds model records."""

    def __init__(self, strict: bool, strictness: NameMatch):
        self.strict = strict
        self.strictness = strictness

    def check_fields(self, obj: Dict[str, Any], allowed, where: str) -> None:
        unknown = sorted(set(obj) - set(allowed))
        if not unknown:
            return
        if self.strict:
            raise CorpusParseError(f"Unknown field(s) {unknown}", field=where)
        logger.warning(f"Ignoring unknown field(s) {unknown} at {where}")

    @staticmethod
    def require(obj: Dict[str, Any], name: str, types, where: str, nullable: bool = False):
        if name not in obj:
            raise CorpusParseError("Missing required field", field=f"{where}.{name}")
        value = obj[name]
        if value is None and nullable:
            return None
        # bool is an int subclass but never a valid count or rank
        if isinstance(value, bool) or not isinstance(value, types):
            raise CorpusParseError(
                f"Expected {getattr(types, '__name__', types)}, got {type(value).__name__}",
                field=f"{where}.{name}",
            )
        return value

    def publication(self, obj: Any, where: str) -> Publication:
        if not isinstance(obj, dict):
            raise CorpusParseError("Publication must be an object", field=where)
        self.check_fields(obj, PUBLICATION_FIELDS, where)

        pub_id = self.require(obj, 'pub_id', str, where)
        if not pub_id:
            raise CorpusParseError("pub_id must be non-empty", field=f"{where}.pub_id")
        title = self.require(obj, 'title', str, where)
        year = self.require(obj, 'year', int, where, nullable=True)
        authors = self.require(obj, 'authors', list, where)
        for i, name in enumerate(authors):
            if not isinstance(name, str):
                raise CorpusParseError("Author must be text", field=f"{where}.authors[{i}]")
        citation_count = self.require(obj, 'citation_count', int, where)

        citing = None
        if 'citing_pub_ids' in obj:
            citing = self.require(obj, 'citing_pub_ids', list, where)
            for i, cid in enumerate(citing):
                if not isinstance(cid, str):
                    raise CorpusParseError("Citing id must be text", field=f"{where}.citing_pub_ids[{i}]")
            citing = tuple(citing)

        try:
            return Publication(
                pub_id=pub_id,
                title=title,
                year=year,
                authors=tuple(Author.from_raw(n, self.strictness) for n in authors),
                citation_count=citation_count,
                citing_pub_ids=citing,
            )
        except CorpusIntegrityError as e:
            raise CorpusIntegrityError(f"{e} at {where}") from e

    def profile(self, obj: Any, where: str) -> ResearcherProfile:
        if not isinstance(obj, dict):
            raise CorpusParseError("Profile must be an object", field=where)
        self.check_fields(obj, PROFILE_FIELDS, where)

        profile_id = self.require(obj, 'profile_id', str, where)
        if not profile_id:
            raise CorpusParseError("profile_id must be non-empty", field=f"{where}.profile_id")
        raw_pubs = self.require(obj, 'publications', list, where)
        pubs = [self.publication(p, f"{where}.publications[{i}]") for i, p in enumerate(raw_pubs)]

        seen = set()
        for pub in pubs:
            if pub.pub_id in seen:
                raise CorpusIntegrityError(f"Duplicate pub_id {pub.pub_id!r} in profile {profile_id}")
            seen.add(pub.pub_id)

        try:
            return ResearcherProfile(
                profile_id=profile_id,
                display_name=self.require(obj, 'display_name', str, where),
                email_domain=self.require(obj, 'email_domain', str, where),
                search_rank=self.require(obj, 'search_rank', int, where),
                publications=tuple(pubs),
            )
        except CorpusIntegrityError as e:
            raise CorpusIntegrityError(f"{e} at {where}") from e


def parse_corpus(text: str, strict: bool = False,
                 strictness: NameMatch = NameMatch.INITIAL) -> Corpus:
    """Parse and validate corpus JSON text.

    Raises:
        CorpusParseError: Malformed JSON or a field of the wrong shape
        CorpusIntegrityError: Duplicate ids, ranks or citing-edge mismatches
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise CorpusParseError(f"Invalid JSON: {e.msg}", line=e.lineno) from e

    if not isinstance(data, dict):
        raise CorpusParseError("Corpus root must be an object", field="$")
    reader = _Reader(strict, strictness)
    reader.check_fields(data, TOP_LEVEL_FIELDS, "$")

    generated_at = reader.require(data, 'generated_at', str, "$")
    raw_profiles = reader.require(data, 'profiles', list, "$")
    profiles = [reader.profile(p, f"profiles[{i}]") for i, p in enumerate(raw_profiles)]
    extra = [reader.publication(p, f"publications[{i}]")
             for i, p in enumerate(data.get('publications') or [])]

    profile_ids = set()
    ranks = set()
    publications: Dict[str, Publication] = {}
    for profile in profiles:
        if profile.profile_id in profile_ids:
            raise CorpusIntegrityError(f"Duplicate profile_id {profile.profile_id!r}")
        profile_ids.add(profile.profile_id)
        if profile.search_rank in ranks:
            raise CorpusIntegrityError(f"Duplicate search_rank {profile.search_rank}")
        ranks.add(profile.search_rank)
        for pub in profile.publications:
            known = publications.get(pub.pub_id)
            if known is not None and known != pub:
                raise CorpusIntegrityError(
                    f"Duplicate pub_id {pub.pub_id!r} with conflicting records"
                )
            publications[pub.pub_id] = pub

    for pub in extra:
        if pub.pub_id in publications:
            raise CorpusIntegrityError(f"Duplicate pub_id {pub.pub_id!r} in publications pool")
        publications[pub.pub_id] = pub

    return Corpus(
        profiles=tuple(profiles),
        publications=publications,
        extra_publications=tuple(extra),
        generated_at=generated_at,
    )


def load_corpus(path: Union[str, Path], strict: bool = False,
                strictness: NameMatch = NameMatch.INITIAL) -> Corpus:
    """Load a corpus file; either every invariant holds or loading fails."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Corpus file not found: {path}")
    corpus = parse_corpus(path.read_text(encoding='utf-8'), strict=strict, strictness=strictness)
    logger.info(f"Loaded corpus {path}: {len(corpus.profiles)} profiles, "
                f"{len(corpus.publications)} publications")
    return corpus


def _publication_dict(pub: Publication) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        'pub_id': pub.pub_id,
        'title': pub.title,
        'year': pub.year,
        'authors': [a.raw_name for a in pub.authors],
        'citation_count': pub.citation_count,
    }
    if pub.citing_pub_ids is not None:
        data['citing_pub_ids'] = list(pub.citing_pub_ids)
    return data


def corpus_to_dict(corpus: Corpus) -> Dict[str, Any]:
    """Plain-JSON form of a corpus; ``publications`` appears only when the pool is non-empty."""
    data: Dict[str, Any] = {
        'generated_at': corpus.generated_at,
        'profiles': [
            {
                'profile_id': p.profile_id,
                'display_name': p.display_name,
                'email_domain': p.email_domain,
                'search_rank': p.search_rank,
                'publications': [_publication_dict(pub) for pub in p.publications],
            }
            for p in corpus.profiles
        ],
    }
    if corpus.extra_publications:
        data['publications'] = [_publication_dict(pub) for pub in corpus.extra_publications]
    return data


def dump_corpus(corpus: Corpus) -> str:
    """Serialize a corpus in canonical form."""
    return json.dumps(corpus_to_dict(corpus), indent=2, ensure_ascii=False) + "\n"


def save_corpus(corpus: Corpus, path: Union[str, Path]) -> Path:
    """Write ``corpus`` to ``path`` in canonical form, creating parent directories."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_corpus(corpus), encoding='utf-8')
    logger.info(f"Saved corpus {path}: {len(corpus.profiles)} profiles")
    return path


def build_corpus(profiles: List[ResearcherProfile], generated_at: Optional[str] = None) -> Corpus:
    """Assemble an in-memory corpus from parsed profiles, validating it like a loaded one."""
    stamp = generated_at or datetime.now(timezone.utc).replace(microsecond=0).isoformat()
    draft = Corpus(profiles=tuple(profiles), generated_at=stamp)
    return parse_corpus(dump_corpus(draft))
