"""
Data model shared by every stage of the ranking pipeline.

Records are frozen dataclasses; a loaded corpus is never mutated, so it can
be read from several threads at once.
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple

from corpus.names import NameMatch, EmptyNameKeyError, normalize_author_name


class CorpusIntegrityError(ValueError):
    """Raised when records violate a corpus invariant."""
    pass


@dataclass(frozen=True)
class Author:
    """A name as printed on a publication plus its match key."""
    raw_name: str
    match_key: str

    @classmethod
    def from_raw(cls, raw_name: str, strictness: NameMatch = NameMatch.INITIAL) -> "Author":
        """Author from a name as printed; a name with no usable key gets an empty key."""
        try:
            key = normalize_author_name(raw_name, strictness)
        except EmptyNameKeyError:
            key = ""
        return cls(raw_name=raw_name, match_key=key)


@dataclass(frozen=True)
class Publication:
    """One document with its citation count and optional incoming edges."""
    pub_id: str
    title: str
    year: Optional[int]
    authors: Tuple[Author, ...]
    citation_count: int
    citing_pub_ids: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if self.citation_count < 0:
            raise CorpusIntegrityError(f"Publication {self.pub_id}: negative citation_count")
        if self.citing_pub_ids is not None and len(self.citing_pub_ids) != self.citation_count:
            raise CorpusIntegrityError(
                f"Publication {self.pub_id}: citation_count {self.citation_count} "
                f"but {len(self.citing_pub_ids)} citing_pub_ids"
            )

    @property
    def has_edges(self) -> bool:
        return self.citing_pub_ids is not None

    @property
    def author_keys(self) -> frozenset:
        return frozenset(a.match_key for a in self.authors if a.match_key)


def _check_domain(owner: str, email_domain: str) -> None:
    if not email_domain or email_domain != email_domain.lower() or "@" in email_domain:
        raise CorpusIntegrityError(
            f"{owner}: email_domain must be lowercase without '@', got {email_domain!r}"
        )


@dataclass(frozen=True)
class ResearcherProfile:
    """One author-search result with its publication list."""
    profile_id: str
    display_name: str
    email_domain: str
    search_rank: int
    publications: Tuple[Publication, ...] = ()

    def __post_init__(self):
        if self.search_rank < 1:
            raise CorpusIntegrityError(f"Profile {self.profile_id}: search_rank must be >= 1")
        _check_domain(f"Profile {self.profile_id}", self.email_domain)


@dataclass(frozen=True)
class Team:
    """Researchers selected for one country label."""
    label: str
    suffix: str
    members: Tuple[ResearcherProfile, ...]
    k: int

    def __post_init__(self):
        if len(self.members) > self.k:
            raise CorpusIntegrityError(f"Team {self.label}: {len(self.members)} members exceeds k={self.k}")
        ranks = [m.search_rank for m in self.members]
        if ranks != sorted(ranks):
            raise CorpusIntegrityError(f"Team {self.label}: members out of search_rank order")
        for member in self.members:
            if not member.email_domain.endswith(self.suffix):
                raise CorpusIntegrityError(
                    f"Team {self.label}: member {member.profile_id} ({member.email_domain}) "
                    f"does not end with {self.suffix!r}"
                )

    @property
    def short(self) -> bool:
        return len(self.members) < self.k


class MetricsSource(Enum):
    """Whether a metrics row was computed here or loaded from published data."""
    COMPUTED = "computed"
    REFERENCE = "reference"


@dataclass(frozen=True)
class TeamMetrics:
    """The five ranking columns for one team.

    ``cits_per_doc`` is exact. For computed rows it always equals
    citations / citable_documents; published rows keep the value as printed.
    """
    label: str
    citable_documents: int
    citations: int
    self_citations: Optional[int]
    cits_per_doc: Fraction
    h_index: int
    source: MetricsSource = MetricsSource.COMPUTED

    def __post_init__(self):
        for name in ('citable_documents', 'citations', 'h_index'):
            if getattr(self, name) < 0:
                raise CorpusIntegrityError(f"Metrics {self.label}: {name} must be non-negative")
        if self.self_citations is not None:
            if self.self_citations < 0:
                raise CorpusIntegrityError(f"Metrics {self.label}: self_citations must be non-negative")
            if self.self_citations > self.citations:
                raise CorpusIntegrityError(f"Metrics {self.label}: self_citations exceed citations")
        if self.cits_per_doc < 0:
            raise CorpusIntegrityError(f"Metrics {self.label}: cits_per_doc must be non-negative")
        if self.source is MetricsSource.COMPUTED:
            if self.h_index > self.citable_documents:
                raise CorpusIntegrityError(f"Metrics {self.label}: h_index exceeds citable_documents")
            if self.citable_documents and self.cits_per_doc * self.citable_documents != self.citations:
                raise CorpusIntegrityError(
                    f"Metrics {self.label}: cits_per_doc is not citations / citable_documents"
                )

    def cells(self) -> Tuple:
        return (self.citable_documents, self.citations, self.self_citations,
                self.cits_per_doc, self.h_index)


class TableKind(Enum):
    ABSOLUTE = "absolute"
    PERCENTAGE = "percentage"


class DisplayStyle(Enum):
    """Cits per Doc display precision: CIDS prints integers, SCImago two decimals."""
    CIDS = "cids"
    SCIMAGO = "scimago"

    @property
    def cits_per_doc_decimals(self) -> int:
        return 0 if self is DisplayStyle.CIDS else 2


COLUMN_LABELS: Tuple[str, ...] = (
    "Country", "Citable documents", "Citations", "Self Citations", "Cits per Doc", "H index",
)


@dataclass(frozen=True)
class RankingRow:
    label: str
    cells: Tuple

    def __post_init__(self):
        if len(self.cells) != 5:
            raise CorpusIntegrityError(f"Row {self.label}: expected 5 cells, got {len(self.cells)}")


@dataclass(frozen=True)
class RankingTable:
    """Ordered table rows, absolute or as percentages of a reference row."""
    kind: TableKind
    rows: Tuple[RankingRow, ...]
    column_labels: Tuple[str, ...] = COLUMN_LABELS
    reference_label: Optional[str] = None
    style: DisplayStyle = DisplayStyle.CIDS

    def __post_init__(self):
        if (self.kind is TableKind.PERCENTAGE) != (self.reference_label is not None):
            raise CorpusIntegrityError("reference_label is required exactly for percentage tables")

    def row(self, label: str) -> Optional[RankingRow]:
        return next((r for r in self.rows if r.label == label), None)

    @property
    def labels(self) -> List[str]:
        return [r.label for r in self.rows]


@dataclass(frozen=True)
class Corpus:
    """Validated profiles plus every publication reachable by pub_id."""
    profiles: Tuple[ResearcherProfile, ...]
    publications: Dict[str, Publication] = field(default_factory=dict)
    extra_publications: Tuple[Publication, ...] = ()
    generated_at: str = ""

    def get_profile(self, profile_id: str) -> Optional[ResearcherProfile]:
        return next((p for p in self.profiles if p.profile_id == profile_id), None)

    def get_publication(self, pub_id: str) -> Optional[Publication]:
        return self.publications.get(pub_id)

    def profiles_by_rank(self) -> List[ResearcherProfile]:
        """Profiles in search-rank order."""
        return sorted(self.profiles, key=lambda p: p.search_rank)

    def __iter__(self) -> Iterator[ResearcherProfile]:
        return iter(self.profiles)

    def __len__(self) -> int:
        return len(self.profiles)
