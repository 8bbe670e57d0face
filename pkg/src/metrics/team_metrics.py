"""
Team metric columns: citable documents, citations, self-citations,
citations per document and h-index, computed over a team's pooled
publications.
"""

import logging
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, List, Optional

from corpus.models import Author, Corpus, Publication, Team, TeamMetrics

logger = logging.getLogger(__name__)


class CitableMode(Enum):
    """Which publications enter the Cits per Doc denominator."""
    ALL = "all"
    CITED_ONLY = "cited_only"

    @classmethod
    def parse(cls, value: str) -> "CitableMode":
        """Accept ``cited-only`` as well as ``cited_only``."""
        return cls(value.replace("-", "_"))


class MissingProfileError(LookupError):
    """Raised when a team member is not part of the corpus."""
    pass


class DanglingEdgeError(LookupError):
    """Raised when citing ids point at publications the corpus does not hold."""

    def __init__(self, pub_ids: List[str]):
        super().__init__(f"Citing ids not found in corpus: {', '.join(pub_ids)}")
        self.pub_ids = pub_ids


def h_index(citation_counts: Iterable[int]) -> int:
    """Largest h such that at least h of the counts are >= h."""
    h = 0
    for rank, count in enumerate(sorted(citation_counts, reverse=True), 1):
        if count < rank:
            break
        h = rank
    return h


def pool_team_publications(team: Team, corpus: Corpus) -> List[Publication]:
    """Union of the members' publications, one entry per pub_id, first-seen order."""
    pooled: Dict[str, Publication] = {}
    for member in team.members:
        profile = corpus.get_profile(member.profile_id)
        if profile is None:
            raise MissingProfileError(f"Team {team.label}: profile {member.profile_id} not in corpus")
        for pub in profile.publications:
            pooled.setdefault(pub.pub_id, pub)
    return list(pooled.values())


def count_citable_documents(pooled: List[Publication], mode: CitableMode = CitableMode.ALL) -> int:
    """Pooled publications counted under ``mode``; cited-only skips uncited ones."""
    if mode is CitableMode.CITED_ONLY:
        return sum(1 for p in pooled if p.citation_count >= 1)
    return len(pooled)


def count_citations(pooled: List[Publication]) -> int:
    """Sum of the cited-by counts of the pooled publications."""
    return sum(p.citation_count for p in pooled)


def is_self_citation(citing_authors: Iterable[Author], cited_authors: Iterable[Author]) -> bool:
    """True when the two author lists share a match key."""
    citing = {a.match_key for a in citing_authors if a.match_key}
    return any(a.match_key in citing for a in cited_authors if a.match_key)


def count_self_citations(pooled: List[Publication], corpus: Corpus) -> Optional[int]:
    """Count (citing, cited) pairs that share an author.

    A pair counts once however many authors overlap. Returns None when any
    pooled publication has no citation edges.

    Raises:
        DanglingEdgeError: Citing ids that resolve to no corpus publication
    """
    if any(not p.has_edges for p in pooled):
        return None

    dangling = sorted({cid for p in pooled for cid in p.citing_pub_ids
                       if corpus.get_publication(cid) is None})
    if dangling:
        raise DanglingEdgeError(dangling)

    total = 0
    for cited in pooled:
        for cid in cited.citing_pub_ids:
            if is_self_citation(corpus.get_publication(cid).authors, cited.authors):
                total += 1
    return total


def cits_per_doc(citations: int, documents: int) -> Fraction:
    """Exact citations per document; 0 for a team with no documents."""
    return Fraction(citations, documents) if documents else Fraction(0)


def compute_team_metrics(team: Team, corpus: Corpus, mode: CitableMode = CitableMode.ALL) -> TeamMetrics:
    """Assemble the five columns for one team.

    The h-index runs over the pooled per-publication counts, not over the
    members' individual indices.
    """
    pooled = pool_team_publications(team, corpus)
    documents = count_citable_documents(pooled, mode)
    citations = count_citations(pooled)
    metrics = TeamMetrics(
        label=team.label,
        citable_documents=documents,
        citations=citations,
        self_citations=count_self_citations(pooled, corpus),
        cits_per_doc=cits_per_doc(citations, documents),
        h_index=h_index(p.citation_count for p in pooled),
    )
    logger.info(f"Team {team.label}: {len(pooled)} pooled publications, "
                f"{documents} citable, {citations} citations, h={metrics.h_index}")
    return metrics
