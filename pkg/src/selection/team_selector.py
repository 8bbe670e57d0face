"""Team selection: filter ranked stubs by email suffix and keep the first K."""

import logging
from dataclasses import dataclass
from typing import Iterable, List, Mapping, Optional, Sequence, Tuple

from corpus.models import Corpus, Team
from ingest.page_parser import ProfileStub

logger = logging.getLogger(__name__)

DEFAULT_K = 30


@dataclass(frozen=True)
class TeamRoster:
    """Selected stubs in rank order; ``short`` when fewer than k matched."""
    members: Tuple[ProfileStub, ...]
    k: int

    @property
    def short(self) -> bool:
        """True when fewer than k stubs matched."""
        return len(self.members) < self.k


def domain_matches(email_domain: str, suffix: str, raw: bool = False) -> bool:
    """Label-aware suffix test: ``edu`` matches ``mit.edu`` but not ``educ.org``.

    With ``raw`` the test is a plain string suffix.
    """
    if raw:
        return email_domain.endswith(suffix)
    return email_domain == suffix or email_domain.endswith("." + suffix)


def _check_suffix(suffix: str) -> None:
    if not suffix or suffix != suffix.lower():
        raise ValueError(f"Suffix must be non-empty and lowercase, got {suffix!r}")


def filter_by_email_suffix(stubs: Iterable[ProfileStub], suffix: str,
                           raw: bool = False) -> List[ProfileStub]:
    """Keep the stubs whose email domain ends with ``suffix``, order preserved."""
    _check_suffix(suffix)
    return [s for s in stubs if domain_matches(s.email_domain, suffix, raw)]


def select_top_k(stubs: Sequence[ProfileStub], k: int = DEFAULT_K) -> TeamRoster:
    """Take the first min(k, n) stubs; ``stubs`` are already in rank order."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return TeamRoster(members=tuple(stubs[:k]), k=k)


def label_for_suffix(suffix: str, labels: Optional[Mapping[str, str]] = None) -> str:
    """Row label for a suffix from the configured map, else the upper-cased suffix."""
    return (labels or {}).get(suffix, suffix.upper())


def normalize_suffix(suffix: str) -> str:
    """Accept query-style suffixes such as ``.EDU``."""
    return suffix.strip().lstrip(".").lower()


def select_team(corpus: Corpus, suffix: str, k: int = DEFAULT_K, label: Optional[str] = None,
                raw: bool = False) -> Team:
    """Build a Team from the corpus profiles for one email suffix."""
    stubs = [ProfileStub.from_profile(p) for p in corpus.profiles_by_rank()]
    roster = select_top_k(filter_by_email_suffix(stubs, suffix, raw), k)
    members = tuple(corpus.get_profile(s.profile_id) for s in roster.members)
    team = Team(label=label or suffix.upper(), suffix=suffix, members=members, k=k)
    if team.short:
        logger.warning(f"Team {team.label}: only {len(members)} of {k} profiles end with {suffix!r}")
    else:
        logger.info(f"Team {team.label}: selected {len(members)} profiles ending with {suffix!r}")
    return team
