"""
Cached, rate-limited page fetching.

Cache layout: ``<cache_dir>/<sha256(key)>.html`` plus a ``.meta`` JSON sidecar
holding ``{"key", "retrieved_at"}``. A cache hit never reaches a transport.
"""

import hashlib
import json
import logging
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Optional, Protocol, Union

import requests

logger = logging.getLogger(__name__)


class CacheMissError(LookupError):
    """Raised when an offline fetch finds no cached page."""

    def __init__(self, key: str):
        super().__init__(f"Cache miss for {key!r} in offline mode")
        self.key = key


class FetchError(RuntimeError):
    """Raised when a transport keeps failing after all retries."""
    pass


class TransportError(RuntimeError):
    """Raised by a transport for one failed request."""
    pass


@dataclass(frozen=True)
class FetchPolicy:
    """Request spacing, retry and cache settings for one client."""
    min_interval: int = 1000
    max_retries: int = 2
    cache_dir: Path = Path("./cache")
    offline_only: bool = True

    def __post_init__(self):
        if self.min_interval < 0:
            raise ValueError("min_interval must be >= 0")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        object.__setattr__(self, 'cache_dir', Path(self.cache_dir))

    @classmethod
    def from_config(cls, fetch_config: dict) -> "FetchPolicy":
        """Policy from the fetch config section."""
        return cls(
            min_interval=fetch_config.get('min_interval_ms', 1000),
            max_retries=fetch_config.get('max_retries', 2),
            cache_dir=Path(fetch_config.get('cache_dir', './cache')),
            offline_only=fetch_config.get('offline_only', True),
        )


class Transport(Protocol):
    def __call__(self, key: str) -> str: ...


def key_filename(key: str) -> str:
    """Filesystem-safe name for a request key: ``search:edu`` -> ``search_edu``."""
    return "".join(ch if ch.isalnum() or ch in "-." else "_" for ch in key)


class FixtureTransport:
    """Serves pages from a directory of fixture files named after their keys."""

    def __init__(self, fixture_dir: Union[str, Path]):
        self.fixture_dir = Path(fixture_dir)

    def __call__(self, key: str) -> str:
        path = self.fixture_dir / f"{key_filename(key)}.html"
        if not path.exists():
            raise TransportError(f"No fixture for {key!r} at {path}")
        return path.read_text(encoding='utf-8')


class HttpTransport:
    """Fetches ``url_template.format(key=...)`` over a requests session.

    No URL ships with the repo; a template must be configured explicitly.
    """

    def __init__(self, url_template: str, timeout: float = 30,
                 session: Optional[requests.Session] = None):
        if '{key}' not in url_template:
            raise ValueError("url_template must contain a '{key}' placeholder")
        self.url_template = url_template
        self.timeout = timeout
        self._session = session or requests.Session()

    def __call__(self, key: str) -> str:
        kind, _, value = key.partition(":")
        url = self.url_template.format(key=requests.utils.quote(value or kind), kind=kind)
        try:
            response = self._session.get(url, timeout=self.timeout)
            response.raise_for_status()
        except requests.exceptions.RequestException as e:
            raise TransportError(f"GET {url} failed: {e}") from e
        return response.text

    def close(self) -> None:
        self._session.close()


class FetchClient:
    """Serializes fetches through one cache, spacing transport requests.

    ``clock`` returns seconds and ``sleep`` waits; both are injectable so the
    spacing can be observed without real waiting.
    """

    def __init__(self, policy: FetchPolicy, transport: Optional[Transport] = None,
                 clock: Callable[[], float] = time.monotonic,
                 sleep: Callable[[float], None] = time.sleep):
        self.policy = policy
        self.transport = transport
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self._last_request: Optional[float] = None
        self.requests_made = 0

    def cache_path(self, key: str) -> Path:
        digest = hashlib.sha256(key.encode('utf-8')).hexdigest()
        return self.policy.cache_dir / f"{digest}.html"

    def read_cache(self, key: str) -> Optional[str]:
        """Cached document for key, or None."""
        path = self.cache_path(key)
        if path.exists():
            return path.read_text(encoding='utf-8')
        return None

    def write_cache(self, key: str, document: str) -> Path:
        """Store a document and its .meta sidecar; returns the document path."""
        path = self.cache_path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(document, encoding='utf-8')
        meta = {
            'key': key,
            'retrieved_at': datetime.now(timezone.utc).replace(microsecond=0).isoformat(),
        }
        path.with_suffix('.meta').write_text(json.dumps(meta, indent=2) + "\n", encoding='utf-8')
        return path

    def _wait_for_slot(self) -> None:
        interval = self.policy.min_interval / 1000.0
        if self._last_request is not None:
            elapsed = self._clock() - self._last_request
            if elapsed < interval:
                self._sleep(interval - elapsed)
        self._last_request = self._clock()

    def fetch(self, key: str) -> str:
        """Return the document for ``key``, from cache when possible.

        Raises:
            CacheMissError: Key not cached and the policy is offline-only
                (or no transport is plugged in)
            FetchError: Transport failed on every attempt
        """
        with self._lock:
            cached = self.read_cache(key)
            if cached is not None:
                logger.debug(f"Cache hit for {key}")
                return cached

            if self.policy.offline_only or self.transport is None:
                raise CacheMissError(key)

            last_error: Optional[Exception] = None
            for attempt in range(self.policy.max_retries + 1):
                self._wait_for_slot()
                self.requests_made += 1
                try:
                    document = self.transport(key)
                except TransportError as e:
                    last_error = e
                    logger.warning(f"Fetch {key} attempt {attempt + 1} failed: {e}")
                    continue
                self.write_cache(key, document)
                logger.info(f"Fetched {key} on attempt {attempt + 1}")
                return document

            raise FetchError(
                f"Fetching {key!r} failed after {self.policy.max_retries + 1} attempts: {last_error}"
            )


def fetch(key: str, policy: FetchPolicy, transport: Optional[Transport] = None) -> str:
    """One-off fetch through a fresh client."""
    return FetchClient(policy, transport).fetch(key)
