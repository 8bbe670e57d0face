"""
Error classification for the command pipeline.

Every exception that reaches the command layer is turned into an ErrorInfo
carrying a user message, suggestions and the process exit code:
0 success, 1 usage, 2 data/integrity, 3 cache-miss/fetch.
"""

import logging
import traceback
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple, Type

from config.config_manager import ConfigError
from corpus.corpus_store import CorpusParseError
from corpus.models import CorpusIntegrityError
from corpus.names import EmptyNameKeyError
from ingest.fetch_client import CacheMissError, FetchError
from ingest.page_parser import EmptyResultError, ProfileParseError
from metrics.team_metrics import DanglingEdgeError, MissingProfileError
from ranking.ranking_tables import DuplicateLabelError, UndefinedPercentError, UnknownReferenceError
from ranking.reference_data import ReferenceDataError
from report.table_renderer import UnknownFormatError


class UsageError(ValueError):
    """Raised for invalid command-line input."""
    pass


class EmptyTeamError(ValueError):
    """Raised when no profile matches a requested suffix."""
    pass


class ErrorCategory(Enum):
    """Categories of errors that can occur."""
    USAGE = "usage"
    DATA_INTEGRITY = "data_integrity"
    FETCH = "fetch"
    SYSTEM = "system"


class ErrorSeverity(Enum):
    """Severity levels for errors."""
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"
    CRITICAL = "critical"


EXIT_CODES = {
    ErrorCategory.USAGE: 1,
    ErrorCategory.DATA_INTEGRITY: 2,
    ErrorCategory.FETCH: 3,
    ErrorCategory.SYSTEM: 2,
}


@dataclass
class ErrorInfo:
    """Comprehensive error information."""
    category: ErrorCategory
    severity: ErrorSeverity
    message: str
    user_message: Optional[str] = None
    technical_details: Optional[str] = None
    suggestions: List[str] = field(default_factory=list)
    timestamp: datetime = field(default_factory=datetime.now)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.category]


_ERROR_PATTERNS: List[Tuple[Tuple[Type[BaseException], ...], Dict[str, Any]]] = [
    ((UsageError, UnknownFormatError, UnknownReferenceError, ConfigError), {
        "category": ErrorCategory.USAGE,
        "severity": ErrorSeverity.LOW,
        "user_message": "Invalid command usage.",
        "suggestions": ["Run with --help to list subcommands and flags"],
    }),
    ((CacheMissError,), {
        "category": ErrorCategory.FETCH,
        "severity": ErrorSeverity.MEDIUM,
        "user_message": "A page is not in the cache and offline mode is on.",
        "suggestions": [
            "Populate the cache directory, or point fetch.fixture_dir at fixture pages",
            "Set fetch.offline_only to false to allow the configured transport",
        ],
    }),
    ((FetchError,), {
        "category": ErrorCategory.FETCH,
        "severity": ErrorSeverity.HIGH,
        "user_message": "Fetching a page failed after all retries.",
        "suggestions": ["Check the transport configuration", "Increase fetch.max_retries"],
    }),
    ((CorpusParseError, EmptyResultError, ProfileParseError, EmptyNameKeyError), {
        "category": ErrorCategory.DATA_INTEGRITY,
        "severity": ErrorSeverity.MEDIUM,
        "user_message": "An input document could not be parsed.",
        "suggestions": ["See docs/fixtures.md for the expected formats"],
    }),
    ((CorpusIntegrityError, DanglingEdgeError, MissingProfileError, ReferenceDataError,
      DuplicateLabelError, EmptyTeamError, UndefinedPercentError), {
        "category": ErrorCategory.DATA_INTEGRITY,
        "severity": ErrorSeverity.MEDIUM,
        "user_message": "The data violates an integrity rule.",
        "suggestions": ["Check the corpus or metrics file named in the message"],
    }),
    ((FileNotFoundError, PermissionError), {
        "category": ErrorCategory.DATA_INTEGRITY,
        "severity": ErrorSeverity.MEDIUM,
        "user_message": "An input file could not be read.",
        "suggestions": ["Check that the path exists and is readable"],
    }),
]


class ErrorHandler:
    """
    Centralized error classification and logging.

    Keeps a bounded history of handled errors for the run summary.
    """

    def __init__(self, max_history: int = 100):
        self.logger = logging.getLogger(__name__)
        self._error_history: List[ErrorInfo] = []
        self._max_history = max_history

    def handle_error(self, error: BaseException, context: Optional[Dict[str, Any]] = None) -> ErrorInfo:
        """Classify an error, log it and add it to the history."""
        error_info = self._classify_error(error, context)
        self._add_to_history(error_info)
        self._log_error(error_info, error)
        return error_info

    def _classify_error(self, error: BaseException, context: Optional[Dict[str, Any]]) -> ErrorInfo:
        for error_types, pattern in _ERROR_PATTERNS:
            if isinstance(error, error_types):
                return ErrorInfo(
                    category=pattern["category"],
                    severity=pattern["severity"],
                    message=str(error),
                    user_message=pattern["user_message"],
                    suggestions=list(pattern["suggestions"]),
                    technical_details=self._get_technical_details(error, context),
                )

        return ErrorInfo(
            category=ErrorCategory.SYSTEM,
            severity=ErrorSeverity.HIGH,
            message=str(error) or type(error).__name__,
            user_message="An unexpected error occurred.",
            suggestions=["Re-run with logging.level DEBUG for details"],
            technical_details=self._get_technical_details(error, context),
        )

    def _get_technical_details(self, error: BaseException, context: Optional[Dict[str, Any]]) -> str:
        details = [
            f"Error Type: {type(error).__name__}",
            f"Error Message: {error}",
        ]
        if context:
            details.append(f"Context: {context}")
        details.append("".join(traceback.format_exception(type(error), error, error.__traceback__)))
        return "\n".join(details)

    def _add_to_history(self, error_info: ErrorInfo) -> None:
        self._error_history.append(error_info)
        if len(self._error_history) > self._max_history:
            self._error_history = self._error_history[-self._max_history:]

    def _log_error(self, error_info: ErrorInfo, original_error: BaseException) -> None:
        log_message = f"[{error_info.category.value}] {error_info.message}"

        if error_info.severity is ErrorSeverity.CRITICAL:
            self.logger.critical(log_message, exc_info=original_error)
        elif error_info.severity is ErrorSeverity.HIGH:
            self.logger.error(log_message, exc_info=original_error)
        elif error_info.severity is ErrorSeverity.MEDIUM:
            self.logger.error(log_message)
        else:
            self.logger.warning(log_message)

    def get_error_statistics(self) -> Dict[str, Any]:
        """Counts of handled errors by category."""
        by_category: Dict[str, int] = {}
        for error in self._error_history:
            by_category[error.category.value] = by_category.get(error.category.value, 0) + 1
        return {"total_errors": len(self._error_history), "by_category": by_category}
