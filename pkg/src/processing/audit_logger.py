"""
Logging setup and audit trail for pipeline runs.

Application records go through the ``cidsrank`` logger hierarchy; audit
events are written one JSON object per line to ``cidsrank.audit``.
"""

import json
import logging
import os
import sys
import threading
from dataclasses import dataclass, asdict
from datetime import datetime
from enum import Enum
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Any, Dict, List, Optional

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

# Module loggers are named after their packages; these are the roots
# that setup_logging attaches handlers to.
APP_LOGGERS = ('cidsrank', 'config', 'corpus', 'ingest', 'selection',
               'metrics', 'ranking', 'report', 'processing')


class AuditEventType(Enum):
    """Types of audit events."""
    CORPUS_LOADED = "corpus_loaded"
    CORPUS_SAVED = "corpus_saved"
    FETCH = "fetch"
    CACHE_HIT = "cache_hit"
    TEAM_SELECTED = "team_selected"
    METRICS_COMPUTED = "metrics_computed"
    TABLE_BUILT = "table_built"
    REPORT_WRITTEN = "report_written"
    COMMAND_FAILED = "command_failed"


@dataclass
class AuditEvent:
    """Audit event data structure."""
    event_id: str
    event_type: AuditEventType
    timestamp: datetime
    session_id: str
    component: str
    action: str
    details: Dict[str, Any]
    result: Optional[str] = None
    error_message: Optional[str] = None
    duration_ms: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['timestamp'] = self.timestamp.isoformat()
        data['event_type'] = self.event_type.value
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, default=str)


def parse_size(size_str: Any) -> int:
    """Parse a size string (e.g., '10MB') to bytes."""
    if isinstance(size_str, int):
        return size_str
    size_str = str(size_str).strip().upper()
    for suffix, factor in (('KB', 1024), ('MB', 1024 ** 2), ('GB', 1024 ** 3)):
        if size_str.endswith(suffix):
            return int(size_str[:-2]) * factor
    return int(size_str)


def setup_logging(logging_config: Dict[str, Any]) -> logging.Logger:
    """Attach rotating-file and console handlers to the application loggers.

    Calling it again replaces the handlers it installed before.
    """
    level = getattr(logging, str(logging_config.get('level', 'INFO')).upper(), logging.INFO)
    formatter = logging.Formatter(LOG_FORMAT)
    handlers: List[logging.Handler] = []

    log_file = logging_config.get('file')
    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = RotatingFileHandler(
            log_path,
            maxBytes=parse_size(logging_config.get('max_file_size', '10MB')),
            backupCount=logging_config.get('backup_count', 5),
            encoding='utf-8',
        )
        file_handler.setFormatter(formatter)
        handlers.append(file_handler)

    if logging_config.get('console', True):
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(logging.Formatter('%(levelname)s - %(message)s'))
        console_handler.setLevel(max(level, logging.WARNING))
        handlers.append(console_handler)

    for name in APP_LOGGERS:
        logger = logging.getLogger(name)
        for handler in [h for h in logger.handlers if getattr(h, '_cidsrank', False)]:
            logger.removeHandler(handler)
            handler.close()
        logger.setLevel(level)
        for handler in handlers:
            handler._cidsrank = True
            logger.addHandler(handler)

    return logging.getLogger('cidsrank')


class AuditLogger:
    """
    Records pipeline events for a run.

    Events are kept in memory (bounded) and logged as JSON lines.
    """

    def __init__(self, max_events_in_memory: int = 1000):
        self.audit_logger = logging.getLogger('cidsrank.audit')
        self.audit_events: List[AuditEvent] = []
        self.max_events_in_memory = max_events_in_memory
        self._lock = threading.Lock()
        self.session_id = f"session_{datetime.now().strftime('%Y%m%d_%H%M%S')}_{os.getpid()}"
        self._event_counter = 0

    def _generate_event_id(self) -> str:
        with self._lock:
            self._event_counter += 1
            return f"evt_{self.session_id}_{self._event_counter:06d}"

    def log_event(self, event_type: AuditEventType, component: str, action: str,
                  details: Optional[Dict[str, Any]] = None, result: Optional[str] = None,
                  error_message: Optional[str] = None,
                  duration_ms: Optional[int] = None) -> str:
        """Record one event and return its id."""
        event = AuditEvent(
            event_id=self._generate_event_id(),
            event_type=event_type,
            timestamp=datetime.now(),
            session_id=self.session_id,
            component=component,
            action=action,
            details=dict(details or {}),
            result=result,
            error_message=error_message,
            duration_ms=duration_ms,
        )

        with self._lock:
            self.audit_events.append(event)
            if len(self.audit_events) > self.max_events_in_memory:
                self.audit_events = self.audit_events[-self.max_events_in_memory:]

        self.audit_logger.info(event.to_json())
        return event.event_id

    def events_of(self, event_type: AuditEventType) -> List[AuditEvent]:
        with self._lock:
            return [e for e in self.audit_events if e.event_type is event_type]

    def get_audit_statistics(self) -> Dict[str, Any]:
        """Event totals by type for this session."""
        with self._lock:
            events = list(self.audit_events)
        by_type: Dict[str, int] = {}
        for event in events:
            by_type[event.event_type.value] = by_type.get(event.event_type.value, 0) + 1
        return {"total_events": len(events), "session_id": self.session_id, "by_event_type": by_type}
