"""
Command processor that runs the ranking pipeline end to end.

Subcommands:
1. ingest: search/profile pages -> corpus file
2. analyze: corpus -> teams per suffix -> metrics -> absolute and percentage tables
3. reference-tables: shipped published tables -> recomputed percentage tables
4. render: any metrics file -> tables
"""

import dataclasses
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from config.config_manager import ConfigManager
from corpus.corpus_store import build_corpus, load_corpus, save_corpus
from corpus.models import Corpus, DisplayStyle, RankingTable, ResearcherProfile, TeamMetrics
from corpus.names import NameMatch
from ingest.fetch_client import FetchClient, FetchPolicy, FixtureTransport, HttpTransport, Transport
from ingest.page_parser import (
    EmptyResultError, ParseReport, ProfileParseError, ProfileStub, parse_author_search_page,
    parse_profile_document,
)
from metrics.team_metrics import CitableMode, compute_team_metrics
from processing.audit_logger import AuditEventType, AuditLogger
from processing.error_handler import EmptyTeamError, UsageError
from ranking.ranking_tables import (
    CitsPerDocPrecision, build_absolute_table, build_percentage_table,
)
from ranking.reference_data import (
    MetricsDataset, ReferenceDataError, compare_with_published, load_metrics_file,
    load_reference_dataset, save_metrics_file,
)
from report.table_renderer import OutputFormat, parse_format, parse_style, render_table
from report.workbook_exporter import export_workbook
from selection.team_selector import (
    domain_matches, label_for_suffix, normalize_suffix, select_team,
)


class ProcessingStatus(Enum):
    """Status of command processing."""
    SUCCESS = "success"
    FAILED = "failed"


@dataclass
class ProcessingResult:
    """Result of one command."""
    status: ProcessingStatus
    message: str
    output: str = ""
    warnings: List[str] = field(default_factory=list)
    exit_code: int = 0
    data: Optional[Any] = None


class CommandProcessor:
    """
    Runs pipeline commands against one effective configuration.

    Command-line flags are expected to be merged into ``config`` already;
    explicit keyword arguments override both.
    """

    def __init__(self, config: ConfigManager, audit: Optional[AuditLogger] = None,
                 transport: Optional[Transport] = None):
        self.config = config
        self.audit = audit or AuditLogger()
        self.logger = logging.getLogger(__name__)
        self._transport = transport

    # ------------------------------------------------------------------ helpers

    def _name_match(self) -> NameMatch:
        return NameMatch(self.config.get('metrics.name_match', 'initial'))

    def _fetch_client(self) -> FetchClient:
        fetch_config = self.config.get_fetch_config()
        transport = self._transport
        if transport is None:
            if fetch_config.get('url_template'):
                transport = HttpTransport(fetch_config['url_template'], fetch_config.get('timeout', 30))
            elif fetch_config.get('fixture_dir'):
                transport = FixtureTransport(fetch_config['fixture_dir'])
        return FetchClient(FetchPolicy.from_config(fetch_config), transport)

    def _render_tables(self, tables: Sequence[Tuple[str, RankingTable]], fmt: OutputFormat,
                       style: Optional[DisplayStyle]) -> str:
        return "\n".join(render_table(table, fmt, style) for _, table in tables)

    def _write_outputs(self, tables: Sequence[Tuple[str, RankingTable]], output: str,
                       out: Optional[str], style: Optional[DisplayStyle]) -> Optional[Path]:
        if not out:
            return None
        path = Path(out)
        if path.suffix.lower() == '.xlsx':
            export_workbook(tables, path, style)
        else:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(output, encoding='utf-8')
        self.audit.log_event(AuditEventType.REPORT_WRITTEN, 'report', 'write', {'path': str(path)})
        return path

    # ------------------------------------------------------------------ ingest

    def _fetch(self, client: FetchClient, key: str) -> str:
        before = client.requests_made
        document = client.fetch(key)
        # requests_made only moves when the transport was used
        event = AuditEventType.FETCH if client.requests_made != before else AuditEventType.CACHE_HIT
        self.audit.log_event(event, 'ingest', 'fetch', {'key': key})
        return document

    def _read_search_pages(self, search_paths: Sequence[str], queries: Sequence[str],
                           client: Optional[FetchClient], report: ParseReport) -> List[ProfileStub]:
        documents: List[Tuple[str, str]] = []
        for path in search_paths:
            documents.append((str(path), Path(path).read_text(encoding='utf-8')))
        for query in queries:
            key = f"search:{normalize_suffix(query)}"
            documents.append((key, self._fetch(client, key)))

        stubs: List[ProfileStub] = []
        seen = set()
        for source, document in documents:
            try:
                page_stubs = parse_author_search_page(document, report)
            except EmptyResultError as e:
                raise EmptyResultError(f"{source}: {e}") from e
            self.logger.info(f"{source}: {len(page_stubs)} author entries")
            for stub in page_stubs:
                if stub.profile_id in seen:
                    continue
                seen.add(stub.profile_id)
                stubs.append(dataclasses.replace(stub, search_rank=len(stubs) + 1))
        return stubs

    def _read_profiles(self, profile_paths: Sequence[str], stubs: Sequence[ProfileStub],
                       client: Optional[FetchClient], strict: bool,
                       report: ParseReport) -> List[ResearcherProfile]:
        by_id = {s.profile_id: s for s in stubs}
        documents: List[Tuple[str, str]] = [(str(p), Path(p).read_text(encoding='utf-8')) for p in profile_paths]
        if client is not None and not profile_paths:
            for stub in stubs:
                key = f"profile:{stub.profile_id}"
                documents.append((key, self._fetch(client, key)))

        profiles: Dict[str, ResearcherProfile] = {}
        for source, document in documents:
            try:
                profile = parse_profile_document(document, strictness=self._name_match(), report=report)
            except ProfileParseError as e:
                if strict:
                    raise ProfileParseError(f"{source}: {e}") from e
                report.warn(f"{source}: profile skipped ({e})")
                continue

            stub = by_id.get(profile.profile_id)
            if stub is None:
                report.warn(f"{source}: profile {profile.profile_id} is in no search page, skipped")
                continue
            if profile.profile_id in profiles:
                report.warn(f"{source}: duplicate profile {profile.profile_id}, skipped")
                continue
            profiles[profile.profile_id] = dataclasses.replace(profile, search_rank=stub.search_rank)

        for stub in stubs:
            if stub.profile_id not in profiles:
                report.warn(f"No profile page for {stub.profile_id} (rank {stub.search_rank})")
        return sorted(profiles.values(), key=lambda p: p.search_rank)

    def cmd_ingest(self, search_paths: Sequence[str] = (), profile_paths: Sequence[str] = (),
                   out: Optional[str] = None, queries: Sequence[str] = (),
                   suffixes: Sequence[str] = (), strict: Optional[bool] = None) -> ProcessingResult:
        """Parse search and profile pages into a corpus file.

        Search pages are concatenated in the order given and ranked 1..n
        across all of them, so every profile gets a corpus-wide rank.
        """
        if not search_paths and not queries:
            raise UsageError("ingest needs at least one search page (path or --query)")
        if not profile_paths and not queries:
            raise UsageError("ingest needs profile pages (paths or --query)")
        if not out:
            raise UsageError("ingest needs --out for the corpus file")
        strict = self.config.get('corpus.strict', False) if strict is None else strict

        report = ParseReport()
        client = self._fetch_client() if queries else None
        stubs = self._read_search_pages(search_paths, queries, client, report)
        profiles = self._read_profiles(profile_paths, stubs, client, strict, report)

        corpus = build_corpus(profiles)
        path = save_corpus(corpus, out)
        self.audit.log_event(AuditEventType.CORPUS_SAVED, 'corpus', 'save',
                             {'path': str(path), 'profiles': len(profiles)})

        raw = self.config.get('selection.raw_suffix', False)
        counts = self._suffix_counts(stubs, [normalize_suffix(s) for s in suffixes] or list(queries), raw)
        lines = [f"{suffix}: {count}" for suffix, count in counts]
        lines.append(f"profiles: {len(profiles)}")
        return ProcessingResult(
            status=ProcessingStatus.SUCCESS,
            message=f"Wrote corpus with {len(profiles)} profiles to {path}",
            output="\n".join(lines) + "\n",
            warnings=report.warnings,
            data=corpus,
        )

    @staticmethod
    def _suffix_counts(stubs: Sequence[ProfileStub], suffixes: Sequence[str], raw: bool) -> List[Tuple[str, int]]:
        if suffixes:
            return [(s, sum(1 for st in stubs if domain_matches(st.email_domain, s, raw)))
                    for s in dict.fromkeys(normalize_suffix(x) for x in suffixes)]
        counts: Dict[str, int] = {}
        for stub in stubs:
            label = stub.email_domain.rsplit('.', 1)[-1]
            counts[label] = counts.get(label, 0) + 1
        return sorted(counts.items())

    # ------------------------------------------------------------------ analyze

    def _resolve_reference(self, reference: Optional[str], labels: List[str],
                           suffixes: List[str]) -> str:
        if reference is None:
            return labels[0]
        if reference in labels:
            return reference
        if normalize_suffix(reference) in suffixes:
            return labels[suffixes.index(normalize_suffix(reference))]
        raise UsageError(f"Reference {reference!r} is not among the analyzed teams {labels}")

    def compute_rows(self, corpus: Corpus, suffixes: List[str], labels: List[str], k: int,
                     mode: CitableMode, raw: bool, workers: int) -> Tuple[List[TeamMetrics], List[str]]:
        """One metrics row per suffix, in suffix order."""
        warnings: List[str] = []
        teams = []
        for suffix, label in zip(suffixes, labels):
            team = select_team(corpus, suffix, k=k, label=label, raw=raw)
            if not team.members:
                raise EmptyTeamError(f"No profile in the corpus ends with suffix {suffix!r}")
            if team.short:
                warnings.append(f"Team {label}: only {len(team.members)} of {k} profiles match {suffix!r}")
            self.audit.log_event(AuditEventType.TEAM_SELECTED, 'selection', 'select_team',
                                 {'label': label, 'suffix': suffix, 'members': len(team.members), 'k': k})
            teams.append(team)

        with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
            rows = list(pool.map(lambda team: compute_team_metrics(team, corpus, mode), teams))

        for row in rows:
            self.audit.log_event(AuditEventType.METRICS_COMPUTED, 'metrics', 'compute_team_metrics',
                                 {'label': row.label, 'citations': row.citations, 'h_index': row.h_index})
        return rows, warnings

    def cmd_analyze(self, corpus_path: str, suffixes: Sequence[str] = (), k: Optional[int] = None,
                    mode: Optional[str] = None, reference: Optional[str] = None,
                    fmt: Optional[str] = None, style: Optional[str] = None,
                    out: Optional[str] = None, metrics_out: Optional[str] = None,
                    strict: Optional[bool] = None) -> ProcessingResult:
        """Select teams, compute their metrics and build both table kinds."""
        if not corpus_path:
            raise UsageError("analyze needs a corpus path")
        suffix_list = list(dict.fromkeys(normalize_suffix(s) for s in suffixes if s.strip()))
        if not suffix_list:
            raise UsageError("analyze needs at least one --suffix")

        k = self.config.get('selection.k', 30) if k is None else k
        if k < 1:
            raise UsageError(f"--k must be a positive integer, got {k}")
        try:
            citable_mode = CitableMode.parse(mode or self.config.get('metrics.mode', 'all'))
            precision = CitsPerDocPrecision(self.config.get('ranking.cits_per_doc_precision', 'displayed'))
        except ValueError as e:
            raise UsageError(str(e)) from e
        output_format = parse_format(fmt or self.config.get('report.format', 'text'))
        display = parse_style(style or self.config.get('report.style', 'cids'))
        strict = self.config.get('corpus.strict', False) if strict is None else strict

        label_map = self.config.get('selection.labels', {}) or {}
        labels = [label_for_suffix(s, label_map) for s in suffix_list]
        reference_label = self._resolve_reference(
            reference if reference is not None else self.config.get('ranking.reference'), labels, suffix_list
        )

        started = time.monotonic()
        corpus = load_corpus(corpus_path, strict=strict, strictness=self._name_match())
        self.audit.log_event(AuditEventType.CORPUS_LOADED, 'corpus', 'load',
                             {'path': str(corpus_path), 'profiles': len(corpus)})

        rows, warnings = self.compute_rows(
            corpus, suffix_list, labels, k, citable_mode,
            self.config.get('selection.raw_suffix', False), self.config.get('metrics.workers', 1),
        )
        absolute = build_absolute_table(rows, style=display)
        percentage = build_percentage_table(absolute, reference_label, precision)
        tables = [("absolute", absolute), ("percentage", percentage)]
        self.audit.log_event(AuditEventType.TABLE_BUILT, 'ranking', 'build_tables',
                             {'rows': len(rows), 'reference': reference_label},
                             duration_ms=int((time.monotonic() - started) * 1000))

        output = self._render_tables(tables, output_format, display)
        self._write_outputs(tables, output, out, display)
        if metrics_out:
            save_metrics_file(rows, metrics_out, display, dataset="analysis",
                              description=f"Top {k} profiles per suffix: {', '.join(suffix_list)}")

        return ProcessingResult(
            status=ProcessingStatus.SUCCESS,
            message=f"Analyzed {len(rows)} teams from {corpus_path}",
            output=output,
            warnings=warnings,
            data={'rows': rows, 'absolute': absolute, 'percentage': percentage},
        )

    # ------------------------------------------------------------------ tables from files

    def _dataset_tables(self, dataset: MetricsDataset, reference: Optional[str]) -> List[Tuple[str, RankingTable]]:
        precision = CitsPerDocPrecision(self.config.get('ranking.cits_per_doc_precision', 'displayed'))
        absolute = build_absolute_table(dataset.rows, style=dataset.style)
        tables = [(f"{dataset.name} absolute", absolute)]
        if reference is not None:
            tables.append((f"{dataset.name} percentage", build_percentage_table(absolute, reference, precision)))
        return tables

    def cmd_reference_tables(self, dataset: str, fmt: Optional[str] = None, style: Optional[str] = None,
                             out: Optional[str] = None) -> ProcessingResult:
        """Render a shipped published table and its recomputed percentage table.

        Raises:
            ReferenceDataError: If the recomputed percentages differ from the
                published ones
        """
        if dataset not in ('scimago', 'cids'):
            raise UsageError(f"Unknown dataset {dataset!r}; expected 'scimago' or 'cids'")
        data = load_reference_dataset(dataset)
        if data.published_reference is None:
            raise ReferenceDataError(f"{dataset}: no published percentage table")

        tables = self._dataset_tables(data, data.published_reference)
        mismatches = compare_with_published(tables[1][1], data)
        if mismatches:
            raise ReferenceDataError(f"{dataset}: recomputed percentages differ: {'; '.join(mismatches)}")
        self.audit.log_event(AuditEventType.TABLE_BUILT, 'ranking', 'reference_tables',
                             {'dataset': dataset, 'reference': data.published_reference})

        output_format = parse_format(fmt or self.config.get('report.format', 'text'))
        display = parse_style(style) if style else None
        output = self._render_tables(tables, output_format, display)
        self._write_outputs(tables, output, out, display)
        return ProcessingResult(
            status=ProcessingStatus.SUCCESS,
            message=f"{dataset}: all {len(data.rows) * 5} percentage cells match the published table",
            output=output,
            data={'tables': tables},
        )

    def cmd_render(self, metrics_path: str, reference: Optional[str] = None, fmt: Optional[str] = None,
                   style: Optional[str] = None, out: Optional[str] = None) -> ProcessingResult:
        """Render a metrics file, adding a percentage table when a reference is named."""
        dataset = load_metrics_file(metrics_path)
        reference = reference or self.config.get('ranking.reference') or dataset.published_reference
        if reference is not None and reference not in [r.label for r in dataset.rows]:
            raise UsageError(f"Reference {reference!r} is not a row of {metrics_path}")

        tables = self._dataset_tables(dataset, reference)
        output_format = parse_format(fmt or self.config.get('report.format', 'text'))
        display = parse_style(style) if style else None
        output = self._render_tables(tables, output_format, display)
        self._write_outputs(tables, output, out, display)
        return ProcessingResult(
            status=ProcessingStatus.SUCCESS,
            message=f"Rendered {len(dataset.rows)} rows from {metrics_path}",
            output=output,
            data={'tables': tables},
        )
