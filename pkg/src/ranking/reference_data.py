"""
Metrics files: published reference tables and saved analysis rows.

A metrics file is JSON::

    {"dataset": "cids", "description": "...", "style": "cids",
     "cits_per_doc": "recompute",
     "rows": [{"label", "citable_documents", "citations", "self_citations",
               "cits_per_doc", "h_index"}],
     "percentages": {"reference": "USA", "rows": [{"label", "cells"}]}}

``cits_per_doc`` is text. With ``"verbatim"`` the printed value is the row
value (SCImago's figure is not citations / documents). With ``"recompute"``
the row value is citations / documents and the printed value must equal it at
the style's display precision. ``percentages`` is the published percentage
table, when there is one.
"""

import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from corpus.models import (
    CorpusIntegrityError, DisplayStyle, MetricsSource, RankingTable, TeamMetrics,
)
from metrics.team_metrics import cits_per_doc
from ranking.ranking_tables import quantize_half_up
from report.table_renderer import format_fixed

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).parent.parent.parent / "data"
REFERENCE_FILES = {
    'scimago': DATA_DIR / "scimago_1996_2007.json",
    'cids': DATA_DIR / "cids_2013.json",
}
ROW_FIELDS = ('label', 'citable_documents', 'citations', 'self_citations', 'cits_per_doc', 'h_index')


class ReferenceDataError(ValueError):
    """Raised when a metrics file is missing fields or contradicts itself."""
    pass


@dataclass(frozen=True)
class MetricsDataset:
    """A metrics file: rows plus, for published data, the printed percentage table."""
    name: str
    description: str
    style: DisplayStyle
    rows: Tuple[TeamMetrics, ...]
    published_reference: Optional[str] = None
    published_percentages: Optional[Dict[str, Tuple[Optional[int], ...]]] = None


def _int_field(row: Dict[str, Any], name: str, where: str, nullable: bool = False) -> Optional[int]:
    value = row.get(name)
    if value is None and nullable and name in row:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise ReferenceDataError(f"{where}.{name} must be an integer")
    return value


def _parse_row(row: Any, where: str, rule: str, style: DisplayStyle) -> TeamMetrics:
    if not isinstance(row, dict) or set(ROW_FIELDS) - set(row):
        raise ReferenceDataError(f"{where} must be an object with fields {list(ROW_FIELDS)}")
    label = row['label']
    if not isinstance(label, str) or not label:
        raise ReferenceDataError(f"{where}.label must be non-empty text")

    documents = _int_field(row, 'citable_documents', where)
    citations = _int_field(row, 'citations', where)
    try:
        printed = Fraction(str(row['cits_per_doc']))
    except (ValueError, ZeroDivisionError):
        raise ReferenceDataError(f"{where}.cits_per_doc is not a number: {row['cits_per_doc']!r}") from None

    if rule == 'recompute':
        value = cits_per_doc(citations, documents)
        if quantize_half_up(value, style.cits_per_doc_decimals) != printed:
            raise ReferenceDataError(
                f"{where}: printed Cits per Doc {row['cits_per_doc']} does not match "
                f"{citations} / {documents}"
            )
    else:
        value = printed

    try:
        return TeamMetrics(
            label=label,
            citable_documents=documents,
            citations=citations,
            self_citations=_int_field(row, 'self_citations', where, nullable=True),
            cits_per_doc=value,
            h_index=_int_field(row, 'h_index', where),
            source=MetricsSource.REFERENCE,
        )
    except CorpusIntegrityError as e:
        raise ReferenceDataError(f"{where}: {e}") from e


def parse_metrics_dataset(data: Any, name: str = "metrics") -> MetricsDataset:
    """Validate a decoded metrics document and build its rows.

    Raises:
        ReferenceDataError: Missing or malformed fields, or a printed Cits per
            Doc that its recomputation does not reproduce
    """
    if not isinstance(data, dict) or not isinstance(data.get('rows'), list):
        raise ReferenceDataError(f"{name}: expected an object with a 'rows' list")
    try:
        style = DisplayStyle(data.get('style', 'cids'))
    except ValueError:
        raise ReferenceDataError(f"{name}: unknown style {data.get('style')!r}") from None
    rule = data.get('cits_per_doc', 'verbatim')
    if rule not in ('verbatim', 'recompute'):
        raise ReferenceDataError(f"{name}: cits_per_doc rule must be 'verbatim' or 'recompute'")

    rows = tuple(_parse_row(r, f"{name}.rows[{i}]", rule, style) for i, r in enumerate(data['rows']))

    reference = None
    published = None
    percentages = data.get('percentages')
    if percentages is not None:
        reference = percentages.get('reference') if isinstance(percentages, dict) else None
        if not isinstance(reference, str) or not isinstance(percentages.get('rows'), list):
            raise ReferenceDataError(f"{name}.percentages needs 'reference' and 'rows'")
        published = {}
        for i, prow in enumerate(percentages['rows']):
            cells = prow.get('cells') if isinstance(prow, dict) else None
            if not isinstance(cells, list) or len(cells) != 5:
                raise ReferenceDataError(f"{name}.percentages.rows[{i}] needs five cells")
            published[prow.get('label')] = tuple(cells)

    return MetricsDataset(
        name=data.get('dataset', name),
        description=data.get('description', ''),
        style=style,
        rows=rows,
        published_reference=reference,
        published_percentages=published,
    )


def load_metrics_file(path: Union[str, Path]) -> MetricsDataset:
    """Load a metrics file.

    Raises:
        FileNotFoundError: If the file does not exist
        ReferenceDataError: If the content is malformed or inconsistent
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Metrics file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding='utf-8'))
    except json.JSONDecodeError as e:
        raise ReferenceDataError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}") from e
    dataset = parse_metrics_dataset(data, name=path.stem)
    logger.info(f"Loaded metrics dataset {dataset.name}: {len(dataset.rows)} rows")
    return dataset


def load_reference_dataset(name: str) -> MetricsDataset:
    """Load a shipped dataset by name (``scimago`` or ``cids``)."""
    if name not in REFERENCE_FILES:
        raise ReferenceDataError(f"Unknown reference dataset {name!r}; expected one of {sorted(REFERENCE_FILES)}")
    return load_metrics_file(REFERENCE_FILES[name])


def compare_with_published(table: RankingTable, dataset: MetricsDataset) -> List[str]:
    """List every cell where a computed percentage table differs from the published one."""
    mismatches = []
    published = dataset.published_percentages or {}
    if set(published) != set(table.labels):
        mismatches.append(f"row labels {sorted(table.labels)} != published {sorted(published)}")
    for row in table.rows:
        expected = published.get(row.label)
        if expected is None:
            continue
        for column, (got, want) in enumerate(zip(row.cells, expected)):
            if got != want:
                mismatches.append(f"{row.label} / {table.column_labels[column + 1]}: {got} != {want}")
    return mismatches


def metrics_to_dict(rows: Sequence[TeamMetrics], style: DisplayStyle = DisplayStyle.CIDS,
                    dataset: str = "analysis", description: str = "") -> Dict[str, Any]:
    """Metrics-file form of ``rows``; Cits per Doc is stored as displayed and recomputed on load."""
    return {
        'dataset': dataset,
        'description': description,
        'style': style.value,
        'cits_per_doc': 'recompute',
        'rows': [
            {
                'label': r.label,
                'citable_documents': r.citable_documents,
                'citations': r.citations,
                'self_citations': r.self_citations,
                'cits_per_doc': format_fixed(r.cits_per_doc, style.cits_per_doc_decimals, separators=False),
                'h_index': r.h_index,
            }
            for r in rows
        ],
    }


def save_metrics_file(rows: Sequence[TeamMetrics], path: Union[str, Path],
                      style: DisplayStyle = DisplayStyle.CIDS, **kwargs) -> Path:
    """Write ``rows`` as a metrics file that ``load_metrics_file`` reads back."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(metrics_to_dict(rows, style, **kwargs), indent=2) + "\n", encoding='utf-8')
    return path
