"""
Absolute and percentage-of-reference ranking tables.

Percentages are integers rounded half-up. The Self Citations column of a
percentage table is each row's self-citations as a share of its own
citations; the other four columns are shares of the reference row.
"""

import logging
import math
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Union

from corpus.models import (
    COLUMN_LABELS, DisplayStyle, RankingRow, RankingTable, TableKind, TeamMetrics,
)

logger = logging.getLogger(__name__)

Number = Union[int, Fraction]

DOCUMENTS, CITATIONS, SELF_CITATIONS, CITS_PER_DOC, H_INDEX = range(5)
REFERENCE_RELATIVE = (DOCUMENTS, CITATIONS, CITS_PER_DOC, H_INDEX)


class DuplicateLabelError(ValueError):
    pass


class UndefinedPercentError(ZeroDivisionError):
    """Raised when a percentage has a zero denominator."""

    def __init__(self, message: str, column: Optional[str] = None):
        super().__init__(message)
        self.column = column


class UnknownReferenceError(LookupError):
    pass


class CitsPerDocPrecision(Enum):
    """Percentages of Cits per Doc from displayed values or exact ratios."""
    DISPLAYED = "displayed"
    FULL = "full"


def round_half_up(value: Fraction) -> int:
    """Nearest integer, halves rounded up."""
    return math.floor(value + Fraction(1, 2))


def quantize_half_up(value: Number, decimals: int) -> Fraction:
    """Round an exact value half-up to ``decimals`` places."""
    scale = 10 ** decimals
    return Fraction(round_half_up(Fraction(value) * scale), scale)


def percent_round(numerator: Number, denominator: Number) -> int:
    """100 x numerator / denominator, rounded half-up to an integer.

    Raises:
        UndefinedPercentError: If the denominator is zero
    """
    if denominator == 0:
        raise UndefinedPercentError("Percentage of a zero denominator is undefined")
    return round_half_up(Fraction(numerator) * 100 / Fraction(denominator))


def build_absolute_table(rows: Sequence[TeamMetrics],
                         style: DisplayStyle = DisplayStyle.CIDS) -> RankingTable:
    """Rows in the given order under the standard column labels."""
    if not rows:
        raise ValueError("An absolute table needs at least one row")
    labels = [r.label for r in rows]
    duplicates = sorted({label for label in labels if labels.count(label) > 1})
    if duplicates:
        raise DuplicateLabelError(f"Duplicate row label(s): {', '.join(duplicates)}")
    return RankingTable(
        kind=TableKind.ABSOLUTE,
        rows=tuple(RankingRow(r.label, r.cells()) for r in rows),
        column_labels=COLUMN_LABELS,
        style=style,
    )


def _percent_cells(cells, reference, decimals: Optional[int]) -> tuple:
    values = list(cells)
    ref_values = list(reference)
    if decimals is not None:
        values[CITS_PER_DOC] = quantize_half_up(values[CITS_PER_DOC], decimals)
        ref_values[CITS_PER_DOC] = quantize_half_up(ref_values[CITS_PER_DOC], decimals)

    out: List[Optional[int]] = [None] * 5
    for column in REFERENCE_RELATIVE:
        out[column] = percent_round(values[column], ref_values[column])

    self_citations, citations = values[SELF_CITATIONS], values[CITATIONS]
    if self_citations is not None and citations:
        out[SELF_CITATIONS] = percent_round(self_citations, citations)
    return tuple(out)


def build_percentage_table(table: RankingTable, reference_label: str,
                           precision: CitsPerDocPrecision = CitsPerDocPrecision.DISPLAYED) -> RankingTable:
    """Express every row as integer percentages of the reference row.

    With displayed precision, Cits per Doc is first rounded the way the
    table's style prints it (integers for CIDS, two decimals for SCImago).
    A reference value that displays as 0 but is not 0 falls back to full
    precision rather than making the whole table undefined.

    Raises:
        UnknownReferenceError: reference_label names no row
        UndefinedPercentError: the reference row has a zero in a
            reference-relative column
    """
    if table.kind is not TableKind.ABSOLUTE:
        raise ValueError("Percentage tables are built from absolute tables")
    reference = table.row(reference_label)
    if reference is None:
        raise UnknownReferenceError(
            f"Reference {reference_label!r} is not a row label ({', '.join(table.labels)})"
        )

    decimals = table.style.cits_per_doc_decimals if precision is CitsPerDocPrecision.DISPLAYED else None
    reference_cells = list(reference.cells)
    if decimals is not None:
        reference_cells[CITS_PER_DOC] = quantize_half_up(reference_cells[CITS_PER_DOC], decimals)
        if not reference_cells[CITS_PER_DOC] and reference.cells[CITS_PER_DOC]:
            logger.warning(
                f"Reference row {reference_label!r} Cits per Doc {reference.cells[CITS_PER_DOC]} "
                f"displays as 0; using full precision"
            )
            decimals = None
            reference_cells = list(reference.cells)
    for column in REFERENCE_RELATIVE:
        if not reference_cells[column]:
            name = table.column_labels[column + 1]
            raise UndefinedPercentError(
                f"Reference row {reference_label!r} has zero {name}", column=name
            )

    rows = tuple(
        RankingRow(row.label, _percent_cells(row.cells, reference.cells, decimals))
        for row in table.rows
    )
    logger.debug(f"Built percentage table over {len(rows)} rows, reference {reference_label}")
    return RankingTable(
        kind=TableKind.PERCENTAGE,
        rows=rows,
        column_labels=table.column_labels,
        reference_label=reference_label,
        style=table.style,
    )
