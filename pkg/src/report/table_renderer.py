"""
Text, CSV and Markdown rendering of ranking tables.

Output is locale-independent: thousands separators are always ``,`` and the
decimal point is always ``.``. CSV carries bare numbers.
"""

import csv
import io
from enum import Enum
from fractions import Fraction
from typing import List, Optional

from corpus.models import DisplayStyle, RankingTable, TableKind
from ranking.ranking_tables import CITS_PER_DOC, quantize_half_up


class OutputFormat(Enum):
    """Rendering targets for ranking tables."""
    TEXT = "text"
    CSV = "csv"
    MARKDOWN = "markdown"


class UnknownFormatError(ValueError):
    """Raised for a format or style name that does not exist."""
    pass


def parse_format(value) -> OutputFormat:
    """Resolve a format name such as ``markdown``, case-insensitively."""
    if isinstance(value, OutputFormat):
        return value
    try:
        return OutputFormat(str(value).lower())
    except ValueError:
        raise UnknownFormatError(
            f"Unknown format {value!r}; expected one of {[f.value for f in OutputFormat]}"
        ) from None


def parse_style(value) -> DisplayStyle:
    """Resolve a style name such as ``scimago``, case-insensitively."""
    if isinstance(value, DisplayStyle):
        return value
    try:
        return DisplayStyle(str(value).lower())
    except ValueError:
        raise UnknownFormatError(
            f"Unknown style {value!r}; expected one of {[s.value for s in DisplayStyle]}"
        ) from None


def format_fixed(value, decimals: int, separators: bool) -> str:
    """Half-up fixed-point text of an exact value, computed without floats."""
    scaled = int(quantize_half_up(Fraction(value), decimals) * 10 ** decimals)
    whole, frac = divmod(scaled, 10 ** decimals)
    text = f"{whole:,}" if separators else str(whole)
    return f"{text}.{frac:0{decimals}d}" if decimals else text


def format_cell(value, column: int, kind: TableKind, style: DisplayStyle,
                fmt: OutputFormat) -> str:
    """One cell as text.

    CSV cells carry no separators and no percent sign. Undefined cells are
    blank in CSV and ``n/a`` elsewhere.
    """
    readable = fmt is not OutputFormat.CSV
    if value is None:
        return "n/a" if readable else ""
    if kind is TableKind.PERCENTAGE:
        return f"{value}%" if readable else str(value)
    if column == CITS_PER_DOC:
        return format_fixed(value, style.cits_per_doc_decimals, readable)
    return f"{int(value):,}" if readable else str(int(value))


def _cell_rows(table: RankingTable, style: DisplayStyle, fmt: OutputFormat) -> List[List[str]]:
    return [
        [row.label] + [format_cell(v, i, table.kind, style, fmt) for i, v in enumerate(row.cells)]
        for row in table.rows
    ]


def _render_csv(header: List[str], rows: List[List[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _render_markdown(header: List[str], rows: List[List[str]]) -> str:
    lines = ["| " + " | ".join(header) + " |",
             "|" + "|".join(["---"] + ["---:"] * (len(header) - 1)) + "|"]
    lines.extend("| " + " | ".join(cells) + " |" for cells in rows)
    return "\n".join(lines) + "\n"


def _render_text(header: List[str], rows: List[List[str]]) -> str:
    widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]

    def line(cells: List[str]) -> str:
        parts = [cells[0].ljust(widths[0])]
        parts.extend(c.rjust(w) for c, w in zip(cells[1:], widths[1:]))
        return "  ".join(parts)

    lines = [line(header), "  ".join("-" * w for w in widths)]
    lines.extend(line(cells) for cells in rows)
    return "\n".join(lines) + "\n"


def render_table(table: RankingTable, fmt="text", style: Optional[DisplayStyle] = None) -> str:
    """Render a table; ``style`` defaults to the table's own display style.

    Raises:
        UnknownFormatError: If ``fmt`` or ``style`` is not a known name
    """
    output_format = parse_format(fmt)
    display = parse_style(style) if style is not None else table.style
    header = list(table.column_labels)
    rows = _cell_rows(table, display, output_format)

    if output_format is OutputFormat.CSV:
        return _render_csv(header, rows)
    if output_format is OutputFormat.MARKDOWN:
        return _render_markdown(header, rows)
    return _render_text(header, rows)
