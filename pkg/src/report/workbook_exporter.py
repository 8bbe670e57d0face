"""
Workbook export of ranking tables.
"""

import logging
import re
from pathlib import Path
from typing import Iterable, Optional, Tuple, Union

try:
    from openpyxl import Workbook
    from openpyxl.styles import Font
    from openpyxl.utils import get_column_letter
except ImportError:
    raise ImportError("openpyxl is required. Install with: pip install openpyxl")

from corpus.models import DisplayStyle, RankingTable, TableKind
from ranking.ranking_tables import CITS_PER_DOC, quantize_half_up

logger = logging.getLogger(__name__)

_SHEET_TITLE = re.compile(r"[\[\]\*\?/\\:]")


def _cell_value(value, column: int, kind: TableKind, style: DisplayStyle):
    if value is None:
        return None
    if kind is TableKind.ABSOLUTE and column == CITS_PER_DOC:
        shown = quantize_half_up(value, style.cits_per_doc_decimals)
        return int(shown) if style.cits_per_doc_decimals == 0 else float(shown)
    return int(value)


def export_workbook(tables: Iterable[Tuple[str, RankingTable]], path: Union[str, Path],
                    style: Optional[DisplayStyle] = None) -> Path:
    """Write one sheet per (name, table); numbers are stored as numeric cells.

    Percentage sheets use a ``0"%"`` number format so they read like the text
    tables while staying numeric. Undefined self-citations are left empty.
    """
    path = Path(path)
    workbook = Workbook()
    workbook.remove(workbook.active)

    for name, table in tables:
        display = style or table.style
        sheet = workbook.create_sheet(title=_SHEET_TITLE.sub("_", name)[:31])
        sheet.append(list(table.column_labels))
        for cell in sheet[1]:
            cell.font = Font(bold=True)

        for row in table.rows:
            sheet.append([row.label] + [
                _cell_value(v, i, table.kind, display) for i, v in enumerate(row.cells)
            ])

        for row_cells in sheet.iter_rows(min_row=2, min_col=2):
            for cell in row_cells:
                if table.kind is TableKind.PERCENTAGE:
                    cell.number_format = '0"%"'
                elif cell.column - 2 == CITS_PER_DOC:
                    cell.number_format = '0' if display is DisplayStyle.CIDS else '0.00'
                else:
                    cell.number_format = '#,##0'

        for index, label in enumerate(table.column_labels, 1):
            sheet.column_dimensions[get_column_letter(index)].width = max(12, len(label) + 2)

    path.parent.mkdir(parents=True, exist_ok=True)
    workbook.save(path)
    logger.info(f"Exported {len(workbook.sheetnames)} sheet(s) to {path}")
    return path
