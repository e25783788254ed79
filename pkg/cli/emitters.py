"""
Plot-ready CSV and JSON writers.

Numbers are written with a fixed number of significant digits, '.' as the
decimal mark and '\\n' line endings, so identical runs produce identical
bytes. JSON documents use sorted keys and a two-space indent.
"""

import csv
import io
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import orjson
import typer

from utils.logger import setup_logger

logger = setup_logger(__name__)

JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS


def format_value(value: Any, precision: int) -> str:
    """CSV cell text; None becomes an empty field."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.{precision}g}"
    return str(value)


def round_value(value: Any, precision: int) -> Any:
    """JSON value with floats rounded to the configured significant digits."""
    if isinstance(value, float) and math.isfinite(value):
        return float(f"{value:.{precision}g}")
    if isinstance(value, dict):
        return {k: round_value(v, precision) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_value(v, precision) for v in value]
    return value


def render_csv(
    columns: Sequence[str],
    rows: Sequence[Sequence[Any]],
    precision: int,
    footer: Optional[Sequence[str]] = None,
) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(v, precision) for v in row])
    for line in footer or ():
        buffer.write(f"# {line}\n")
    return buffer.getvalue()


def render_json(document: Any, precision: int) -> str:
    return orjson.dumps(round_value(document, precision), option=JSON_OPTIONS).decode() + "\n"


def records(columns: Sequence[str], rows: Sequence[Sequence[Any]]) -> List[Dict[str, Any]]:
    return [dict(zip(columns, row)) for row in rows]


def emit(text: str, path: Optional[Path] = None) -> None:
    """Write rendered output to path, or to standard output when path is None."""
    if path is None:
        typer.echo(text, nl=False)
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")
    logger.info(f"Wrote {path}")


def emit_rows(
    columns: Sequence[str],
    rows: Sequence[Sequence[Any]],
    fmt: str,
    precision: int,
    path: Optional[Path] = None,
    footer: Optional[Sequence[str]] = None,
) -> str:
    """
    Render a table as CSV, or as a JSON list of records, and emit it.

    Returns:
        str: The rendered text.
    """
    if fmt == "json":
        text = render_json(records(columns, rows), precision)
    else:
        text = render_csv(columns, rows, precision, footer)
    emit(text, path)
    return text
