"""Result tables and their CSV / JSON serialization.

A table is a header (ordered metadata) plus rows with a fixed column set per
command.  Floats are written with 12 significant digits, so a written table
parses back to the same values at that precision, and identical inputs give
byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from .errors import TableIOError

COLUMNS = {
    "sweep-delta": ("delta", "re_lambda", "im_lambda", "re_eta", "im_eta", "in_window", "tracking_distance"),
    "exponents": ("mode_m", "eta", "D", "beta0", "beta_max", "lambda_prime"),
    "scan-contrast": ("kappa", "mode_m", "eta_or_empty", "D"),
    "flux-check": ("tau", "re_surface", "im_surface", "re_volume", "im_volume", "eta_D", "residual_identity"),
    "validate": ("check", "passed", "value", "tolerance", "detail"),
}

_INT_COLUMNS = {"mode_m"}
_BOOL_COLUMNS = {"in_window", "passed"}
_STR_COLUMNS = {"check", "detail"}


@dataclass
class SweepTable:
    """Rows of one command plus header metadata.

    ``rows`` are tuples in the order of :data:`COLUMNS` for ``command``;
    ``None`` marks an empty cell.
    """

    command: str
    header: Dict[str, Any] = field(default_factory=dict)
    rows: List[tuple] = field(default_factory=list)

    @property
    def columns(self):
        return COLUMNS[self.command]

    def column(self, name: str) -> list:
        k = self.columns.index(name)
        return [r[k] for r in self.rows]

    def append(self, *values) -> None:
        if len(values) != len(self.columns):
            raise ValueError(f"{self.command} rows have {len(self.columns)} columns, got {len(values)}")
        self.rows.append(tuple(values))


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if value == 0.0:
            return "0"
        return f"{value:.12g}"
    return str(value)


def _json_value(value):
    if isinstance(value, float):
        if not math.isfinite(value):
            return None
        return float(_fmt(value))
    return value


def _header_value(value) -> str:
    if isinstance(value, str):
        return value
    return json.dumps(value, sort_keys=True, default=str)


def dumps_table(table: SweepTable, fmt: str = "csv") -> str:
    """Serialize ``table`` to a string."""
    if fmt == "csv":
        buf = io.StringIO()
        for key, value in table.header.items():
            buf.write(f"# {key}: {_header_value(value)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(table.columns)
        for row in table.rows:
            w.writerow([_fmt(v) for v in row])
        return buf.getvalue()
    if fmt == "json":
        doc = {
            "command": table.command,
            "header": table.header,
            "columns": list(table.columns),
            "rows": [{c: _json_value(v) for c, v in zip(table.columns, row)} for row in table.rows],
        }
        return json.dumps(doc, indent=2, sort_keys=False, default=str) + "\n"
    raise ValueError(f"unknown table format {fmt!r}")


def write_table(table: SweepTable, fmt: str = "csv", path=None) -> str:
    """Serialize ``table``; also write it to ``path`` when given.

    Raises
    ------
    TableIOError
        If the file cannot be written.
    """
    text = dumps_table(table, fmt)
    if path is not None:
        try:
            Path(path).write_text(text)
        except OSError as exc:
            raise TableIOError(f"cannot write {path}: {exc}") from exc
    return text


def _parse_cell(column: str, text: str):
    if text == "":
        return None
    if column in _STR_COLUMNS:
        return text
    if column in _BOOL_COLUMNS:
        return text == "true"
    if column in _INT_COLUMNS:
        return int(text)
    return float(text)


def loads_table(text: str, fmt: str = "csv", command: Optional[str] = None) -> SweepTable:
    """Parse a serialized table (inverse of :func:`dumps_table`)."""
    if fmt == "json":
        doc = json.loads(text)
        cmd = doc["command"]
        cols = COLUMNS[cmd]
        rows = [tuple(r.get(c) for c in cols) for r in doc["rows"]]
        return SweepTable(cmd, dict(doc["header"]), rows)
    if fmt != "csv":
        raise ValueError(f"unknown table format {fmt!r}")
    header, body = {}, []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            try:
                header[key] = json.loads(value)
            except json.JSONDecodeError:
                header[key] = value
        elif line:
            body.append(line)
    reader = csv.reader(body)
    cols = tuple(next(reader))
    cmd = command or header.get("command")
    if cmd is None:
        cmd = next(c for c, v in COLUMNS.items() if v == cols)
    if cols != COLUMNS[cmd]:
        raise ValueError(f"column set {cols} does not match command {cmd!r}")
    rows = [tuple(_parse_cell(c, v) for c, v in zip(cols, r)) for r in reader]
    return SweepTable(cmd, header, rows)


def read_table(path, fmt: Optional[str] = None) -> SweepTable:
    path = Path(path)
    if fmt is None:
        fmt = "json" if path.suffix == ".json" else "csv"
    try:
        text = path.read_text()
    except OSError as exc:
        raise TableIOError(f"cannot read {path}: {exc}") from exc
    return loads_table(text, fmt)
