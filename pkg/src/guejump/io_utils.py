"""Atomic, deterministic table output.

CSV files carry '#'-prefixed metadata header lines (the effective config),
then a header row and data rows; JSON files mirror the same content under
{"meta", "columns", "rows"}.  Floats are serialized with 17 significant
digits, which round-trips bit-exactly through float().
"""

from __future__ import annotations

import json
import os
import tempfile

__all__ = ["fmt_value", "render_csv", "render_json", "atomic_write_text"]


def fmt_value(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def render_csv(meta: dict, columns: list[str], rows) -> str:
    lines = [f"# {k} = {fmt_value(v)}" for k, v in sorted(meta.items())]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(fmt_value(v) for v in row))
    return "\n".join(lines) + "\n"


def render_json(meta: dict, columns: list[str], rows) -> str:
    payload = {
        "meta": dict(sorted(meta.items())),
        "columns": columns,
        "rows": [list(row) for row in rows],
    }
    # float repr is shortest-round-trip, so numeric values survive bit-exactly
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"


def atomic_write_text(path: str, text: str) -> None:
    """Write via a temp file in the target directory plus rename."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-guejump-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def parse_csv(text: str):
    """Inverse of render_csv: (meta_lines, columns, rows-as-strings)."""
    meta, columns, rows = [], None, []
    for line in text.splitlines():
        if line.startswith("#"):
            meta.append(line)
        elif columns is None:
            columns = line.split(",")
        elif line:
            rows.append(line.split(","))
    return meta, columns, rows
