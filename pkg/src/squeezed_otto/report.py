"""Dataset writers: delimited text and JSON with a reproducibility header.

Every file starts with '#' comment lines carrying the package version, the
command that produced it, the master seed and the SHA-256 hash of the
normalized effective configuration.  Floats are written with repr so that
re-running the same command yields byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence


def _format_cell(value: Any) -> str:
    if value is None:
        return "nan"
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        try:
            value = value.item()  # numpy scalar -> python scalar
        except (AttributeError, ValueError):
            pass
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def header_lines(*, version: str, command: str, seed: int, config_hash: str,
                 extra: Mapping[str, Any] | None = None) -> list[str]:
    lines = [
        f"# squeezed-otto {version}",
        f"# command: {command}",
        f"# seed: {seed}",
        f"# config_hash: {config_hash}",
    ]
    for key, value in (extra or {}).items():
        lines.append(f"# {key}: {_format_cell(value)}")
    return lines


def write_csv(path: str | Path, columns: Sequence[str],
              rows: Iterable[Sequence[Any]], header: Sequence[str]) -> Path:
    """Write a comma-delimited table with '#' header comments. Returns path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    out: list[str] = list(header)
    out.append(",".join(columns))
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row has {len(row)} cells, expected {len(columns)}")
        out.append(",".join(_format_cell(cell) for cell in row))
    path.write_text("\n".join(out) + "\n", encoding="utf-8")
    return path


def _jsonable(value: Any) -> Any:
    if isinstance(value, Mapping):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        try:
            return value.item()  # numpy scalar
        except (AttributeError, ValueError):
            pass
    return value


def write_json(path: str | Path, payload: Mapping[str, Any]) -> Path:
    """Write a JSON document with sorted keys (stable bytes). Returns path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(_jsonable(payload), indent=2, sort_keys=True)
    path.write_text(text + "\n", encoding="utf-8")
    return path


def read_csv(path: str | Path) -> tuple[list[str], list[str], list[list[str]]]:
    """Read back a file written by write_csv.

    Returns (header_comment_lines, column_names, rows_as_strings).  Meant for
    tests and downstream scripts that want the raw cells.
    """
    comments: list[str] = []
    columns: list[str] = []
    rows: list[list[str]] = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            comments.append(line)
        elif not columns:
            columns = line.split(",")
        else:
            rows.append(line.split(","))
    return comments, columns, rows
