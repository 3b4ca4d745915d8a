"""Reading observation streams and writing event and table files."""

from __future__ import annotations

import csv
import hashlib
import json
import math
import sys
from pathlib import Path
from typing import Any, Iterable, Iterator, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import IngestError

# ╭──────────────────────────────────────────────────────────────╮
# │ Format detection                                             │
# ╰──────────────────────────────────────────────────────────────╯

JSONL_SUFFIXES = {".jsonl", ".ndjson"}
SUPPORTED_FORMATS = ("csv", "jsonl")
DIGEST_CHUNK = 1 << 16


def detect_format(path: str | Path, fmt: Optional[str] = None) -> str:
    """Pick ``csv`` or ``jsonl`` from an explicit flag or the file suffix."""

    if fmt:
        fmt = fmt.lower()
        if fmt not in SUPPORTED_FORMATS:
            raise IngestError(f"Unsupported input format {fmt!r}; expected csv or jsonl", path=str(path))
        return fmt
    suffix = Path(path).suffix.lower()
    return "jsonl" if suffix in JSONL_SUFFIXES else "csv"


# ╭──────────────────────────────────────────────────────────────╮
# │ Parsing helpers                                              │
# ╰──────────────────────────────────────────────────────────────╯


def _parse_number(token: str, path: str, line: int, column: int) -> float:
    try:
        value = float(token)
    except ValueError as exc:
        raise IngestError(f"not a number: {token.strip()!r}", path=path, line=line, column=column) from exc
    if not math.isfinite(value):
        raise IngestError("non-finite value (NaN or Inf) rejected", path=path, line=line, column=column)
    return value


def _looks_like_header(cells: Sequence[str]) -> bool:
    for cell in cells:
        try:
            float(cell)
        except ValueError:
            return True
    return False


def _iter_csv(path: str) -> Iterator[Tuple[int, int, np.ndarray]]:
    with open(path, newline="", encoding="utf-8") as handle:
        index = 0
        for line_number, cells in enumerate(csv.reader(handle), start=1):
            if not cells or all(not cell.strip() for cell in cells):
                continue
            if line_number == 1 and _looks_like_header(cells):
                continue
            vector = np.array(
                [_parse_number(cell, path, line_number, column) for column, cell in enumerate(cells, start=1)]
            )
            yield line_number, index, vector
            index += 1


def _iter_jsonl(path: str) -> Iterator[Tuple[int, int, np.ndarray]]:
    previous: Optional[int] = None
    with open(path, encoding="utf-8") as handle:
        for line_number, raw in enumerate(handle, start=1):
            if not raw.strip():
                continue
            try:
                record = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise IngestError(f"invalid JSON: {exc.msg}", path=path, line=line_number, column=exc.colno) from exc
            if not isinstance(record, dict) or "y" not in record:
                raise IngestError('expected an object with a "y" field', path=path, line=line_number)
            index = record.get("t", 0 if previous is None else previous + 1)
            if not isinstance(index, int) or isinstance(index, bool):
                raise IngestError(f'"t" must be an integer, got {index!r}', path=path, line=line_number)
            if previous is not None and index <= previous:
                raise IngestError(f'"t" must increase, got {index} after {previous}', path=path, line=line_number)
            values = record["y"] if isinstance(record["y"], list) else [record["y"]]
            if not values:
                raise IngestError('"y" must not be empty', path=path, line=line_number)
            vector = np.empty(len(values))
            for column, value in enumerate(values, start=1):
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise IngestError(f"not a number: {value!r}", path=path, line=line_number, column=column)
                if not math.isfinite(value):
                    raise IngestError("non-finite value (NaN or Inf) rejected", path=path, line=line_number, column=column)
                vector[column - 1] = float(value)
            previous = index
            yield line_number, index, vector


def iter_observations(path: str | Path, fmt: Optional[str] = None) -> Iterator[Tuple[int, np.ndarray]]:
    """Yield ``(index, vector)`` pairs with a constant dimension.

    CSV rows are numbered from 0 in file order (a non-numeric first row is a
    header). JSONL records carry their own ``t``.
    """

    source = str(path)
    if not Path(source).exists():
        raise IngestError("file not found", path=source)
    reader = _iter_jsonl if detect_format(source, fmt) == "jsonl" else _iter_csv
    dimension: Optional[int] = None
    for count, (line_number, index, vector) in enumerate(reader(source), start=1):
        if dimension is None:
            dimension = vector.size
        elif vector.size != dimension:
            # Point at the first missing or surplus cell.
            raise IngestError(
                f"observation {count} has dimension {vector.size}, expected {dimension}",
                path=source,
                line=line_number,
                column=min(vector.size, dimension) + 1,
            )
        yield index, vector


def load_observations(path: str | Path, fmt: Optional[str] = None) -> np.ndarray:
    """Read a whole stream into an ``(m, d)`` array; empty input gives shape ``(0, 0)``."""

    rows = [vector for _, vector in iter_observations(path, fmt)]
    if not rows:
        return np.empty((0, 0))
    return np.vstack(rows)


def file_digest(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(DIGEST_CHUNK), b""):
            digest.update(block)
    return digest.hexdigest()


# ╭──────────────────────────────────────────────────────────────╮
# │ Writers                                                      │
# ╰──────────────────────────────────────────────────────────────╯


def write_events_jsonl(path: str | Path, events: Iterable[Any]) -> Path:
    """Write one JSON object per event (anything with ``to_record()``)."""

    target = Path(path)
    with open(target, "w", encoding="utf-8", newline="\n") as handle:
        for event in events:
            record = event.to_record() if hasattr(event, "to_record") else event
            handle.write(json.dumps(record) + "\n")
    return target


def write_rows_csv(path: str | Path, columns: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> Path:
    """Write ``rows`` under a fixed header; missing or ``None`` cells stay blank."""

    target = Path(path)
    with open(target, "w", encoding="utf-8", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=list(columns), lineterminator="\n", extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({key: ("" if value is None else value) for key, value in row.items()})
    return target


def dump_json(payload: Any, stream: Any = None) -> None:
    """Print ``payload`` as indented JSON (stdout by default)."""

    print(json.dumps(payload, indent=2), file=stream or sys.stdout)


__all__ = [
    "SUPPORTED_FORMATS",
    "detect_format",
    "dump_json",
    "file_digest",
    "iter_observations",
    "load_observations",
    "write_events_jsonl",
    "write_rows_csv",
]
