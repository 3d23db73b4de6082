import csv
import gzip
import io
import numbers
import os
import shlex
from typing import Dict, Iterable, List, Optional, Sequence, TextIO, Tuple

import numpy as np
from django.conf import settings

SIGNIFICANT_DIGITS = 17


def ensure_parent_dir(path: str) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)


def get_output_file_path(command: str, fmt: str = "csv") -> str:
    base_dir = getattr(settings, "OUTPUT_DIR", ".") if settings.configured else "."
    return os.path.join(str(base_dir), f"{command}.{fmt}")


def format_value(value) -> str:
    """Fixed formatting so identical runs produce identical bytes; None is an empty cell."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int,)):
        return str(value)
    if isinstance(value, float):
        return f"{value:.{SIGNIFICANT_DIGITS}g}"
    try:
        return f"{float(value):.{SIGNIFICANT_DIGITS}g}"
    except (TypeError, ValueError):
        return str(value)


def metadata_line(metadata: Dict[str, object]) -> str:
    parts = [f"{key}={shlex.quote(format_value(val))}" for key, val in metadata.items()]
    return "# " + " ".join(parts)


def parse_metadata_line(line: str) -> Dict[str, str]:
    """Inverse of ``metadata_line``; values come back as strings."""
    text = line.strip()
    if not text.startswith("#"):
        raise ValueError("metadata line must start with '#'")
    result: Dict[str, str] = {}
    for token in shlex.split(text[1:]):
        key, sep, value = token.partition("=")
        if not sep:
            raise ValueError(f"malformed metadata token: {token!r}")
        result[key] = value
    return result


def write_csv_stream(
    stream: TextIO,
    rows: Iterable[Dict],
    header: Sequence[str],
    metadata: Optional[Dict[str, object]] = None,
) -> int:
    if metadata is not None:
        stream.write(metadata_line(metadata) + "\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    rows_written = 0
    for row in rows:
        writer.writerow([format_value(row.get(col, "")) for col in header])
        rows_written += 1
    return rows_written


def write_csv_file(
    file_path: str,
    rows: Iterable[Dict],
    header: Sequence[str],
    metadata: Optional[Dict[str, object]] = None,
) -> Tuple[int, int]:
    """
    Write rows as CSV (gzip-compressed when the path ends in ``.gz``).
    The file is written to a temp path and renamed into place.

    Returns (bytes_written, rows_written).
    """
    ensure_parent_dir(file_path)
    tmp_path = file_path + ".tmp"
    if file_path.endswith(".gz"):
        with gzip.open(tmp_path, "wb") as gz:
            text_stream = io.TextIOWrapper(gz, encoding="utf-8", newline="")
            rows_written = write_csv_stream(text_stream, rows, header, metadata)
            text_stream.flush()
            text_stream.detach()
    else:
        with open(tmp_path, "w", encoding="utf-8", newline="") as handle:
            rows_written = write_csv_stream(handle, rows, header, metadata)
    os.replace(tmp_path, file_path)
    return os.path.getsize(file_path), rows_written


def read_csv_file(file_path: str) -> Tuple[Dict[str, str], List[Dict[str, str]]]:
    opener = gzip.open if file_path.endswith(".gz") else open
    with opener(file_path, "rt", encoding="utf-8", newline="") as handle:
        first = handle.readline()
        metadata = parse_metadata_line(first) if first.startswith("#") else {}
        if not metadata:
            handle.seek(0)
        return metadata, list(csv.DictReader(handle))


def column_type(pa, values: Sequence):
    """Arrow type of one output column; None entries become nulls."""
    present = [value for value in values if value is not None]
    if not present:
        return pa.float64()
    if all(isinstance(value, (bool, np.bool_)) for value in present):
        return pa.bool_()
    if all(isinstance(value, numbers.Integral) and not isinstance(value, (bool, np.bool_)) for value in present):
        return pa.int64()
    if all(isinstance(value, numbers.Real) and not isinstance(value, (bool, np.bool_)) for value in present):
        return pa.float64()
    return pa.string()


def run_schema(pa, rows: List[Dict], header: Sequence[str], metadata: Optional[Dict[str, object]] = None):
    """
    Column types in header order, with the run metadata (formatted as in
    the CSV header line) attached to the schema.
    """
    fields = [pa.field(name, column_type(pa, [row.get(name) for row in rows])) for name in header]
    schema_metadata = {key: format_value(val) for key, val in (metadata or {}).items()}
    return pa.schema(fields, metadata=schema_metadata or None)


def write_parquet_file(
    file_path: str,
    rows: Iterable[Dict],
    header: Sequence[str],
    metadata: Optional[Dict[str, object]] = None,
) -> Tuple[int, int]:
    """
    Write result rows to a gzip-compressed Parquet file with a typed
    schema. Missing parameters are stored as nulls. The file is written to
    a temp path and renamed into place.

    Returns (bytes_written, rows_written).
    """
    try:
        import pyarrow as pa
        import pyarrow.parquet as pq
    except ImportError as e:
        raise RuntimeError("parquet dependencies missing; install pyarrow") from e

    rows = list(rows)
    schema = run_schema(pa, rows, header, metadata)
    columns = []
    for item in schema:
        values = [row.get(item.name) for row in rows]
        if pa.types.is_string(item.type):
            values = [None if value is None else str(value) for value in values]
        elif pa.types.is_floating(item.type):
            values = [None if value is None else float(value) for value in values]
        elif pa.types.is_integer(item.type):
            values = [None if value is None else int(value) for value in values]
        elif pa.types.is_boolean(item.type):
            values = [None if value is None else bool(value) for value in values]
        columns.append(pa.array(values, type=item.type))
    table = pa.Table.from_arrays(columns, schema=schema)

    ensure_parent_dir(file_path)
    tmp_path = file_path + ".tmp"
    pq.write_table(table, tmp_path, compression="gzip")
    os.replace(tmp_path, file_path)
    return os.path.getsize(file_path), table.num_rows


def read_parquet_file(file_path: str) -> Tuple[Dict[str, str], List[Dict]]:
    """Run metadata and rows of a file written by ``write_parquet_file``."""
    import pyarrow.parquet as pq

    table = pq.read_table(file_path)
    raw = table.schema.metadata or {}
    metadata = {key.decode("utf-8"): value.decode("utf-8") for key, value in raw.items()}
    return metadata, table.to_pylist()
