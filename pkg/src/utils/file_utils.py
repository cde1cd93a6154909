"""
file_utils.py

Utility functions for campaign and report files.

Responsibilities:
- SHA-256 digests of written artifacts (written next to them as `<name>.sha256`)
- Atomic text, JSON and CSV writes (temp file + rename), so an interrupted
  campaign never leaves a truncated file behind
"""

import csv
import hashlib
import io
import json
import os
import tempfile
from pathlib import Path
from typing import BinaryIO, Iterable, List, Union


def get_file_hash(file_obj: Union[Path, BinaryIO]) -> str:
    """
    Compute a SHA-256 hash for a given file.

    Args:
        file_obj (Path or file-like object): File to hash.

    Returns:
        str: Hexadecimal SHA-256 hash string.
    """
    hasher = hashlib.sha256()

    if hasattr(file_obj, "read") and callable(file_obj.read):
        file_bytes = file_obj.read()
        file_obj.seek(0)  # Reset for re-reading later
    else:
        with open(file_obj, "rb") as f:
            file_bytes = f.read()

    hasher.update(file_bytes)
    return hasher.hexdigest()


def atomic_write_text(path: Path, text: str, digest: bool = False) -> Path:
    """
    Write text to `path` through a temporary file in the same directory.

    Args:
        path (Path): Destination file.
        text (str): Content.
        digest (bool): Also write `<path>.sha256` with the content hash.

    Returns:
        Path: The destination path.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    if digest:
        atomic_write_text(path.with_name(path.name + ".sha256"), f"{get_file_hash(path)}  {path.name}\n")
    return path


def atomic_write_json(path: Path, payload: dict, digest: bool = False) -> Path:
    """Atomically write `payload` as sorted, indented JSON."""
    return atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n", digest)


def atomic_write_csv(path: Path, fieldnames: List[str], rows: Iterable[dict], digest: bool = False) -> Path:
    """Atomically write rows with a header; an empty `rows` still writes the header."""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _csv_value(row.get(k)) for k in fieldnames})
    return atomic_write_text(path, buffer.getvalue(), digest)


def _csv_value(value):
    # repr keeps full float precision so reruns compare byte for byte
    if isinstance(value, float):
        return repr(value)
    return "" if value is None else value
