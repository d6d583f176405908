"""Atomic storage of run artefacts.

JSON reports and CSV tables are written under a file lock to a temporary
file that then replaces the target, so a reader never sees a partial file.
All CLI output should go through the functions defined here.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from pathlib import Path
from typing import Any, Iterable, Sequence, Type, TypeVar

from filelock import FileLock
from pydantic import BaseModel

logger = logging.getLogger(__name__)

T = TypeVar("T", bound=BaseModel)

__all__ = ["read_json", "write_json", "write_csv"]


def _lock_path(path: Path) -> Path:
    """Return the path of the lock file guarding ``path``."""
    return path.with_suffix(path.suffix + ".lock")


def _replace(path: Path, payload: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    lock = FileLock(str(_lock_path(path)))
    with lock:
        tmp_path = path.with_suffix(path.suffix + ".tmp")
        tmp_path.write_text(payload, encoding="utf-8")
        tmp_path.replace(path)


def read_json(path: Path, model_cls: Type[T]) -> T:
    """Read a JSON file into a pydantic model.

    ``FileNotFoundError`` and validation errors propagate.
    """
    lock = FileLock(str(_lock_path(path)))
    with lock:
        contents = path.read_text(encoding="utf-8")
    return model_cls.model_validate_json(contents)


def write_json(path: Path, obj: BaseModel | dict[str, Any]) -> None:
    """Atomically write a pydantic object (or plain dict) as JSON.

    Serialisation happens before the lock is taken, so a ``ValueError``
    from a NaN leaves the target untouched.
    """
    data = obj.model_dump(mode="json", by_alias=True) if isinstance(obj, BaseModel) else obj
    json_data = json.dumps(data, ensure_ascii=False, allow_nan=False, indent=2)
    _replace(path, json_data)
    logger.debug("write_json: path=%s bytes=%d", path, len(json_data))


def write_csv(
    path: Path,
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    footer: Iterable[str] = (),
) -> None:
    """Atomically write a CSV table.

    ``footer`` lines are appended as ``# ...`` comments after the rows
    (summary values, config hash).
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    n_rows = 0
    for row in rows:
        writer.writerow([f"{v:.12g}" if isinstance(v, float) else v for v in row])
        n_rows += 1
    for line in footer:
        buf.write(f"# {line}\n")
    _replace(path, buf.getvalue())
    logger.debug("write_csv: path=%s rows=%d", path, n_rows)
