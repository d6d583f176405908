import hashlib
import json
import math
import re
from typing import Any, Optional

from pydantic import BaseModel

__all__ = ["parse_float", "parse_domains", "config_hash", "linspace_params"]


def parse_float(value: Any) -> Optional[float]:
    """Return ``value`` as ``float`` if possible.

    Strings may use a comma as decimal separator and may be written as
    ``pi``, ``pi/2`` or ``sqrt(2pi)`` multiples (``"2*pi"``).  If
    conversion fails, ``None`` is returned.
    """
    if value is None:
        return None
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        text = value.strip().lower().replace(",", ".").replace(" ", "")
        consts = {"sqrt(2pi)": math.sqrt(2 * math.pi), "pi": math.pi}
        for name, const in consts.items():
            m = re.fullmatch(rf"([-+]?[0-9.]*)\*?{re.escape(name)}(?:/([0-9.]+))?", text)
            if m:
                factor = float(m.group(1)) if m.group(1) not in ("", "+", "-") else float(f"{m.group(1)}1")
                div = float(m.group(2)) if m.group(2) else 1.0
                return factor * const / div
        try:
            return float(text)
        except ValueError:
            return None
    return None


def parse_domains(text: str) -> tuple[str, Optional[float], float]:
    """Split a ``--domains`` value into ``(kind, period, offset)``.

    Accepted forms: ``auto``, ``sign``, ``single``, ``lattice:PERIOD`` and
    ``lattice:PERIOD:OFFSET``.
    """
    parts = text.strip().split(":")
    kind = parts[0]
    if kind in ("auto", "sign", "single") and len(parts) == 1:
        return kind, None, 0.0
    if kind == "lattice" and len(parts) in (2, 3):
        period = parse_float(parts[1])
        offset = parse_float(parts[2]) if len(parts) == 3 else 0.0
        if period is not None and offset is not None:
            return kind, period, offset
    raise ValueError(f"Invalid domains specification: {text!r}")


def config_hash(config: BaseModel | dict) -> str:
    """SHA-256 of the canonical JSON form of ``config``."""
    data = config.model_dump(mode="json", by_alias=True) if isinstance(config, BaseModel) else config
    canonical = json.dumps(data, sort_keys=True, separators=(",", ":"), allow_nan=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def linspace_params(start: float, stop: float, steps: int) -> list[float]:
    """``steps`` evenly spaced values from ``start`` to ``stop`` inclusive."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if steps == 1:
        return [float(start)]
    width = (stop - start) / (steps - 1)
    return [start + i * width for i in range(steps)]
