from __future__ import annotations

"""Configuration utilities for the project."""

import copy
import json
import os
from functools import lru_cache
from pathlib import Path
from typing import Any

__all__ = [
    "DEFAULTS",
    "load_config",
    "output_dir",
    "log_level",
    "numeric_setting",
    "ladder_convention",
]

CONFIG_PATH: Path = Path(__file__).resolve().parent.parent.parent / "config.json"

DEFAULTS: dict[str, Any] = {
    "output_dir": "results",
    "log_level": "INFO",
    "ladder_convention": "printed",
    "numerics": {
        "integration_epsrel": 1e-10,
        "tail_cutoff": 1e-16,
        "drop_probability": 1e-12,
        "ladder_tail": 1e-15,
        "gkp_weight_cutoff": 1e-12,
        "grid_points": 8193,
    },
    "montecarlo": {
        "block_size": 4096,
        "workers": 4,
        "z_threshold": 3.0,
    },
}


def _strip_comments(lines: list[str]) -> str:
    data = []
    for line in lines:
        l = line.strip()
        if l.startswith("#") or l.startswith("//"):
            continue
        if "#" in line:
            line = line.split("#", 1)[0]
        if "//" in line:
            line = line.split("//", 1)[0]
        data.append(line)
    return "".join(data)


def _merge(base: dict, override: dict) -> dict:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


@lru_cache(maxsize=8)
def _parse(path: Path, mtime_ns: int | None) -> dict:
    if mtime_ns is None:
        return _merge(DEFAULTS, {})
    with path.open("r", encoding="utf-8") as f:
        return _merge(DEFAULTS, json.loads(_strip_comments(f.readlines())))


def _current(path: Path | None = None) -> dict:
    """Parsed config shared by the getters; reparsed when the file changes."""
    cfg_path = path or CONFIG_PATH
    try:
        mtime_ns: int | None = cfg_path.stat().st_mtime_ns
    except FileNotFoundError:
        mtime_ns = None
    return _parse(cfg_path, mtime_ns)


def load_config(path: Path | None = None) -> dict:
    """Load configuration from ``config.json`` merged over :data:`DEFAULTS`.

    Lines starting with ``#`` or ``//`` are ignored, as are trailing
    comments, so the file can document itself.  A missing file yields the
    defaults.  The result is a private copy; the parsed file is cached
    until its modification time changes.
    """
    return copy.deepcopy(_current(path))


def output_dir(cfg: dict | None = None) -> Path:
    """Return the directory CLI outputs are written to.

    ``NOISE_TRANSFER_OUTPUT_DIR`` wins over ``config.json`` so batch jobs can
    redirect results without editing the file.
    """
    cfg = cfg or _current()
    return Path(os.getenv("NOISE_TRANSFER_OUTPUT_DIR") or cfg.get("output_dir", "results"))


def log_level(cfg: dict | None = None) -> str:
    """Return the configured logging level name."""
    cfg = cfg or _current()
    return os.getenv("NOISE_TRANSFER_LOG_LEVEL") or cfg.get("log_level", "INFO")


def numeric_setting(name: str, cfg: dict | None = None) -> Any:
    """Return a value from the ``numerics`` or ``montecarlo`` block."""
    cfg = cfg or _current()
    for block in ("numerics", "montecarlo"):
        section = cfg.get(block, {})
        if name in section:
            return section[name]
    raise KeyError(f"Unknown numeric setting: {name}")


def ladder_convention(cfg: dict | None = None) -> str:
    """Return the default error ladder convention (``printed`` or ``centred``)."""
    cfg = cfg or _current()
    return cfg.get("ladder_convention", "printed")
