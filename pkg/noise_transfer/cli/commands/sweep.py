"""``sweep``: domain variances along a state family parameter."""

from __future__ import annotations

import logging

from ...core.config import numeric_setting
from ...core.domains import FAMILIES, sweep_rows
from ...core.exceptions import DomainError
from ...core.schema import RunConfig
from ...core.storage import write_csv, write_json
from ...core.utils import linspace_params
from .common import digest, prepare_output

logger = logging.getLogger(__name__)

HEADER = ["param", "V_q", "V_p", "clipped_fraction"]


def _families(cfg: RunConfig) -> list[str]:
    names = cfg.states or ([cfg.state] if cfg.state else [])
    if not names:
        raise DomainError("--state or --states is required")
    # the bare ``gkp`` flag means the computational zero state
    names = ["gkp0" if n == "gkp" else n for n in names]
    unknown = [n for n in names if n not in FAMILIES]
    if unknown:
        raise DomainError(f"Unknown state families: {', '.join(unknown)}")
    return names


def run(cfg: RunConfig) -> int:
    if cfg.start is None or cfg.stop is None or cfg.steps is None:
        raise DomainError("--from, --to and --steps are required")
    if cfg.steps < 1:
        raise DomainError("--steps must be >= 1")
    families = _families(cfg)
    expected = {"alpha": ("cat", "coherent", "vacuum"), "delta2": ("squeezed", "vacuum", "gkp0", "gkp1", "gkp+", "gkp-")}
    if cfg.param is not None:
        wrong = [f for f in families if f not in expected[cfg.param]]
        if wrong:
            raise DomainError(f"--param {cfg.param} does not apply to {', '.join(wrong)}")
    values = linspace_params(cfg.start, cfg.stop, cfg.steps)
    workers = int(numeric_setting("workers"))
    out = prepare_output(cfg)
    key = digest(cfg)
    results = {}
    for family in families:
        rows = sweep_rows(family, values, workers=workers)
        results[family] = rows
        logger.info("Process: sweep | Family: %s | Points: %d", family, len(rows))
        if cfg.out == "csv":
            write_csv(out / f"sweep_{family}.csv", HEADER, rows, [f"config_hash={key}"])
    if cfg.out == "json":
        write_json(
            out / "sweep.json",
            {
                "config_hash": key,
                "columns": HEADER,
                "families": {f: [list(r) for r in rows] for f, rows in results.items()},
            },
        )
    return 0
