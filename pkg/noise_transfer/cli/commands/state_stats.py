"""``state-stats``: density grid and domain statistics of one state."""

from __future__ import annotations

import logging

from ...core.domains import domain_stats, peak_separation
from ...core.schema import RunConfig
from ...core.states import density_grid
from ...core.storage import write_csv, write_json
from ...core.templates import render
from .common import digest, partition_from, prepare_output, state_from

logger = logging.getLogger(__name__)


def run(cfg: RunConfig) -> int:
    state = state_from(cfg)
    part = partition_from(cfg, state, cfg.quadrature)
    stats = domain_stats(state, cfg.quadrature, part)
    grid = density_grid(state, cfg.quadrature)
    out = prepare_output(cfg)
    key = digest(cfg)
    text = render("state_summary", state=state.label(), stats=stats, partition=part.kind)
    fringes = None
    if state.kind == "cat" and not state.rotated and state.alpha > 0:
        if cfg.quadrature == "p" and cfg.domains == "auto":
            fringes = peak_separation(state.alpha)
    logger.info("Process: state-stats | State: %s | V=%.8g", state.label(), stats.variance)
    if cfg.out == "json":
        write_json(
            out / "state_stats.json",
            {
                "config_hash": key,
                "state": state.model_dump(mode="json"),
                "partition": part.model_dump(mode="json"),
                "stats": stats.model_dump(mode="json"),
                "peak_separation": fringes.model_dump(mode="json") if fringes else None,
                "grid": {"x": grid.x.tolist(), "density": grid.density.tolist()},
            },
        )
    else:
        footer = [*text.splitlines(), f"config_hash={key}"]
        write_csv(out / "density.csv", ["x", "density"], grid.rows(), footer)
        write_csv(
            out / "domains.csv",
            ["n", "mean", "prob"],
            [(d.n, d.mean, d.prob) for d in stats.domains],
            footer,
        )
    print(text)
    return 0
