"""``circuit``: analytic reports of the teleportation circuit."""

from __future__ import annotations

import logging

from ...analysis.circuits import iterate, summary
from ...core.exceptions import DomainError
from ...core.schema import LossConfig, RunConfig
from ...core.storage import write_csv, write_json
from .common import digest, prepare_output

logger = logging.getLogger(__name__)

HEADER = ["round", "v1", "v2", "v1_printed", "v2_printed", "v_q_out", "v_p_out", "none", "bit", "phase", "both"]


def loss_from(cfg: RunConfig) -> LossConfig:
    if cfg.model == "ideal":
        return LossConfig()
    try:
        return LossConfig(eta=cfg.eta, eta_g=cfg.eta_g, eta_m=cfg.eta_m, eta_d=cfg.eta_d)
    except ValueError as exc:
        raise DomainError(str(exc)) from exc


def run(cfg: RunConfig) -> int:
    if cfg.delta2 is None:
        raise DomainError("--delta2 is required")
    reports = iterate(cfg.rounds, cfg.delta2, loss_from(cfg))
    out = prepare_output(cfg)
    key = digest(cfg)
    if cfg.out == "json":
        write_json(
            out / "circuit.json",
            {"config_hash": key, "reports": [r.model_dump(mode="json") for r in reports]},
        )
    else:
        rows = [
            (
                r.round,
                r.v1,
                r.v2,
                r.v1_printed,
                r.v2_printed,
                r.v_q_out,
                r.v_p_out,
                r.logical.p_none,
                r.logical.p_bit_flip,
                r.logical.p_phase_flip,
                r.logical.p_both,
            )
            for r in reports
        ]
        write_csv(out / "circuit_rounds.csv", HEADER, rows, [f"config_hash={key}"])
    logger.info("Process: circuit | Model: %s | Rounds: %d", cfg.model, cfg.rounds)
    print(summary(reports[-1]))
    return 0
