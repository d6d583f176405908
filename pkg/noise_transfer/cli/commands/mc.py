"""``mc``: Monte Carlo trajectories checked against the analytic ladders."""

from __future__ import annotations

import logging

from pydantic import ValidationError

from ...analysis.montecarlo import (
    analytic_report,
    compare_with_analytic,
    comparison_rows,
    run_trials,
    verdict,
)
from ...core.exceptions import DomainError
from ...core.schema import RunConfig, TrialConfig
from ...core.storage import write_csv, write_json
from .circuit import loss_from
from .common import digest, prepare_output, verdict_line

logger = logging.getLogger(__name__)

EXIT_DISAGREEMENT = 5


def trial_config(cfg: RunConfig) -> TrialConfig:
    if cfg.trials is None:
        raise DomainError("--trials is required")
    try:
        return TrialConfig(
            trials=cfg.trials,
            seed=cfg.seed,
            model=cfg.model,
            loss=loss_from(cfg),
            delta2=cfg.delta2 if cfg.delta2 is not None else 0.1,
            mu=cfg.mu if cfg.mu is not None else 0,
            spike_model=cfg.spike_model,
            noisy_readout=cfg.noisy_readout,
            rounds=cfg.rounds,
        )
    except ValidationError as exc:
        raise DomainError(str(exc)) from exc


def run(cfg: RunConfig) -> int:
    trials = trial_config(cfg)
    outcome = run_trials(trials)
    comparison = compare_with_analytic(outcome, analytic_report(trials))
    out = prepare_output(cfg)
    key = digest(cfg)
    write_json(
        out / "mc_outcome.json",
        {
            "config_hash": key,
            "outcome": outcome.model_dump(mode="json"),
            "comparison": comparison.model_dump(mode="json"),
        },
    )
    write_csv(
        out / "mc_rates.csv",
        ["class", "count", "observed", "predicted", "stderr", "z"],
        comparison_rows(outcome, comparison),
        [f"config_hash={key}"],
    )
    print(verdict(outcome, comparison))
    print(verdict_line(comparison.passed, f"max |z| = {max(abs(z) for z in comparison.z.values()):.3f}"))
    return 0 if comparison.passed else EXIT_DISAGREEMENT
